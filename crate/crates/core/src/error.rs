use crate::model::NodeId;
use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its documented domain.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A node id that does not exist in the tree.
    #[error("node {0} not found")]
    NodeNotFound(NodeId),

    /// The operation requires an ONU.
    #[error("node {0} is not an ONU")]
    NotAnOnu(NodeId),

    /// The operation requires at least one ONU in the tree.
    #[error("tree has no ONUs")]
    NoOnus,

    /// The exhaustive oracle refuses state spaces beyond its bound.
    #[error("network too large for exhaustive enumeration: {components} components, limit {limit}")]
    NetworkTooLarge { components: usize, limit: usize },

    /// Sample statistics need a variance estimate.
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    /// A topology document that cannot be represented as a tree at all.
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    /// Failure while evaluating one network of a population.
    #[error("network {index} of population: {source}")]
    PopulationNetwork {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("topology JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
