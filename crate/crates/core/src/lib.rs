//! Service-availability modeling for tree-topology optical access networks.
//!
//! The crate models a PON as a rooted tree of one OLT, passive/active remote
//! nodes and ONUs, where some ONUs can reach a second operator and therefore
//! act as alternative service sources. It provides:
//!
//! - [`model`]: domain types, the component availability table, topology
//!   validation and the JSON wire format;
//! - [`generator`]: seeded random synthesis of three-stage PON populations;
//! - [`engine`]: exact per-ONU service availability via a recursive
//!   series/parallel decomposition of the service paths;
//! - [`oracle`]: brute-force availability by exhaustive enumeration of
//!   component states, used to certify the engine on small networks;
//! - [`analytic`]: closed-form expectations for cross-checks;
//! - [`montecarlo`]: population sweeps producing plot-ready data files.
//!
//! Population evaluation is data-parallel with rayon when the default
//! `parallel` feature is enabled; results are identical either way.

pub mod analytic;
pub mod engine;
mod error;
pub mod generator;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod seed;

pub use error::{Error, Result};
