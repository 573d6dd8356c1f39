//! Domain types for PON topologies and the component availability table.
//!
//! A [`PonTree`] is a rooted tree: one OLT at the root, remote nodes (passive
//! or active) in the interior, ONUs at the leaves, and one upstream fiber per
//! non-root node. Availabilities are attached to every node and fiber at
//! construction time from an [`AvailabilityTable`], so evaluators never need
//! the table for path components.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Steady-state availability constants per component class.
///
/// The defaults are the values used throughout the study; fiber-role entries
/// derive from `fiber_per_km` at the mean lengths 10 km (feeder), 3 km
/// (distribution) and 0.7 km (last mile).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AvailabilityTable {
    pub olt: f64,
    pub onu: f64,
    pub passive_rn: f64,
    pub active_rn: f64,
    pub fiber_per_km: f64,
    pub feeder_fiber: f64,
    pub distribution_fiber: f64,
    pub last_mile_fiber: f64,
}

impl Default for AvailabilityTable {
    fn default() -> Self {
        Self {
            olt: 0.9999485,
            onu: 0.9999645,
            passive_rn: 0.9999987,
            active_rn: 0.9999485,
            fiber_per_km: 0.9999429,
            feeder_fiber: 0.999429,
            distribution_fiber: 0.999829,
            last_mile_fiber: 0.99996,
        }
    }
}

impl AvailabilityTable {
    /// Checks that every entry lies in (0, 1].
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("olt", self.olt),
            ("onu", self.onu),
            ("passive_rn", self.passive_rn),
            ("active_rn", self.active_rn),
            ("fiber_per_km", self.fiber_per_km),
            ("feeder_fiber", self.feeder_fiber),
            ("distribution_fiber", self.distribution_fiber),
            ("last_mile_fiber", self.last_mile_fiber),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "availability {name}={value} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Table entry for a node kind. ONUs map to the same entry whether or
    /// not they are IC-capable.
    pub fn component_availability(&self, kind: NodeKind) -> f64 {
        match kind {
            NodeKind::Olt => self.olt,
            NodeKind::PassiveRn => self.passive_rn,
            NodeKind::ActiveRn => self.active_rn,
            NodeKind::Onu { .. } => self.onu,
        }
    }

    /// Table entry for a fiber role.
    pub fn fiber_availability(&self, role: FiberRole) -> f64 {
        match role {
            FiberRole::Feeder => self.feeder_fiber,
            FiberRole::Distribution => self.distribution_fiber,
            FiberRole::LastMile => self.last_mile_fiber,
        }
    }

    /// Loads a table from a JSON file; absent fields keep their defaults.
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let table: Self = serde_json::from_str(&text)?;
        table.validate()?;
        Ok(table)
    }
}

/// Availability of a fiber of the given length: `per_km` raised to the
/// length in kilometres.
pub fn fiber_availability_from_length(length_km: f64, per_km: f64) -> Result<f64> {
    if !(length_km >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "fiber length {length_km} must be nonnegative"
        )));
    }
    if !(per_km > 0.0 && per_km <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "per-km availability {per_km} outside (0, 1]"
        )));
    }
    Ok(per_km.powf(length_km))
}

/// What a node is: the head-end, a splitter/switch, or a leaf device.
///
/// An `Onu { ic: true }` can exchange traffic with the other operator and
/// therefore offers service like the OLT does; `ic: false` marks a plain ONU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Olt,
    PassiveRn,
    ActiveRn,
    Onu { ic: bool },
}

impl NodeKind {
    pub fn is_rn(self) -> bool {
        matches!(self, NodeKind::PassiveRn | NodeKind::ActiveRn)
    }

    pub fn is_onu(self) -> bool {
        matches!(self, NodeKind::Onu { .. })
    }

    /// True for nodes that may divert upstream traffic back downstream:
    /// the OLT and active remote nodes.
    pub fn can_turn_around(self) -> bool {
        matches!(self, NodeKind::Olt | NodeKind::ActiveRn)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Olt => write!(f, "olt"),
            NodeKind::PassiveRn => write!(f, "prn"),
            NodeKind::ActiveRn => write!(f, "arn"),
            NodeKind::Onu { ic: true } => write!(f, "onu(ic)"),
            NodeKind::Onu { ic: false } => write!(f, "onu"),
        }
    }
}

/// Remote-node flavor, used where only the passive/active distinction matters
/// (scenario stage layouts, closed-form path products).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnKind {
    Passive,
    Active,
}

impl From<RnKind> for NodeKind {
    fn from(kind: RnKind) -> Self {
        match kind {
            RnKind::Passive => NodeKind::PassiveRn,
            RnKind::Active => NodeKind::ActiveRn,
        }
    }
}

/// Fiber classification, fully determined by its endpoints:
/// OLT to RN is feeder, RN to RN is distribution, RN to ONU is last mile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberRole {
    Feeder,
    Distribution,
    LastMile,
}

impl FiberRole {
    /// The role implied by the endpoint kinds, or `None` when no fiber may
    /// connect such endpoints.
    pub fn for_endpoints(parent: NodeKind, child: NodeKind) -> Option<FiberRole> {
        match (parent, child) {
            (NodeKind::Olt, k) if k.is_rn() => Some(FiberRole::Feeder),
            (p, c) if p.is_rn() && c.is_rn() => Some(FiberRole::Distribution),
            (p, NodeKind::Onu { .. }) if p.is_rn() => Some(FiberRole::LastMile),
            _ => None,
        }
    }
}

impl fmt::Display for FiberRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberRole::Feeder => write!(f, "feeder"),
            FiberRole::Distribution => write!(f, "distribution"),
            FiberRole::LastMile => write!(f, "lastmile"),
        }
    }
}

/// Dense node identifier; the OLT is always id 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub availability: f64,
}

/// A fiber connecting a node to its unique upstream parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub child: NodeId,
    pub parent: NodeId,
    pub role: FiberRole,
    pub availability: f64,
}

/// Rooted PON topology. Immutable after construction; evaluators may share
/// it freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PonTree {
    nodes: Vec<Node>,
    fibers: Vec<Fiber>,
    /// Index into `fibers` of the upstream fiber of each node; `None` for the root.
    upstream: Vec<Option<usize>>,
    /// Downstream children of each node, in fiber insertion order.
    children: Vec<Vec<NodeId>>,
}

impl PonTree {
    /// Assembles a tree from raw parts without checking the topology
    /// invariants (use [`PonTree::validate`] for those). Rejects only inputs
    /// that cannot be represented at all: non-dense ids, fibers with unknown
    /// endpoints, self-loops, or a node with two upstream fibers.
    pub fn from_parts(nodes: Vec<Node>, fibers: Vec<Fiber>) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidTopology("no nodes".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id.index() != i {
                return Err(Error::InvalidTopology(format!(
                    "node ids must be dense and ordered: position {i} holds id {}",
                    node.id
                )));
            }
        }
        let mut upstream = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (k, fiber) in fibers.iter().enumerate() {
            let (c, p) = (fiber.child.index(), fiber.parent.index());
            if c >= n || p >= n {
                return Err(Error::InvalidTopology(format!(
                    "fiber {}->{} references a missing node",
                    fiber.child, fiber.parent
                )));
            }
            if c == p {
                return Err(Error::InvalidTopology(format!("self-loop at node {}", fiber.child)));
            }
            if upstream[c].is_some() {
                return Err(Error::InvalidTopology(format!(
                    "node {} has more than one upstream fiber",
                    fiber.child
                )));
            }
            upstream[c] = Some(k);
            children[p].push(fiber.child);
        }
        Ok(Self { nodes, fibers, upstream, children })
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    /// Nodes plus fibers; the size of the oracle's state space exponent.
    pub fn component_count(&self) -> usize {
        self.nodes.len() + self.fibers.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.index()).ok_or(Error::NodeNotFound(id))
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id.index()].kind
    }

    pub fn availability(&self, id: NodeId) -> f64 {
        self.nodes[id.index()].availability
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.upstream[id.index()].map(|k| self.fibers[k].parent)
    }

    /// The fiber connecting `id` to its parent.
    pub fn upstream_fiber(&self, id: NodeId) -> Option<&Fiber> {
        self.upstream[id.index()].map(|k| &self.fibers[k])
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.index()]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.children[id.index()].is_empty()
    }

    /// Iterator over all ONU ids in id order.
    pub fn onus(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.kind.is_onu()).map(|n| n.id)
    }

    /// Number of hops to the root, or `None` if the parent chain does not
    /// reach it (malformed topology).
    pub fn depth(&self, id: NodeId) -> Option<usize> {
        let mut current = id;
        for hops in 0..=self.nodes.len() {
            match self.parent(current) {
                None if current == self.root() => return Some(hops),
                None => return None,
                Some(up) => current = up,
            }
        }
        None
    }

    /// Copy of the tree with one node availability replaced.
    pub fn with_node_availability(&self, id: NodeId, availability: f64) -> PonTree {
        let mut tree = self.clone();
        tree.nodes[id.index()].availability = availability;
        tree
    }

    /// Copy of the tree with the availability of `child`'s upstream fiber replaced.
    pub fn with_fiber_availability(&self, child: NodeId, availability: f64) -> PonTree {
        let mut tree = self.clone();
        let k = tree.upstream[child.index()].expect("node has an upstream fiber");
        tree.fibers[k].availability = availability;
        tree
    }

    /// Checks every topology invariant and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        if self.fibers.len() + 1 != self.nodes.len() {
            violations.push(Violation::NotATree {
                nodes: self.nodes.len(),
                fibers: self.fibers.len(),
            });
        }

        let roots: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&i| self.upstream[i].is_none())
            .map(|i| self.nodes[i].id)
            .collect();
        if roots != [self.root()] {
            violations.push(Violation::RootSet { roots: roots.clone() });
        }
        if self.kind(self.root()) != NodeKind::Olt {
            violations.push(Violation::RootNotOlt { kind: self.kind(self.root()) });
        }
        if self.children(self.root()).len() != 1 {
            violations.push(Violation::RootFanOut { children: self.children(self.root()).len() });
        }

        for node in &self.nodes {
            // Disconnected or cyclic parent chains.
            if self.depth(node.id).is_none() {
                violations.push(Violation::Unrooted { id: node.id });
            }
            match node.kind {
                NodeKind::Onu { .. } if !self.is_leaf(node.id) => {
                    violations.push(Violation::InteriorOnu { id: node.id });
                }
                NodeKind::PassiveRn | NodeKind::ActiveRn if self.is_leaf(node.id) => {
                    violations.push(Violation::LeafRn { id: node.id });
                }
                NodeKind::Olt if node.id != self.root() => {
                    violations.push(Violation::ExtraOlt { id: node.id });
                }
                _ => {}
            }
        }

        for fiber in &self.fibers {
            let expected =
                FiberRole::for_endpoints(self.kind(fiber.parent), self.kind(fiber.child));
            if expected != Some(fiber.role) {
                violations.push(Violation::FiberRole {
                    child: fiber.child,
                    parent: fiber.parent,
                    expected,
                    actual: fiber.role,
                });
            }
        }

        ValidationReport { violations }
    }
}

/// Outcome of [`PonTree::validate`]; violations are data, not faults.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `|fibers|` must equal `|nodes| - 1`.
    NotATree { nodes: usize, fibers: usize },
    /// The set of parentless nodes must be exactly `{0}`.
    RootSet { roots: Vec<NodeId> },
    RootNotOlt { kind: NodeKind },
    /// The OLT must have exactly one child, the first-stage RN.
    RootFanOut { children: usize },
    /// Parent chain never reaches the root (cycle or orphan).
    Unrooted { id: NodeId },
    InteriorOnu { id: NodeId },
    LeafRn { id: NodeId },
    ExtraOlt { id: NodeId },
    FiberRole { child: NodeId, parent: NodeId, expected: Option<FiberRole>, actual: FiberRole },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree { nodes, fibers } => {
                write!(f, "not a tree: {nodes} nodes but {fibers} fibers")
            }
            Violation::RootSet { roots } => {
                write!(f, "root set: parentless nodes are {roots:?}, expected exactly node 0")
            }
            Violation::RootNotOlt { kind } => write!(f, "root is {kind}, not an OLT"),
            Violation::RootFanOut { children } => {
                write!(f, "root fan-out: OLT has {children} children, expected 1")
            }
            Violation::Unrooted { id } => write!(f, "node {id} is not connected to the root"),
            Violation::InteriorOnu { id } => write!(f, "ONU {id} has children"),
            Violation::LeafRn { id } => write!(f, "RN {id} is a leaf"),
            Violation::ExtraOlt { id } => write!(f, "extra OLT at node {id}"),
            Violation::FiberRole { child, parent, expected, actual } => match expected {
                Some(role) => write!(
                    f,
                    "fiber role: {parent}->{child} labeled {actual}, endpoints imply {role}"
                ),
                None => write!(f, "fiber role: {parent}->{child} connects invalid endpoint kinds"),
            },
        }
    }
}

/// Incremental construction of a [`PonTree`] with availabilities and fiber
/// roles filled in from the table. Does not validate; callers that assemble
/// unusual shapes should run [`PonTree::validate`].
#[derive(Debug)]
pub struct TreeBuilder {
    table: AvailabilityTable,
    nodes: Vec<Node>,
    fibers: Vec<Fiber>,
}

impl TreeBuilder {
    /// Starts a tree with the OLT as node 0.
    pub fn new(table: &AvailabilityTable) -> Self {
        let olt = Node {
            id: NodeId::ROOT,
            kind: NodeKind::Olt,
            availability: table.component_availability(NodeKind::Olt),
        };
        Self { table: table.clone(), nodes: vec![olt], fibers: Vec::new() }
    }

    fn add_node(&mut self, parent: NodeId, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            kind,
            availability: self.table.component_availability(kind),
        });
        let role = FiberRole::for_endpoints(self.nodes[parent.index()].kind, kind)
            .expect("builder connects only valid endpoint kinds");
        self.fibers.push(Fiber {
            child: id,
            parent,
            role,
            availability: self.table.fiber_availability(role),
        });
        id
    }

    pub fn add_rn(&mut self, parent: NodeId, kind: RnKind) -> NodeId {
        self.add_node(parent, kind.into())
    }

    pub fn add_onu(&mut self, parent: NodeId, ic: bool) -> NodeId {
        self.add_node(parent, NodeKind::Onu { ic })
    }

    pub fn build(self) -> PonTree {
        PonTree::from_parts(self.nodes, self.fibers)
            .expect("builder output is always representable")
    }
}

pub mod json {
    //! JSON wire format for topologies.
    //!
    //! ```json
    //! {"nodes":[{"kind":"olt","id":0},{"kind":"prn","id":1},{"kind":"onu","id":2,"ic":true}],
    //!  "fibers":[{"child":1,"parent":0,"role":"feeder"},{"child":2,"parent":1,"role":"lastmile"}]}
    //! ```
    //!
    //! Availabilities are not serialized; they are re-derived from an
    //! [`AvailabilityTable`] when the document is loaded.

    use serde::{Deserialize, Serialize};

    use super::{AvailabilityTable, Fiber, FiberRole, Node, NodeId, NodeKind, PonTree};
    use crate::Result;

    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct TopologyDoc {
        pub nodes: Vec<NodeDoc>,
        pub fibers: Vec<FiberDoc>,
    }

    #[derive(Debug, Clone, Serialize, Deserialize)]
    #[serde(tag = "kind", rename_all = "lowercase")]
    pub enum NodeDoc {
        Olt { id: u32 },
        Prn { id: u32 },
        Arn { id: u32 },
        Onu { id: u32, #[serde(default)] ic: bool },
    }

    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct FiberDoc {
        pub child: u32,
        pub parent: u32,
        pub role: RoleDoc,
    }

    #[derive(Debug, Clone, Copy, Serialize, Deserialize)]
    #[serde(rename_all = "lowercase")]
    pub enum RoleDoc {
        Feeder,
        Distribution,
        LastMile,
    }

    impl From<RoleDoc> for FiberRole {
        fn from(role: RoleDoc) -> Self {
            match role {
                RoleDoc::Feeder => FiberRole::Feeder,
                RoleDoc::Distribution => FiberRole::Distribution,
                RoleDoc::LastMile => FiberRole::LastMile,
            }
        }
    }

    impl From<FiberRole> for RoleDoc {
        fn from(role: FiberRole) -> Self {
            match role {
                FiberRole::Feeder => RoleDoc::Feeder,
                FiberRole::Distribution => RoleDoc::Distribution,
                FiberRole::LastMile => RoleDoc::LastMile,
            }
        }
    }

    /// Serializable view of a tree.
    pub fn to_document(tree: &PonTree) -> TopologyDoc {
        let nodes = tree
            .nodes()
            .iter()
            .map(|n| match n.kind {
                NodeKind::Olt => NodeDoc::Olt { id: n.id.value() },
                NodeKind::PassiveRn => NodeDoc::Prn { id: n.id.value() },
                NodeKind::ActiveRn => NodeDoc::Arn { id: n.id.value() },
                NodeKind::Onu { ic } => NodeDoc::Onu { id: n.id.value(), ic },
            })
            .collect();
        let fibers = tree
            .fibers()
            .iter()
            .map(|f| FiberDoc {
                child: f.child.value(),
                parent: f.parent.value(),
                role: f.role.into(),
            })
            .collect();
        TopologyDoc { nodes, fibers }
    }

    /// Rebuilds a tree from a document, deriving every availability from `table`.
    pub fn from_document(doc: &TopologyDoc, table: &AvailabilityTable) -> Result<PonTree> {
        let nodes = doc
            .nodes
            .iter()
            .map(|n| {
                let (id, kind) = match *n {
                    NodeDoc::Olt { id } => (id, NodeKind::Olt),
                    NodeDoc::Prn { id } => (id, NodeKind::PassiveRn),
                    NodeDoc::Arn { id } => (id, NodeKind::ActiveRn),
                    NodeDoc::Onu { id, ic } => (id, NodeKind::Onu { ic }),
                };
                Node {
                    id: NodeId::from(id),
                    kind,
                    availability: table.component_availability(kind),
                }
            })
            .collect();
        let fibers = doc
            .fibers
            .iter()
            .map(|f| {
                let role: FiberRole = f.role.into();
                Fiber {
                    child: NodeId::from(f.child),
                    parent: NodeId::from(f.parent),
                    role,
                    availability: table.fiber_availability(role),
                }
            })
            .collect();
        PonTree::from_parts(nodes, fibers)
    }

    /// Pretty-printed topology JSON, newline-terminated.
    pub fn to_pretty_string(tree: &PonTree) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&to_document(tree))?;
        text.push('\n');
        Ok(text)
    }

    /// Writes the topology JSON to a file.
    pub fn save(tree: &PonTree, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, to_pretty_string(tree)?)?;
        Ok(())
    }

    /// Loads a topology JSON file, re-deriving availabilities from `table`.
    pub fn load(path: &std::path::Path, table: &AvailabilityTable) -> Result<PonTree> {
        let text = std::fs::read_to_string(path)?;
        let doc: TopologyDoc = serde_json::from_str(&text)?;
        from_document(&doc, table)
    }
}
