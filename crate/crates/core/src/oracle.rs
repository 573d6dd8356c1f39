//! Brute-force availability via exhaustive enumeration of component states.
//!
//! Ground truth for the engine on small networks: sum, over all up/down
//! assignments to every node and fiber, of the assignment probability times
//! the has-service indicator. The indicator enumerates candidate service
//! walks directly from the turnaround rule — a walk climbs from the ONU to a
//! node that can divert traffic back downstream (the OLT or an active RN) and
//! descends to a service source, with components traversed twice counted
//! once — and is therefore independent of the engine's series/parallel
//! decomposition.
//!
//! Not intended for paper-scale networks; the state space is
//! `2^(nodes + fibers)`.

use crate::model::{AvailabilityTable, NodeId, NodeKind, PonTree};
use crate::{Error, Result};

/// Default bound on `nodes + fibers` for exhaustive enumeration.
pub const DEFAULT_COMPONENT_LIMIT: usize = 24;

/// Hard cap: masks are `u64` and runtimes explode long before this.
pub const MAX_COMPONENT_LIMIT: usize = 32;

/// Up/down assignment to every component of a tree.
///
/// Component `k` is node `k` for `k < nodes`, otherwise fiber
/// `k - nodes` in [`PonTree::fibers`] order; bit set means up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentState {
    bits: u64,
}

impl ComponentState {
    pub fn from_bits(bits: u64) -> Self {
        Self { bits }
    }

    pub fn all_up(tree: &PonTree) -> Self {
        Self { bits: mask_all(tree.component_count()) }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn node_up(self, id: NodeId) -> bool {
        self.bits & (1 << id.index()) != 0
    }

    pub fn fiber_up(self, tree: &PonTree, fiber_index: usize) -> bool {
        self.bits & (1 << (tree.node_count() + fiber_index)) != 0
    }

    pub fn with_node_down(self, id: NodeId) -> Self {
        Self { bits: self.bits & !(1 << id.index()) }
    }

    pub fn with_fiber_down(self, tree: &PonTree, child: NodeId) -> Self {
        let index = tree
            .fibers()
            .iter()
            .position(|f| f.child == child)
            .expect("child has an upstream fiber");
        Self { bits: self.bits & !(1 << (tree.node_count() + index)) }
    }
}

fn mask_all(components: usize) -> u64 {
    if components >= 64 {
        u64::MAX
    } else {
        (1u64 << components) - 1
    }
}

fn node_bit(id: NodeId) -> u64 {
    1 << id.index()
}

fn upstream_fiber_bit(tree: &PonTree, id: NodeId) -> u64 {
    let index = tree
        .fibers()
        .iter()
        .position(|f| f.child == id)
        .expect("non-root node has an upstream fiber");
    1 << (tree.node_count() + index)
}

/// Components (nodes and fibers, endpoints inclusive) of the walk that climbs
/// from `low` to its ancestor `top`.
fn climb_mask(tree: &PonTree, low: NodeId, top: NodeId) -> u64 {
    let mut mask = node_bit(top);
    let mut v = low;
    while v != top {
        mask |= node_bit(v) | upstream_fiber_bit(tree, v);
        v = tree.parent(v).expect("top is an ancestor of low");
    }
    mask
}

fn ancestors_inclusive(tree: &PonTree, id: NodeId) -> Vec<NodeId> {
    let mut chain = vec![id];
    let mut v = id;
    while let Some(up) = tree.parent(v) {
        chain.push(up);
        v = up;
    }
    chain
}

/// Component masks of every candidate service walk for `onu`: for each
/// service source `S` (the OLT and every IC-ONU) and each turnaround-capable
/// node `T` that is an ancestor of both, the union of the paths `onu..T` and
/// `S..T`. Supersets of other masks are dropped; they can never matter.
fn service_walk_masks(tree: &PonTree, onu: NodeId) -> Vec<u64> {
    let onu_chain = ancestors_inclusive(tree, onu);
    let mut masks: Vec<u64> = Vec::new();

    let mut sources: Vec<NodeId> = vec![tree.root()];
    sources.extend(tree.onus().filter(|&o| matches!(tree.kind(o), NodeKind::Onu { ic: true })));

    for source in sources {
        if source == onu {
            // The target itself is a source; only its own hardware is needed.
            masks.push(node_bit(onu));
            continue;
        }
        // Lowest common ancestor of onu and source.
        let source_chain = ancestors_inclusive(tree, source);
        let lca = *source_chain
            .iter()
            .find(|v| onu_chain.contains(v))
            .expect("tree is connected");
        // Any turnaround-capable ancestor of the LCA (or the LCA itself)
        // can close the walk.
        let mut turn = lca;
        loop {
            if tree.kind(turn).can_turn_around() {
                masks.push(climb_mask(tree, onu, turn) | climb_mask(tree, source, turn));
            }
            match tree.parent(turn) {
                Some(up) => turn = up,
                None => break,
            }
        }
    }

    masks.sort_unstable();
    masks.dedup();
    let minimal: Vec<u64> = masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&other| other != m && m & other == other))
        .collect();
    minimal
}

/// Whether `onu` has service in the given component state: some service walk
/// has all of its components up.
pub fn has_service(tree: &PonTree, onu: NodeId, state: ComponentState) -> Result<bool> {
    if !tree.node(onu)?.kind.is_onu() {
        return Err(Error::NotAnOnu(onu));
    }
    Ok(service_walk_masks(tree, onu)
        .iter()
        .any(|&mask| state.bits & mask == mask))
}

/// Exhaustive availability with the default component bound and plain
/// summation.
pub fn availability(tree: &PonTree, onu: NodeId, table: &AvailabilityTable) -> Result<f64> {
    availability_within(tree, onu, table, DEFAULT_COMPONENT_LIMIT, false)
}

/// Exhaustive availability with an explicit component bound; `compensated`
/// switches the accumulator to Kahan summation for the bound's upper range.
///
/// IC-ONUs report `table.olt`, mirroring the engine's reporting rule.
pub fn availability_within(
    tree: &PonTree,
    onu: NodeId,
    table: &AvailabilityTable,
    limit: usize,
    compensated: bool,
) -> Result<f64> {
    let node = tree.node(onu)?;
    if !node.kind.is_onu() {
        return Err(Error::NotAnOnu(onu));
    }
    if let NodeKind::Onu { ic: true } = node.kind {
        return Ok(table.olt);
    }
    let components = tree.component_count();
    let limit = limit.min(MAX_COMPONENT_LIMIT);
    if components > limit {
        return Err(Error::NetworkTooLarge { components, limit });
    }

    let probabilities: Vec<f64> = tree
        .nodes()
        .iter()
        .map(|n| n.availability)
        .chain(tree.fibers().iter().map(|f| f.availability))
        .collect();
    let masks = service_walk_masks(tree, onu);

    let mut sum = Accumulator::new(compensated);
    // Depth-first over components, carrying the state probability.
    let mut stack: Vec<(usize, f64, u64)> = vec![(0, 1.0, 0)];
    while let Some((k, prob, bits)) = stack.pop() {
        if k == components {
            if masks.iter().any(|&mask| bits & mask == mask) {
                sum.add(prob);
            }
            continue;
        }
        let p = probabilities[k];
        if p < 1.0 {
            stack.push((k + 1, prob * (1.0 - p), bits));
        }
        if p > 0.0 {
            stack.push((k + 1, prob * p, bits | (1 << k)));
        }
    }
    Ok(sum.value())
}

struct Accumulator {
    sum: f64,
    correction: f64,
    compensated: bool,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Self { sum: 0.0, correction: 0.0, compensated }
    }

    fn add(&mut self, x: f64) {
        if self.compensated {
            let y = x - self.correction;
            let t = self.sum + y;
            self.correction = (t - self.sum) - y;
            self.sum = t;
        } else {
            self.sum += x;
        }
    }

    fn value(&self) -> f64 {
        self.sum
    }
}
