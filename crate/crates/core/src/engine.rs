//! Exact per-ONU service availability.
//!
//! An ONU has service if a full path of working components connects it to a
//! service source: the OLT, or any IC-capable ONU. Paths may run upstream and
//! then back downstream, but only the OLT and active RNs can turn traffic
//! around; passive RNs only pass traffic through. On a tree this yields a
//! reliability block diagram of series and parallel blocks only, evaluated by
//! the recursive function `f(c, p)` (`c` current node, `p` the node the call
//! came from):
//!
//! 1. initial call at the target ONU: `a_c * a_fiber * f(parent, c)`;
//! 2. a non-IC ONU reached from elsewhere offers nothing: `0`;
//! 3. the OLT or an IC-ONU offers service: `a_c`;
//! 4. an active RN, or a passive RN entered from upstream, reaches its other
//!    neighbors in parallel: `a_c * (1 - prod_i (1 - a_fiber_i * f(i, c)))`;
//! 5. a passive RN entered from downstream: every service path must first
//!    climb the chain of passive RNs up to and including the first node able
//!    to turn traffic around. That shared path is charged exactly once
//!    (availability `h`), with the parallel non-shared branches `d_v` forking
//!    off it: `h * (1 - prod_v (1 - d_v))`.
//!
//! The reported availability of an IC-capable ONU itself equals the OLT
//! availability, since it can fall back on the other operator.
//!
//! [`service_availability`] implements the recursion literally, one ONU at a
//! time. [`per_onu_service_availability`] computes the same values for all
//! ONUs in two linear passes (downward subtree values, then upward rerooting
//! with per-segment shared-path accumulators); the sweeps rely on it.
//!
//! Both evaluators require a tree that passes [`PonTree::validate`];
//! malformed topologies may panic.

use crate::model::{AvailabilityTable, NodeId, NodeKind, PonTree};
use crate::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Service availability of one ONU. IC-ONUs report the OLT availability;
/// non-IC ONUs are evaluated with the recursive decomposition.
pub fn service_availability(tree: &PonTree, onu: NodeId, table: &AvailabilityTable) -> Result<f64> {
    let node = tree.node(onu)?;
    match node.kind {
        NodeKind::Onu { ic: true } => Ok(table.olt),
        NodeKind::Onu { ic: false } => {
            let fiber = tree
                .upstream_fiber(onu)
                .expect("validated tree: every ONU has an upstream fiber");
            Ok(node.availability * fiber.availability * recurse(tree, fiber.parent, onu))
        }
        _ => Err(Error::NotAnOnu(onu)),
    }
}

/// `f(c, p)` for `p != null`.
fn recurse(tree: &PonTree, c: NodeId, from: NodeId) -> f64 {
    match tree.kind(c) {
        NodeKind::Onu { ic: false } => 0.0,
        NodeKind::Onu { ic: true } | NodeKind::Olt => tree.availability(c),
        NodeKind::ActiveRn => fan_out(tree, c, from),
        NodeKind::PassiveRn => {
            if tree.parent(c) == Some(from) {
                fan_out(tree, c, from)
            } else {
                walk_segment(tree, c, from).evaluate()
            }
        }
    }
}

/// Case 4: reach all neighbors of `c` except `exclude` in parallel.
fn fan_out(tree: &PonTree, c: NodeId, exclude: NodeId) -> f64 {
    let mut miss = 1.0;
    for &child in tree.children(c) {
        if child != exclude {
            let fiber = tree.upstream_fiber(child).expect("child has upstream fiber");
            miss *= 1.0 - fiber.availability * recurse(tree, child, c);
        }
    }
    if let Some(fiber) = tree.upstream_fiber(c) {
        if fiber.parent != exclude {
            miss *= 1.0 - fiber.availability * recurse(tree, fiber.parent, c);
        }
    }
    tree.availability(c) * (1.0 - miss)
}

/// One parallel non-shared path forking off a shared segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Segment node (or apex) the path forks from.
    pub fork: NodeId,
    /// First node on the non-shared path.
    pub via: NodeId,
    /// Availability `d` of the non-shared path.
    pub availability: f64,
}

/// Decomposition behind case 5: the chain of passive RNs from the entry RN
/// up to and including the first node that can turn traffic around (`apex`),
/// with the shared-path availability `h` and the branch availabilities `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedSegment {
    /// Passive RNs from the entry RN upward, in walk order.
    pub segment: Vec<NodeId>,
    /// First upstream node able to turn traffic around: an active RN or the OLT.
    pub apex: NodeId,
    /// Product of all segment RN availabilities, the fibers between
    /// consecutive segment members and up to the apex, and the apex itself.
    pub shared_availability: f64,
    /// Parallel non-shared paths forking off segment members and the apex.
    pub branches: Vec<Branch>,
    olt_apex: bool,
}

impl SharedSegment {
    /// Case-5 value. When the apex is the OLT the shared path already ends
    /// at a service source, so the value collapses to `h`.
    pub fn evaluate(&self) -> f64 {
        if self.olt_apex {
            return self.shared_availability;
        }
        let miss: f64 = self.branches.iter().map(|b| 1.0 - b.availability).product();
        self.shared_availability * (1.0 - miss)
    }
}

/// Shared-path decomposition for a passive RN entered from the downstream
/// neighbor `came_from`.
pub fn shared_segment(tree: &PonTree, entry_rn: NodeId, came_from: NodeId) -> Result<SharedSegment> {
    if tree.node(entry_rn)?.kind != NodeKind::PassiveRn {
        return Err(Error::InvalidParams(format!("node {entry_rn} is not a passive RN")));
    }
    tree.node(came_from)?;
    let downstream_neighbor = tree.children(entry_rn).contains(&came_from);
    if !downstream_neighbor {
        return Err(Error::InvalidParams(format!(
            "node {came_from} is not a downstream neighbor of {entry_rn}"
        )));
    }
    Ok(walk_segment(tree, entry_rn, came_from))
}

fn walk_segment(tree: &PonTree, entry_rn: NodeId, came_from: NodeId) -> SharedSegment {
    let mut segment = Vec::new();
    let mut branches = Vec::new();
    let mut h = 1.0;
    let mut current = entry_rn;
    let mut arrived_from = came_from;
    loop {
        segment.push(current);
        h *= tree.availability(current);
        for &child in tree.children(current) {
            if child != arrived_from {
                let fiber = tree.upstream_fiber(child).expect("child has upstream fiber");
                branches.push(Branch {
                    fork: current,
                    via: child,
                    availability: fiber.availability * recurse(tree, child, current),
                });
            }
        }
        let fiber = tree
            .upstream_fiber(current)
            .expect("validated tree: passive RN has an upstream fiber");
        h *= fiber.availability;
        let up = fiber.parent;
        match tree.kind(up) {
            NodeKind::Olt => {
                h *= tree.availability(up);
                return SharedSegment {
                    segment,
                    apex: up,
                    shared_availability: h,
                    branches,
                    olt_apex: true,
                };
            }
            NodeKind::ActiveRn => {
                h *= tree.availability(up);
                for &child in tree.children(up) {
                    if child != current {
                        let child_fiber =
                            tree.upstream_fiber(child).expect("child has upstream fiber");
                        branches.push(Branch {
                            fork: up,
                            via: child,
                            availability: child_fiber.availability * recurse(tree, child, up),
                        });
                    }
                }
                if let Some(apex_fiber) = tree.upstream_fiber(up) {
                    branches.push(Branch {
                        fork: up,
                        via: apex_fiber.parent,
                        availability: apex_fiber.availability
                            * recurse(tree, apex_fiber.parent, up),
                    });
                }
                return SharedSegment {
                    segment,
                    apex: up,
                    shared_availability: h,
                    branches,
                    olt_apex: false,
                };
            }
            NodeKind::PassiveRn => {
                arrived_from = current;
                current = up;
            }
            NodeKind::Onu { .. } => {
                unreachable!("validated tree: an ONU cannot be a parent")
            }
        }
    }
}

/// Service availability of every ONU, in node-id order.
///
/// Two linear passes over the tree: a post-order pass computes the downward
/// value `down(v) = f(v, parent(v))` of every subtree, then a pre-order pass
/// computes the upward value `up(v) = f(parent(v), v)`, carrying per-segment
/// shared-path accumulators so that case 5 stays O(1) per node. Matches
/// [`service_availability`] to floating-point rounding.
pub fn per_onu_service_availability(
    tree: &PonTree,
    table: &AvailabilityTable,
) -> Result<Vec<(NodeId, f64)>> {
    let n = tree.node_count();
    let root = tree.root();

    let mut order = Vec::with_capacity(n);
    order.push(root);
    let mut i = 0;
    while i < order.len() {
        order.extend_from_slice(tree.children(order[i]));
        i += 1;
    }
    if order.len() != n {
        return Err(Error::InvalidTopology(
            "tree is not connected; run validate() for details".into(),
        ));
    }

    let fiber_avail = |v: NodeId| tree.upstream_fiber(v).map_or(1.0, |f| f.availability);

    // Downward pass: value of each node when entered from its parent.
    let mut down = vec![0.0_f64; n];
    for &v in order.iter().rev() {
        down[v.index()] = match tree.kind(v) {
            NodeKind::Onu { ic } => {
                if ic {
                    tree.availability(v)
                } else {
                    0.0
                }
            }
            NodeKind::Olt => 0.0, // never entered from upstream
            NodeKind::PassiveRn | NodeKind::ActiveRn => {
                let mut miss = 1.0;
                for &c in tree.children(v) {
                    miss *= 1.0 - fiber_avail(c) * down[c.index()];
                }
                tree.availability(v) * (1.0 - miss)
            }
        };
    }

    // Upward pass. For each passive RN v entered from below, seg_h[v] is the
    // shared-path availability from v up to and including the apex, and
    // seg_tail[v] the miss-product of all branches forking above v
    // (0 when the apex is the OLT, which is itself a source).
    let mut up = vec![0.0_f64; n];
    let mut seg_h = vec![0.0_f64; n];
    let mut seg_tail = vec![0.0_f64; n];
    let mut excl: Vec<f64> = Vec::new();
    for &p in &order {
        let kids = tree.children(p);
        if kids.is_empty() {
            continue;
        }
        // excl[i] = product of (1 - fa*down) over all children but the i-th.
        excl.clear();
        excl.resize(kids.len(), 1.0);
        let mut acc = 1.0;
        for (i, &c) in kids.iter().enumerate() {
            excl[i] = acc;
            acc *= 1.0 - fiber_avail(c) * down[c.index()];
        }
        acc = 1.0;
        for (i, &c) in kids.iter().enumerate().rev() {
            excl[i] *= acc;
            acc *= 1.0 - fiber_avail(c) * down[c.index()];
        }

        let a_p = tree.availability(p);
        match tree.kind(p) {
            NodeKind::Olt => {
                for (i, &c) in kids.iter().enumerate() {
                    let _ = i;
                    up[c.index()] = a_p;
                    if tree.kind(c) == NodeKind::PassiveRn {
                        seg_h[c.index()] = tree.availability(c) * fiber_avail(c) * a_p;
                        seg_tail[c.index()] = 0.0;
                    }
                }
            }
            NodeKind::ActiveRn => {
                let miss_upward = 1.0 - fiber_avail(p) * up[p.index()];
                for (i, &c) in kids.iter().enumerate() {
                    let miss = miss_upward * excl[i];
                    up[c.index()] = a_p * (1.0 - miss);
                    if tree.kind(c) == NodeKind::PassiveRn {
                        seg_h[c.index()] = tree.availability(c) * fiber_avail(c) * a_p;
                        seg_tail[c.index()] = miss;
                    }
                }
            }
            NodeKind::PassiveRn => {
                let (h, tail) = (seg_h[p.index()], seg_tail[p.index()]);
                for (i, &c) in kids.iter().enumerate() {
                    up[c.index()] = h * (1.0 - excl[i] * tail);
                    if tree.kind(c) == NodeKind::PassiveRn {
                        seg_h[c.index()] = tree.availability(c) * fiber_avail(c) * h;
                        seg_tail[c.index()] = excl[i] * tail;
                    }
                }
            }
            NodeKind::Onu { .. } => {
                return Err(Error::InvalidTopology(format!("ONU {p} has children")))
            }
        }
    }

    Ok(tree
        .onus()
        .map(|onu| {
            let sa = match tree.kind(onu) {
                NodeKind::Onu { ic: true } => table.olt,
                _ => tree.availability(onu) * fiber_avail(onu) * up[onu.index()],
            };
            (onu, sa)
        })
        .collect())
}

/// Arithmetic mean of the service availabilities of all ONUs.
pub fn mean_onu_availability(tree: &PonTree, table: &AvailabilityTable) -> Result<f64> {
    let per_onu = per_onu_service_availability(tree, table)?;
    if per_onu.is_empty() {
        return Err(Error::NoOnus);
    }
    Ok(per_onu.iter().map(|(_, sa)| sa).sum::<f64>() / per_onu.len() as f64)
}

/// Hours of downtime per year implied by a steady-state availability.
pub fn annual_downtime_hours(availability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&availability) {
        return Err(Error::InvalidParams(format!(
            "availability {availability} outside [0, 1]"
        )));
    }
    Ok((1.0 - availability) * HOURS_PER_YEAR)
}
