//! Random synthesis of three-stage PON topologies.
//!
//! A network is grown from the OLT: one feeder fiber to the single
//! first-stage RN, whose `g` outputs each continue to a deeper RN with
//! probability `s` or terminate at an ONU; third-stage outputs always
//! terminate at ONUs. Each ONU is IC-capable with probability `r`,
//! independently.
//!
//! # Reproducibility
//!
//! All draws come from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64(params.seed)`. Two independent streams of the same seed are
//! used:
//!
//! - stream 0 drives the structure: outputs of an RN are processed left to
//!   right, each drawing first the branch-continues uniform (stages 1 and 2
//!   only) and then, for an ONU, the IC uniform; a branch's subtree is
//!   completed depth-first before the next output;
//! - stream 1 drives RN types in the second scenario, one uniform per RN in
//!   creation order.
//!
//! A Bernoulli(p) outcome is `u < p` with `u` uniform in [0, 1). Keeping RN
//! types on their own stream makes the three scenarios structurally identical
//! for the same seed, and makes the second scenario with `q = 0` equal to the
//! traditional network, types included.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{AvailabilityTable, NodeId, NodeKind, PonTree, RnKind, TreeBuilder};
use crate::{Error, Result};

/// How remote-node types are assigned.
///
/// - `First`: fixed by stage — passive, active, passive.
/// - `Second`: each RN is active with probability `q`, independently.
/// - `Traditional`: every RN is passive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    First,
    Second,
    Traditional,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::First => "first",
            Scenario::Second => "second",
            Scenario::Traditional => "traditional",
        }
    }
}

/// Parameters of one random network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    /// Splitting ratio 1:g of every RN.
    pub g: u32,
    /// Probability that a stage-1 or stage-2 output continues to another RN.
    pub s: f64,
    /// Probability that an ONU is IC-capable.
    pub r: f64,
    /// Probability that an RN is active (second scenario only).
    pub q: f64,
    pub scenario: Scenario,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self { g: 32, s: 0.3, r: 0.0, q: 0.0, scenario: Scenario::First, seed: 0 }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.g < 2 {
            return Err(Error::InvalidParams(format!("g={} must be at least 2", self.g)));
        }
        for (name, p) in [("s", self.s), ("r", self.r), ("q", self.q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("{name}={p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

const STRUCTURE_STREAM: u64 = 0;
const RN_TYPE_STREAM: u64 = 1;

struct Growth<'a> {
    params: &'a GeneratorParams,
    structure: ChaCha8Rng,
    rn_types: ChaCha8Rng,
    builder: TreeBuilder,
}

impl Growth<'_> {
    fn rn_kind(&mut self, stage: u8) -> RnKind {
        match self.params.scenario {
            Scenario::First => {
                if stage == 2 {
                    RnKind::Active
                } else {
                    RnKind::Passive
                }
            }
            Scenario::Traditional => RnKind::Passive,
            Scenario::Second => {
                if self.rn_types.random::<f64>() < self.params.q {
                    RnKind::Active
                } else {
                    RnKind::Passive
                }
            }
        }
    }

    fn grow_rn(&mut self, parent: NodeId, stage: u8) {
        let kind = self.rn_kind(stage);
        let rn = self.builder.add_rn(parent, kind);
        for _ in 0..self.params.g {
            let deeper = stage < 3 && self.structure.random::<f64>() < self.params.s;
            if deeper {
                self.grow_rn(rn, stage + 1);
            } else {
                let ic = self.structure.random::<f64>() < self.params.r;
                self.builder.add_onu(rn, ic);
            }
        }
    }
}

/// Generates one random network. Identical params (seed included) yield an
/// identical tree.
pub fn generate(params: &GeneratorParams, table: &AvailabilityTable) -> Result<PonTree> {
    params.validate()?;
    table.validate()?;
    let mut structure = ChaCha8Rng::seed_from_u64(params.seed);
    structure.set_stream(STRUCTURE_STREAM);
    let mut rn_types = ChaCha8Rng::seed_from_u64(params.seed);
    rn_types.set_stream(RN_TYPE_STREAM);
    let mut growth =
        Growth { params, structure, rn_types, builder: TreeBuilder::new(table) };
    growth.grow_rn(NodeId::ROOT, 1);
    Ok(growth.builder.build())
}

/// ONU counts of a tree, split by IC capability and by stage (the number of
/// RNs on the ONU's upstream path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnuCensus {
    pub total: usize,
    pub ic: usize,
    pub nic: usize,
    /// `per_stage[d - 1]` counts ONUs at stage `d`.
    pub per_stage: Vec<usize>,
}

pub fn onu_census(tree: &PonTree) -> OnuCensus {
    let mut census = OnuCensus { total: 0, ic: 0, nic: 0, per_stage: Vec::new() };
    for onu in tree.onus() {
        census.total += 1;
        match tree.kind(onu) {
            NodeKind::Onu { ic: true } => census.ic += 1,
            _ => census.nic += 1,
        }
        // Stage = RNs between the ONU and the OLT = depth - 1.
        if let Some(depth) = tree.depth(onu) {
            let stage = depth.saturating_sub(1);
            if stage > 0 {
                if census.per_stage.len() < stage {
                    census.per_stage.resize(stage, 0);
                }
                census.per_stage[stage - 1] += 1;
            }
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn table() -> AvailabilityTable {
        AvailabilityTable::default()
    }

    #[test]
    fn s_zero_yields_single_stage() {
        let params = GeneratorParams { s: 0.0, seed: 9, ..Default::default() };
        let tree = generate(&params, &table()).unwrap();
        let census = onu_census(&tree);
        assert_eq!(census.total, 32);
        assert_eq!(census.per_stage, vec![32]);
        assert_eq!(tree.node_count(), 34); // OLT + RN + 32 ONUs
        assert!(tree.validate().is_valid());
    }

    #[test]
    fn s_one_yields_full_depth() {
        let params = GeneratorParams { s: 1.0, r: 0.0, seed: 3, ..Default::default() };
        let tree = generate(&params, &table()).unwrap();
        let census = onu_census(&tree);
        assert_eq!(census.total, 32 * 32 * 32);
        assert_eq!(census.nic, census.total);
        assert_eq!(census.per_stage, vec![0, 0, 32768]);
        assert!(tree.validate().is_valid());
    }

    #[test]
    fn all_ic_when_r_is_one() {
        let params = GeneratorParams { r: 1.0, seed: 5, ..Default::default() };
        let census = onu_census(&generate(&params, &table()).unwrap());
        assert_eq!(census.nic, 0);
        assert_eq!(census.ic, census.total);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GeneratorParams {
            r: 0.2,
            q: 0.4,
            scenario: Scenario::Second,
            seed: 1234,
            ..Default::default()
        };
        let a = generate(&params, &table()).unwrap();
        let b = generate(&params, &table()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_trees_validate() {
        for seed in 0..20 {
            for scenario in [Scenario::First, Scenario::Second, Scenario::Traditional] {
                let params = GeneratorParams {
                    g: 8,
                    s: 0.4,
                    r: 0.1,
                    q: 0.5,
                    scenario,
                    seed,
                };
                let tree = generate(&params, &table()).unwrap();
                let report = tree.validate();
                assert!(report.is_valid(), "seed {seed}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn first_scenario_rn_kinds_follow_stages() {
        let params =
            GeneratorParams { g: 6, s: 0.5, seed: 11, ..Default::default() };
        let tree = generate(&params, &table()).unwrap();
        let mut seen_stage = [false; 3];
        for node in tree.nodes() {
            if node.kind.is_rn() {
                let stage = tree.depth(node.id).unwrap();
                seen_stage[stage - 1] = true;
                let expected = if stage == 2 { NodeKind::ActiveRn } else { NodeKind::PassiveRn };
                assert_eq!(node.kind, expected, "stage {stage}");
            }
        }
        assert!(seen_stage.iter().all(|&s| s), "tree too shallow to cover all stages");
    }

    #[test]
    fn traditional_has_no_active_rns() {
        let params = GeneratorParams {
            scenario: Scenario::Traditional,
            r: 0.3,
            seed: 21,
            ..Default::default()
        };
        let tree = generate(&params, &table()).unwrap();
        assert!(tree.nodes().iter().all(|n| n.kind != NodeKind::ActiveRn));
    }

    #[test]
    fn second_scenario_with_q_zero_matches_traditional() {
        for seed in [0, 7, 99, 4096] {
            let second = GeneratorParams {
                scenario: Scenario::Second,
                q: 0.0,
                r: 0.05,
                seed,
                ..Default::default()
            };
            let traditional =
                GeneratorParams { scenario: Scenario::Traditional, ..second };
            assert_eq!(
                generate(&second, &table()).unwrap(),
                generate(&traditional, &table()).unwrap()
            );
        }
    }

    #[test]
    fn second_scenario_shares_structure_with_first() {
        let second = GeneratorParams {
            scenario: Scenario::Second,
            q: 0.8,
            r: 0.1,
            seed: 77,
            ..Default::default()
        };
        let first = GeneratorParams { scenario: Scenario::First, ..second };
        let a = generate(&second, &table()).unwrap();
        let b = generate(&first, &table()).unwrap();
        assert_eq!(a.node_count(), b.node_count());
        for (x, y) in a.nodes().iter().zip(b.nodes()) {
            assert_eq!(x.kind.is_rn(), y.kind.is_rn());
            assert_eq!(x.kind.is_onu(), y.kind.is_onu());
        }
        assert_eq!(a.fibers(), b.fibers());
    }

    #[test]
    fn second_scenario_q_one_is_all_active() {
        let params = GeneratorParams {
            scenario: Scenario::Second,
            q: 1.0,
            seed: 15,
            ..Default::default()
        };
        let tree = generate(&params, &table()).unwrap();
        assert!(tree
            .nodes()
            .iter()
            .filter(|n| n.kind.is_rn())
            .all(|n| n.kind == NodeKind::ActiveRn));
    }

    #[test]
    fn stage_counts_match_expectation() {
        // Means over many seeds vs the closed-form stage expectations, within
        // 3 standard errors (per-network standard deviations derived from the
        // compound-binomial stage structure: 2.59, 58.6, 837).
        let m = 400;
        let mut sums = [0.0_f64; 3];
        for seed in 0..m {
            let params = GeneratorParams { seed, ..Default::default() };
            let census = onu_census(&generate(&params, &table()).unwrap());
            for (i, &count) in census.per_stage.iter().enumerate() {
                sums[i] += count as f64;
            }
        }
        let counts = analytic::expected_stage_counts(32, 0.3).unwrap();
        let expected = [counts.n1, counts.n2, counts.n3];
        let stds = [2.59, 58.6, 837.0];
        let sqrt_m = (m as f64).sqrt();
        for i in 0..3 {
            let mean = sums[i] / m as f64;
            let tolerance = 3.0 * stds[i] / sqrt_m;
            assert!(
                (mean - expected[i]).abs() < tolerance,
                "stage {}: mean {mean} vs expected {} (tolerance {tolerance})",
                i + 1,
                expected[i]
            );
        }
    }

    #[test]
    fn ic_fraction_within_binomial_bounds() {
        let m = 1000;
        let (mut ic, mut total) = (0usize, 0usize);
        for seed in 0..m {
            let params = GeneratorParams { r: 0.5, seed, ..Default::default() };
            let census = onu_census(&generate(&params, &table()).unwrap());
            ic += census.ic;
            total += census.total;
        }
        let fraction = ic as f64 / total as f64;
        let sigma = 0.5 / (total as f64).sqrt();
        assert!(
            (fraction - 0.5).abs() < 3.0 * sigma,
            "ic fraction {fraction} vs 0.5 (3 sigma = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn invalid_params_are_rejected() {
        let table = table();
        assert!(generate(&GeneratorParams { g: 1, ..Default::default() }, &table).is_err());
        assert!(generate(&GeneratorParams { s: 1.5, ..Default::default() }, &table).is_err());
        assert!(generate(&GeneratorParams { r: -0.1, ..Default::default() }, &table).is_err());
    }
}
