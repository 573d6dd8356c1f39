//! Closed-form expectations used to cross-check the generator and the
//! Monte Carlo pipeline.

use crate::model::{AvailabilityTable, RnKind};
use crate::{Error, Result};

/// Expected ONU counts per stage for splitting ratio `g` and branch
/// probability `s`: `n1 = g(1-s)`, `n2 = g*s*g*(1-s)`, `n3 = g*s*g*s*g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageCounts {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl StageCounts {
    pub fn total(&self) -> f64 {
        self.n1 + self.n2 + self.n3
    }
}

fn check_params(g: u32, s: f64) -> Result<()> {
    if g < 2 {
        return Err(Error::InvalidParams(format!("g={g} must be at least 2")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParams(format!("s={s} outside [0, 1]")));
    }
    Ok(())
}

/// Mean number of ONUs of a three-stage network: `g(1 - s + gs(1 - s + gs))`.
pub fn expected_onu_count(g: u32, s: f64) -> Result<f64> {
    check_params(g, s)?;
    let g = g as f64;
    Ok(g * (1.0 - s + g * s * (1.0 - s + g * s)))
}

pub fn expected_stage_counts(g: u32, s: f64) -> Result<StageCounts> {
    check_params(g, s)?;
    let g = g as f64;
    Ok(StageCounts {
        n1: g * (1.0 - s),
        n2: g * s * g * (1.0 - s),
        n3: g * s * g * s * g,
    })
}

/// Mean ONU service availability of a network population without any
/// IC-capable ONUs, with RN kinds fixed per stage.
///
/// With no IC, every ONU's availability is the plain series product along its
/// path to the OLT; the population mean weights the three stage products by
/// the expected stage counts.
pub fn mean_sa_no_ic(
    table: &AvailabilityTable,
    g: u32,
    s: f64,
    rn_kinds: [RnKind; 3],
) -> Result<f64> {
    table.validate()?;
    let counts = expected_stage_counts(g, s)?;
    let rn = |kind: RnKind| match kind {
        RnKind::Passive => table.passive_rn,
        RnKind::Active => table.active_rn,
    };
    // Series product for an ONU at stage d: OLT, feeder, the d RNs, d-1
    // distribution fibers, last-mile fiber, ONU.
    let mut products = [0.0_f64; 3];
    let mut upstream = table.olt * table.feeder_fiber;
    for stage in 0..3 {
        if stage > 0 {
            upstream *= table.distribution_fiber;
        }
        upstream *= rn(rn_kinds[stage]);
        products[stage] = upstream * table.last_mile_fiber * table.onu;
    }
    let weighted =
        counts.n1 * products[0] + counts.n2 * products[1] + counts.n3 * products[2];
    Ok(weighted / counts.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn onu_count_matches_reported_value() {
        assert_abs_diff_eq!(expected_onu_count(32, 0.3).unwrap(), 3186.56, epsilon = 1e-9);
        assert_abs_diff_eq!(expected_onu_count(32, 0.0).unwrap(), 32.0, epsilon = 0.0);
        assert_abs_diff_eq!(expected_onu_count(32, 1.0).unwrap(), 32768.0, epsilon = 0.0);
    }

    #[test]
    fn stage_counts_expand_the_total() {
        let counts = expected_stage_counts(32, 0.3).unwrap();
        assert_abs_diff_eq!(counts.n1, 22.4, epsilon = 1e-9);
        assert_abs_diff_eq!(counts.n2, 215.04, epsilon = 1e-9);
        assert_abs_diff_eq!(counts.n3, 2949.12, epsilon = 1e-9);
        assert_abs_diff_eq!(
            counts.total(),
            expected_onu_count(32, 0.3).unwrap(),
            epsilon = 1e-12
        );

        let edge = expected_stage_counts(32, 0.0).unwrap();
        assert_eq!((edge.n1, edge.n2, edge.n3), (32.0, 0.0, 0.0));
        let deep = expected_stage_counts(32, 1.0).unwrap();
        assert_eq!((deep.n1, deep.n2, deep.n3), (0.0, 0.0, 32768.0));
    }

    #[test]
    fn stage_identity_holds_across_params() {
        for g in [2, 5, 16, 32, 64] {
            for i in 0..=10 {
                let s = i as f64 / 10.0;
                let counts = expected_stage_counts(g, s).unwrap();
                assert_relative_eq!(
                    counts.total(),
                    expected_onu_count(g, s).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn no_ic_means_match_reported_values() {
        let table = AvailabilityTable::default();
        let traditional =
            mean_sa_no_ic(&table, 32, 0.3, [RnKind::Passive; 3]).unwrap();
        assert_abs_diff_eq!(traditional, 0.99897, epsilon = 5e-5);

        let first = mean_sa_no_ic(
            &table,
            32,
            0.3,
            [RnKind::Passive, RnKind::Active, RnKind::Passive],
        )
        .unwrap();
        assert_abs_diff_eq!(first, 0.998921, epsilon = 5e-5);
        assert!(first < traditional);
    }

    #[test]
    fn perfect_components_give_unit_availability() {
        let table = AvailabilityTable {
            olt: 1.0,
            onu: 1.0,
            passive_rn: 1.0,
            active_rn: 1.0,
            fiber_per_km: 1.0,
            feeder_fiber: 1.0,
            distribution_fiber: 1.0,
            last_mile_fiber: 1.0,
        };
        let sa = mean_sa_no_ic(&table, 32, 0.3, [RnKind::Passive; 3]).unwrap();
        assert_eq!(sa, 1.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(expected_onu_count(1, 0.3).is_err());
        assert!(expected_onu_count(32, -0.1).is_err());
        assert!(expected_stage_counts(32, 1.1).is_err());
    }
}
