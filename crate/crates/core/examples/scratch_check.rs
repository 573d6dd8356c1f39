// Temporary scratch: verify headline numbers and timing before freezing tests.
use ponavail::analytic;
use ponavail::generator::{generate, onu_census, GeneratorParams, Scenario};
use ponavail::model::{AvailabilityTable, RnKind};
use ponavail::montecarlo::*;
use ponavail::seed;
use std::time::Instant;

fn main() {
    let t = AvailabilityTable::default();

    let a_trad = analytic::mean_sa_no_ic(&t, 32, 0.3, [RnKind::Passive; 3]).unwrap();
    let a_first =
        analytic::mean_sa_no_ic(&t, 32, 0.3, [RnKind::Passive, RnKind::Active, RnKind::Passive])
            .unwrap();
    println!("analytic traditional = {a_trad:.9} (target 0.99897)");
    println!("analytic first       = {a_first:.9} (target 0.998921)");

    // Empirical ONU count over 1000 networks
    let start = Instant::now();
    let mut total = 0usize;
    for i in 0..1000u64 {
        let params = GeneratorParams {
            r: 0.01,
            seed: seed::child_seed(2026, i),
            ..Default::default()
        };
        total += onu_census(&generate(&params, &t).unwrap()).total;
    }
    let mean_n = total as f64 / 1000.0;
    println!(
        "mean ONU count = {mean_n:.2} (target 3186.56, 2% = [{:.1}, {:.1}]) gen-time {:?}",
        3186.56 * 0.98,
        3186.56 * 1.02,
        start.elapsed()
    );

    for (name, scenario, r, seed) in [
        ("traditional r=0   ", Scenario::Traditional, 0.0, 2026u64),
        ("first r=0         ", Scenario::First, 0.0, 2026),
        ("first r=0.01      ", Scenario::First, 0.01, 2026),
        ("traditional r=0.01", Scenario::Traditional, 0.01, 2026),
    ] {
        let spec = PopulationSpec { scenario, r, master_seed: seed, ..Default::default() };
        let start = Instant::now();
        let stats = evaluate_population(&spec, &t).unwrap();
        println!(
            "{name} mean={:.9} std={:.3e} rse={:.3e} rse_u={:.3e}  [{:?}]",
            stats.mean,
            stats.std,
            stats.rse,
            stats.rse_unavailability(),
            start.elapsed()
        );
    }

    // Full sweep timing at n=100
    let cfg = SweepConfig::default();
    let start = Instant::now();
    let s1 = sweep_scenario1(&cfg, &t).unwrap();
    println!("sweep1 (76 pops, n=100): {:?}", start.elapsed());
    let start = Instant::now();
    let s2 = sweep_scenario2(&cfg, &t).unwrap();
    println!("sweep2 (798 pops, n=100): {:?}", start.elapsed());

    let first_r001 = s1.iter().find(|r| r.series == Series::First && r.r == 0.01).unwrap();
    let trad_r0 = s1.iter().find(|r| r.series == Series::Traditional && r.r == 0.0).unwrap();
    let first_r0 = s1.iter().find(|r| r.series == Series::First && r.r == 0.0).unwrap();
    println!("sweep first r=0.01 mean = {:.9} (target 0.999677)", first_r001.stats.mean);
    println!("sweep first r=0     mean = {:.9} (target 0.998921)", first_r0.stats.mean);
    println!("sweep trad  r=0     mean = {:.9} (target 0.99897)", trad_r0.stats.mean);
    let max_rse_s1 = s1.iter().map(|r| r.stats.rse).fold(0.0f64, f64::max);
    let max_rse_s2 = s2.iter().map(|r| r.stats.rse).fold(0.0f64, f64::max);
    let max_rseu_s1 = s1.iter().map(|r| r.stats.rse_unavailability()).fold(0.0f64, f64::max);
    let max_rseu_s2 = s2.iter().map(|r| r.stats.rse_unavailability()).fold(0.0f64, f64::max);
    println!("max rse: s1 {max_rse_s1:.3e} s2 {max_rse_s2:.3e}; unavail reading: s1 {max_rseu_s1:.3e} s2 {max_rseu_s2:.3e}");

    // Monotonicity of first series in r (should be exact under shared skeletons)
    let first: Vec<f64> =
        s1.iter().filter(|r| r.series == Series::First).map(|r| r.stats.mean).collect();
    let mono = first.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    println!("first series monotone in r: {mono}");
    let gap = first_r001.stats.mean
        - s1.iter()
            .find(|r| r.series == Series::Traditional && r.r == 0.01)
            .unwrap()
            .stats
            .mean;
    println!("first - traditional at r=0.01: {gap:.3e} (need >= 5e-4)");

    // r=0 slice monotone in q
    let r0: Vec<f64> = s2.iter().filter(|r| r.r == 0.0).map(|r| r.stats.mean).collect();
    let mono_q = r0.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    println!("r=0 slice monotone non-increasing in q: {mono_q} (q=0 {:.9} .. q=1 {:.9})", r0[0], r0[20]);
}
