//! Command-line front end: generate topologies, evaluate networks, certify
//! the engine against the exhaustive oracle, and run the population sweeps.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ponavail::engine;
use ponavail::generator::{generate, onu_census, GeneratorParams, Scenario};
use ponavail::model::{json, AvailabilityTable, NodeKind, PonTree};
use ponavail::montecarlo::{
    self, sweep_scenario1, sweep_scenario2, write_scenario1_files, write_scenario2_files,
    SweepConfig,
};
use ponavail::oracle;

#[derive(Parser)]
#[command(name = "ponavail", version, about = "PON service-availability simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random topology and emit its JSON
    Generate(GenerateArgs),
    /// Evaluate per-ONU service availability of a topology file
    Eval(EvalArgs),
    /// Compare the engine against the exhaustive oracle on a small topology
    Oracle(OracleArgs),
    /// Run the population sweeps and write plot-ready data files
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    First,
    Second,
    Traditional,
}

impl From<ScenarioArg> for Scenario {
    fn from(arg: ScenarioArg) -> Self {
        match arg {
            ScenarioArg::First => Scenario::First,
            ScenarioArg::Second => Scenario::Second,
            ScenarioArg::Traditional => Scenario::Traditional,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "first")]
    scenario: ScenarioArg,
    /// Splitting ratio 1:g
    #[arg(long, default_value_t = 32)]
    g: u32,
    /// Probability that a stage-1/2 output continues to another RN
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    /// Probability that an ONU is IC-capable
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Probability that an RN is active (second scenario)
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Availability table overrides (JSON, partial)
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Topology JSON file
    topology: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Topology JSON file
    topology: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Component-count bound for exhaustive enumeration
    #[arg(long, default_value_t = oracle::DEFAULT_COMPONENT_LIMIT)]
    limit: usize,
    /// Use compensated (Kahan) summation
    #[arg(long)]
    compensated: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepSelect {
    #[value(name = "1")]
    Scenario1,
    #[value(name = "2")]
    Scenario2,
    All,
}

#[derive(Args)]
struct SweepArgs {
    /// Which sweep to run
    #[arg(long, value_enum, default_value = "all")]
    scenario: SweepSelect,
    #[arg(long, default_value_t = 32)]
    g: u32,
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    /// Networks per population
    #[arg(long, default_value_t = 100, conflicts_with = "quick")]
    samples: usize,
    /// Reduced sample size (10 networks per population) for smoke runs
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 picks the rayon default
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output directory for the data files
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => cmd_generate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn load_table(path: Option<&Path>) -> Result<AvailabilityTable> {
    match path {
        Some(path) => AvailabilityTable::from_json_file(path)
            .with_context(|| format!("loading availability table {}", path.display())),
        None => Ok(AvailabilityTable::default()),
    }
}

fn load_topology(path: &Path, table: &AvailabilityTable) -> Result<PonTree> {
    let tree = json::load(path, table)
        .with_context(|| format!("loading topology {}", path.display()))?;
    let report = tree.validate();
    if !report.is_valid() {
        let mut message = format!("topology {} is invalid:", path.display());
        for violation in &report.violations {
            message.push_str(&format!("\n  - {violation}"));
        }
        bail!(message);
    }
    Ok(tree)
}

fn print_census(tree: &PonTree) {
    let census = onu_census(tree);
    eprintln!(
        "nodes={} fibers={} onus={} (ic={} nic={}) per-stage={:?}",
        tree.node_count(),
        tree.fiber_count(),
        census.total,
        census.ic,
        census.nic,
        census.per_stage
    );
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let params = GeneratorParams {
        g: args.g,
        s: args.s,
        r: args.r,
        q: args.q,
        scenario: args.scenario.into(),
        seed: args.seed,
    };
    let tree = generate(&params, &table)?;
    print_census(&tree);
    match args.out {
        Some(path) => {
            json::save(&tree, &path)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let doc = json::to_document(&tree);
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &doc)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let tree = load_topology(&args.topology, &table)?;
    print_census(&tree);

    let per_onu = engine::per_onu_service_availability(&tree, &table)?;
    if per_onu.is_empty() {
        bail!("topology has no ONUs");
    }
    let mean: f64 = per_onu.iter().map(|(_, sa)| sa).sum::<f64>() / per_onu.len() as f64;

    // Stage = number of RNs on the upstream path.
    let mut stage_sums: Vec<(usize, f64)> = Vec::new();
    for (onu, sa) in &per_onu {
        let stage = tree.depth(*onu).expect("validated tree").saturating_sub(1);
        if stage_sums.len() < stage {
            stage_sums.resize(stage, (0, 0.0));
        }
        stage_sums[stage - 1].0 += 1;
        stage_sums[stage - 1].1 += sa;
    }

    println!("mean ONU service availability: {mean:.9}");
    for (i, (count, sum)) in stage_sums.iter().enumerate() {
        if *count > 0 {
            println!("  stage {}: {:.9}  (n={count})", i + 1, sum / *count as f64);
        }
    }
    println!(
        "annual downtime: {:.2} h/yr",
        engine::annual_downtime_hours(mean)?
    );
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let tree = load_topology(&args.topology, &table)?;

    println!("{:>6} {:>8} {:>15} {:>15} {:>12}", "onu", "kind", "engine", "oracle", "|diff|");
    let mut max_diff = 0.0f64;
    for onu in tree.onus() {
        let engine_value = engine::service_availability(&tree, onu, &table)?;
        let oracle_value =
            oracle::availability_within(&tree, onu, &table, args.limit, args.compensated)?;
        let diff = (engine_value - oracle_value).abs();
        max_diff = max_diff.max(diff);
        let kind = match tree.kind(onu) {
            NodeKind::Onu { ic: true } => "ic",
            _ => "nic",
        };
        println!("{:>6} {kind:>8} {engine_value:>15.9} {oracle_value:>15.9} {diff:>12.3e}", onu.value());
    }
    println!("max |engine - oracle| = {max_diff:.3e}");
    Ok(())
}

fn run_sweeps(args: &SweepArgs, cfg: &SweepConfig, table: &AvailabilityTable) -> Result<()> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut flagged = 0usize;
    if matches!(args.scenario, SweepSelect::Scenario1 | SweepSelect::All) {
        let start = Instant::now();
        let rows = sweep_scenario1(cfg, table)?;
        flagged += rows.iter().filter(|r| r.stats.rse >= 0.01).count();
        let (first, traditional) = write_scenario1_files(cfg, table, &rows, &args.out)?;
        eprintln!(
            "scenario 1: {} populations in {:.1?} -> {} and {}",
            rows.len(),
            start.elapsed(),
            first.display(),
            traditional.display()
        );
    }
    if matches!(args.scenario, SweepSelect::Scenario2 | SweepSelect::All) {
        let start = Instant::now();
        let rows = sweep_scenario2(cfg, table)?;
        flagged += rows.iter().filter(|r| r.stats.rse >= 0.01).count();
        let (full, slice) = write_scenario2_files(cfg, table, &rows, &args.out)?;
        eprintln!(
            "scenario 2: {} populations in {:.1?} -> {} and {}",
            rows.len(),
            start.elapsed(),
            full.display(),
            slice.display()
        );
    }
    if flagged > 0 {
        eprintln!("warning: {flagged} population(s) have availability RSE >= 1%");
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let sample_size = if args.quick { 10 } else { args.samples };
    let cfg = SweepConfig {
        g: args.g,
        s: args.s,
        sample_size,
        master_seed: args.seed,
    };
    // Population validation happens per row; surface bad params early.
    montecarlo::PopulationSpec {
        scenario: Scenario::First,
        g: cfg.g,
        s: cfg.s,
        r: 0.0,
        q: 0.0,
        sample_size: cfg.sample_size,
        master_seed: cfg.master_seed,
    }
    .validate()?;

    if args.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build()
            .context("building worker pool")?;
        pool.install(|| run_sweeps(&args, &cfg, &table))
    } else {
        run_sweeps(&args, &cfg, &table)
    }
}
