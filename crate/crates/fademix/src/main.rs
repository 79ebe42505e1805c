//! Thin command-line driver over the library: single episodes, frontier
//! sweeps, policy comparisons and chain validation, all from a TOML config.

use clap::{Parser, Subcommand};
use fademix::harness::{
    self, classify_stability, compare_csv, compare_policies, load_config, manifest_json, resolve,
    run_episode, runs_csv, sweep_frontier, PolicyConfig, RunRecord, SweepOptions,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fademix", about = "Deadline scheduling simulator for fading conflict-graph networks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured policy.
    #[arg(long)]
    policy: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the horizon in slots.
    #[arg(long)]
    horizon: Option<u64>,
    /// Output directory for CSV and manifest files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single seeded episode and report its metrics.
    Run(CommonArgs),
    /// Bisect for the largest stable target scale of the configured policy.
    Sweep(CommonArgs),
    /// Sweep several policies under shared seeds and tabulate frontiers.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated policy names; defaults to the config's sweep list.
        #[arg(long)]
        policies: Option<String>,
    },
    /// Check the configured chain: row sums, irreducibility, per-link
    /// serviceability.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, harness::HarnessError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Compare { common, policies } => cmd_compare(common, policies),
        Command::Validate { config } => cmd_validate(&config),
    }
}

fn apply_overrides(
    config: &mut harness::ExperimentConfig,
    args: &CommonArgs,
) {
    if let Some(name) = &args.policy {
        config.policy = PolicyConfig { name: name.clone(), ..config.policy.clone() };
    }
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(horizon) = args.horizon {
        config.run.horizon = horizon;
    }
    if let Some(out) = &args.out {
        config.run.out_dir = Some(out.display().to_string());
    }
}

fn out_dir(config: &harness::ExperimentConfig) -> PathBuf {
    PathBuf::from(config.run.out_dir.clone().unwrap_or_else(|| "out".into()))
}

fn write_outputs(
    dir: &Path,
    config: &harness::ExperimentConfig,
    runs: &[RunRecord],
    compare: Option<&str>,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("runs.csv"), runs_csv(runs))?;
    std::fs::write(dir.join("manifest.json"), manifest_json(config))?;
    if let Some(table) = compare {
        std::fs::write(dir.join("compare.csv"), table)?;
    }
    Ok(())
}

fn cmd_run(args: CommonArgs) -> Result<ExitCode, harness::HarnessError> {
    let mut config = load_config(&args.config)?;
    apply_overrides(&mut config, &args);
    let experiment = resolve(&config)?;
    let metrics = run_episode(&experiment, 0)?;
    let verdict = classify_stability(&metrics, &experiment.stability);
    println!(
        "policy={} horizon={} verdict={}",
        experiment.policy.name(),
        metrics.horizon,
        if verdict.stable { "stable" } else { "unstable" }
    );
    for l in 0..metrics.link_count() {
        println!(
            "  link {l}: delivered {}/{} (ratio {:.4}), mean deficit {:.3}, scheduling freq {:.4}",
            metrics.delivered_total[l],
            metrics.arrivals_total[l],
            metrics.delivery_ratio(l),
            metrics.mean_deficit[l],
            metrics.scheduling_frequency(l),
        );
    }
    let record = RunRecord {
        policy: experiment.policy.name().to_string(),
        scale: 1.0,
        seed_rep: 0,
        stable: verdict.stable,
        metrics,
    };
    write_outputs(&out_dir(&config), &config, std::slice::from_ref(&record), None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: CommonArgs) -> Result<ExitCode, harness::HarnessError> {
    let mut config = load_config(&args.config)?;
    apply_overrides(&mut config, &args);
    let experiment = resolve(&config)?;
    let opts = SweepOptions::from_config(&config.sweep, experiment.graph.link_count());
    let result = sweep_frontier(&experiment, &opts)?;
    println!(
        "policy={} p_hat={:.6} (direction {:?}, resolution {:.6})",
        experiment.policy.name(),
        result.p_hat,
        opts.direction,
        (opts.hi - opts.lo) / f64::from(1u32 << opts.steps),
    );
    for probe in &result.probes {
        println!(
            "  scale {:.6}: {}",
            probe.scale,
            if probe.stable { "stable" } else { "unstable" }
        );
    }
    write_outputs(&out_dir(&config), &config, &result.runs, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(
    common: CommonArgs,
    policies: Option<String>,
) -> Result<ExitCode, harness::HarnessError> {
    let mut config = load_config(&common.config)?;
    apply_overrides(&mut config, &common);
    let experiment = resolve(&config)?;
    let names: Vec<String> = match policies {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => config.sweep.policies.clone(),
    };
    if names.is_empty() {
        return Err(harness::HarnessError::Config(
            "no policies to compare: set sweep.policies or --policies".into(),
        ));
    }
    let selections: Vec<(String, harness::PolicySelection)> = names
        .iter()
        .map(|name| {
            let cfg = PolicyConfig { name: name.clone(), ..config.policy.clone() };
            harness::build_policy(&cfg, &experiment.graph).map(|sel| (name.clone(), sel))
        })
        .collect::<Result<_, _>>()?;
    let opts = SweepOptions::from_config(&config.sweep, experiment.graph.link_count());
    let (rows, runs) = compare_policies(&experiment, &selections, &opts)?;
    let table = compare_csv(&rows);
    print!("{table}");
    write_outputs(&out_dir(&config), &config, &runs, Some(&table))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(config_path: &Path) -> Result<ExitCode, harness::HarnessError> {
    let config = load_config(config_path)?;
    let graph = harness::build_graph(&config.graph)?;
    let chain = harness::build_chain(&config.chain)?;
    if chain.link_count() != graph.link_count() {
        println!(
            "mismatch: graph has {} links, chain has {}",
            graph.link_count(),
            chain.link_count()
        );
        return Ok(ExitCode::FAILURE);
    }
    println!(
        "graph: {} links, max degree {}, interference degree {}",
        graph.link_count(),
        graph.max_degree(),
        graph.interference_degree()
    );
    println!(
        "chain: {} states, d_max {}, a_max {}",
        chain.state_count(),
        chain.d_max(),
        chain.a_max()
    );
    match chain.validate() {
        Ok(()) => {
            println!("chain: ok (row-stochastic, irreducible, every link servable)");
            Ok(ExitCode::SUCCESS)
        }
        Err(violation) => {
            println!("chain: violation: {violation}");
            Ok(ExitCode::FAILURE)
        }
    }
}
