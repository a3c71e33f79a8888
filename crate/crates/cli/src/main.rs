use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use richardson_cli::{parse_config_with, run_experiment, Kind, RunOptions};

/// Monte Carlo experiments for one- and two-type Richardson growth.
#[derive(Parser)]
#[command(name = "richardson", version = env!("RICHARDSON_BUILD_ID"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time constant from point-to-point axis times.
    Mu(Common),
    /// Time constant from a truncated hyperplane, next to the point estimate.
    MuHyperplane(Common),
    /// Time constants of tubes of several radii.
    MuHampered(Common),
    /// Descent counts across a hyperplane.
    Descent(Common),
    /// Record counts along the axis, or record probabilities.
    Records(Common),
    /// Convexity and symmetry of the infected set.
    Shape(Common),
    /// Type-2 survival proportions against radius.
    Survival(Common),
    /// Proportion of runs in which both single seeds escape.
    CoexistenceScan(Common),
    /// One two-type run, optionally with its infection log.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Write events.csv with every infection in order.
        #[arg(long)]
        emit_events: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Config file in key=value format.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (speed only; results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Replication index (simulate).
    #[arg(long)]
    rep: Option<u64>,
    /// single or two.
    #[arg(long)]
    clock_mode: Option<String>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// Further settings as key=value.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let (kind, common, emit_events) = match cli.command {
        Command::Mu(c) => (Kind::Mu, c, false),
        Command::MuHyperplane(c) => (Kind::MuHyperplane, c, false),
        Command::MuHampered(c) => (Kind::MuHampered, c, false),
        Command::Descent(c) => (Kind::Descent, c, false),
        Command::Records(c) => (Kind::Records, c, false),
        Command::Shape(c) => (Kind::Shape, c, false),
        Command::Survival(c) => (Kind::SurvivalCurve, c, false),
        Command::CoexistenceScan(c) => (Kind::CoexistenceScan, c, false),
        Command::Simulate { common, emit_events } => (Kind::Simulate, common, emit_events),
    };
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    let flags = [
        ("seed", common.seed.map(|v| v.to_string())),
        ("reps", common.reps.map(|v| v.to_string())),
        ("out", common.out.as_ref().map(|p| p.display().to_string())),
        ("rep", common.rep.map(|v| v.to_string())),
        ("clock_mode", common.clock_mode.clone()),
        ("lambda1", common.lambda1.map(|v| v.to_string())),
        ("lambda2", common.lambda2.map(|v| v.to_string())),
        ("emit_events", emit_events.then(|| "true".to_string())),
    ];
    overrides.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
    let cfg = parse_config_with(&text, &overrides, Some(kind)).context("invalid configuration")?;
    let opts = RunOptions {
        threads: common.threads,
        command: std::env::args().collect(),
    };
    let report = run_experiment(&cfg, &opts)?;
    println!("wrote {} files to {}", report.files.len(), report.dir.display());
    if report.horizon_hits > 0 {
        eprintln!(
            "error: {} replication(s) stopped at the safety horizon; results in {} are flagged",
            report.horizon_hits,
            report.dir.display()
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
