//! `glab`: reproducible batch runner for the lattice field experiments.
//!
//! ```text
//! glab <kind> --config <path> [--seed S] [--jobs J] [--out PATH] [--csv]
//! glab verify --suite <name> [--out PATH] [--csv]
//! ```

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use glab_core::verify;

use config::Kind;
use output::RunRecord;

#[derive(Parser)]
#[command(
    name = "glab",
    version,
    about = "Gaussian free field with random external fields: experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted constants G*, K, M*, R* and capacities
    Constants(RunArgs),
    /// Finite- or infinite-volume Green function values
    Green(RunArgs),
    /// Exact variances of m_N(0) and phi(0) over a grid of boxes
    VarianceScan(RunArgs),
    /// Quenched field samples, optionally dumped raw
    SampleField(RunArgs),
    /// Normalised maxima over a grid of box sizes
    MaxSweep(RunArgs),
    /// Deviation probabilities of Green-weighted disorder sums
    Deviation(RunArgs),
    /// High-point counts of the disorder mean field
    Highpoints(RunArgs),
    /// Hard-wall probabilities
    Repulsion(RunArgs),
    /// Run a named verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML (.toml) or JSON config file
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON-lines output; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the CSV projection (next to --out, or to stdout)
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`
    #[arg(long)]
    suite: String,
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON-lines table of checks
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: bool,
}

/// Exit status for runs in which some grid points failed.
const PARTIAL: u8 = 3;

fn set_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run_experiment(kind: Kind, args: RunArgs) -> Result<ExitCode> {
    let table = config::read_table(&args.config)?;
    let cfg = config::build(kind, table, args.seed, args.out)?;
    set_jobs(args.jobs)?;
    let hash = cfg.hash();
    let start = Instant::now();
    let payload = run::run(&cfg)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let lines = output::json_lines(&hash, kind.name(), &payload.records);
    let csv = args
        .csv
        .then(|| output::csv_projection(kind.name(), &payload.records))
        .transpose()?;
    let summary = RunRecord {
        config_hash: hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: kind.name().to_string(),
        seed: cfg.seed,
        config: cfg.canonical(),
        records: payload.records.len(),
        failures: payload.failures,
        partial: payload.failures > 0,
        wall_seconds,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        payload: payload.records,
    };
    match &cfg.out {
        Some(path) => {
            output::write_file(path, &lines)?;
            if let Some(csv) = &csv {
                output::write_file(&path.with_extension("csv"), csv)?;
            }
            let run_path = output::with_suffix(path, ".run.json");
            output::write_file(&run_path, &serde_json::to_string_pretty(&summary)?)?;
            eprintln!(
                "{}: {} records in {:.2} s -> {} (summary {})",
                summary.kind,
                summary.records,
                wall_seconds,
                path.display(),
                run_path.display()
            );
        }
        None => match &csv {
            Some(csv) => print!("{csv}"),
            None => print!("{lines}"),
        },
    }
    if summary.partial {
        eprintln!(
            "warning: {} grid point(s) failed; results are partial",
            summary.failures
        );
        return Ok(ExitCode::from(PARTIAL));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode> {
    set_jobs(args.jobs)?;
    let checks = verify::run_suite(&args.suite)?;
    for c in &checks {
        let id = c.id.map(|i| format!("[{i}] ")).unwrap_or_default();
        println!(
            "{} {id}{}: {} — {} ({:.1} s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail,
            c.seconds
        );
    }
    let records: Vec<serde_json::Value> = checks
        .iter()
        .map(serde_json::to_value)
        .collect::<serde_json::Result<_>>()?;
    if let Some(path) = &args.out {
        let mut lines = String::new();
        for r in &records {
            lines.push_str(&r.to_string());
            lines.push('\n');
        }
        output::write_file(path, &lines)?;
        if args.csv {
            output::write_file(
                &path.with_extension("csv"),
                &output::csv_projection("verify", &records)?,
            )?;
        }
    } else if args.csv {
        print!("{}", output::csv_projection("verify", &records)?);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants(a) => run_experiment(Kind::Constants, a),
        Command::Green(a) => run_experiment(Kind::Green, a),
        Command::VarianceScan(a) => run_experiment(Kind::VarianceScan, a),
        Command::SampleField(a) => run_experiment(Kind::SampleField, a),
        Command::MaxSweep(a) => run_experiment(Kind::MaxSweep, a),
        Command::Deviation(a) => run_experiment(Kind::Deviation, a),
        Command::Highpoints(a) => run_experiment(Kind::Highpoints, a),
        Command::Repulsion(a) => run_experiment(Kind::Repulsion, a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
