use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use intrinsic_time::cli::{self, RunConfig, SimulateKind};
use intrinsic_time::scaling::ScalingConfig;
use intrinsic_time::synth::{GbmParams, RenewalStreamParams};
use intrinsic_time::{ColumnMap, OutputStyle};

#[derive(Parser)]
#[command(name = "dcos", version, about = "Directional-change/overshoot analysis of price series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: sweep, diagnostics, zone and regression
    Analyze(RunArgs),
    /// Event counts per threshold (summary.csv, cycles.csv)
    Sweep(RunArgs),
    /// Renewal diagnostics from a prior sweep directory
    Diagnose(StageArgs),
    /// Scaling zone and power-law fits from a prior sweep directory
    Zone(ZoneArgs),
    /// Generate synthetic data
    #[command(subcommand)]
    Simulate(Simulate),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-5)]
    delta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_max: f64,
    #[arg(long, default_value_t = 50)]
    n_deltas: usize,
    #[arg(long, default_value_t = 61.21)]
    target_pct: f64,
    #[arg(long, default_value_t = 2.5)]
    tolerance_pct: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Accepted for symmetry with `simulate`; the analysis is deterministic
    #[arg(long)]
    seed: Option<u64>,
    /// Render numbers as in the published tables
    #[arg(long)]
    table_fidelity: bool,
    #[arg(long, default_value = "timestamp")]
    timestamp_column: String,
    #[arg(long, default_value = "price")]
    price_column: String,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Also write every event to events.csv
    #[arg(long)]
    dump_events: bool,
}

#[derive(Args)]
struct StageArgs {
    /// Directory holding the sweep output
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    table_fidelity: bool,
}

#[derive(Args)]
struct ZoneArgs {
    #[command(flatten)]
    stage: StageArgs,
    #[arg(long, default_value_t = 61.21)]
    target_pct: f64,
    #[arg(long, default_value_t = 2.5)]
    tolerance_pct: f64,
}

#[derive(Subcommand)]
enum Simulate {
    /// Geometric Brownian motion tick series
    Gbm {
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, default_value_t = 100.0)]
        s0: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1e-4)]
        sigma: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "gbm.csv")]
        out: PathBuf,
    },
    /// Exponential overshoot lengths and their counts
    Renewal {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "renewal.csv")]
        out: PathBuf,
    },
}

fn style(table_fidelity: bool) -> OutputStyle {
    if table_fidelity {
        OutputStyle::Table
    } else {
        OutputStyle::Full
    }
}

fn run_config(a: RunArgs) -> intrinsic_time::Result<RunConfig> {
    if !a.delimiter.is_ascii() {
        return Err(intrinsic_time::Error::InvalidArgument(format!(
            "delimiter must be ASCII, got {:?}",
            a.delimiter
        )));
    }
    Ok(RunConfig {
        input: a.input,
        columns: ColumnMap {
            timestamp: a.timestamp_column,
            price: a.price_column,
            delimiter: a.delimiter as u8,
        },
        delta_min: a.delta_min,
        delta_max: a.delta_max,
        n_deltas: a.n_deltas,
        target_pct: a.target_pct,
        tolerance_pct: a.tolerance_pct,
        out: a.out,
        table_fidelity: a.table_fidelity,
        jobs: a.jobs,
        dump_events: a.dump_events,
    })
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(command: Command) -> intrinsic_time::Result<()> {
    match command {
        Command::Analyze(a) => {
            let cfg = run_config(a)?;
            let analysis = cli::cmd_analyze(&cfg)?;
            warn(&analysis.warnings);
            if let Some(z) = &analysis.zone {
                println!("scaling zone: {}", z.table_row());
            }
            println!("wrote reports to {}", cfg.out.display());
        }
        Command::Sweep(a) => {
            let cfg = run_config(a)?;
            let rows = cli::cmd_sweep(&cfg)?;
            println!("swept {} thresholds into {}", rows.len(), cfg.out.display());
        }
        Command::Diagnose(a) => {
            let rows = cli::cmd_diagnose(&a.out, style(a.table_fidelity))?;
            println!("diagnosed {} thresholds", rows.len());
        }
        Command::Zone(a) => {
            let cfg = ScalingConfig::new(a.target_pct, a.tolerance_pct)?;
            let (zone, warnings) = cli::cmd_zone(&a.stage.out, &cfg, style(a.stage.table_fidelity))?;
            warn(&warnings);
            if let Some(z) = zone {
                println!("scaling zone: {}", z.table_row());
            }
        }
        Command::Simulate(Simulate::Gbm { steps, s0, mu, sigma, seed, out }) => {
            let p = GbmParams { s0, mu, sigma, n_steps: steps, seed };
            cli::cmd_simulate(&SimulateKind::Gbm(p), &out)?;
        }
        Command::Simulate(Simulate::Renewal { lambda, n, seed, out }) => {
            let p = RenewalStreamParams { lambda, n_cycles: n, seed };
            cli::cmd_simulate(&SimulateKind::Renewal(p), &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
