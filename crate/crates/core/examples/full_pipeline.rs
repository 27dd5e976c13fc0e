//! End-to-end run equivalent to `dcos analyze`: simulate, sweep, diagnose,
//! detect the zone and write all report files.
//!
//!     cargo run --release --example full_pipeline [out_dir]

use intrinsic_time::cli::{cmd_analyze, cmd_simulate, RunConfig, SimulateKind};
use intrinsic_time::synth::GbmParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("intrinsic_time_pipeline"));
    std::fs::create_dir_all(&out)?;

    let input = out.join("gbm.csv");
    cmd_simulate(
        &SimulateKind::Gbm(GbmParams {
            n_steps: 1_000_000,
            ..GbmParams::default()
        }),
        &input,
    )?;

    let mut cfg = RunConfig::new(&input, &out);
    cfg.table_fidelity = true;
    let analysis = cmd_analyze(&cfg)?;
    for w in &analysis.warnings {
        eprintln!("warning: {w}");
    }
    match &analysis.zone {
        Some(z) => println!("scaling zone: {}", z.table_row()),
        None => println!("no scaling zone"),
    }
    println!("reports in {}", out.display());
    Ok(())
}
