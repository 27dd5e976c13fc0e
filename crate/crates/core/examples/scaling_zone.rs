//! Finds the scaling zone of a GBM sweep and fits power laws to the event
//! frequencies inside it.
//!
//!     cargo run --release --example scaling_zone

use intrinsic_time::scaling::{detect_zone, fit_zone, zone_report, ScalingConfig};
use intrinsic_time::sweep::run_sweep_jobs;
use intrinsic_time::synth::{generate_gbm, GbmParams};
use intrinsic_time::table::sci3;
use intrinsic_time::make_grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate_gbm(&GbmParams {
        n_steps: 1_000_000,
        ..GbmParams::default()
    })?;
    let grid = make_grid(1e-5, 1.0, 50)?;
    let rows = run_sweep_jobs(&series, &grid, 0)?.summaries();

    let zone = detect_zone(&rows, &ScalingConfig::default())?;
    for (row, label) in rows.iter().zip(&zone.labels) {
        let pct = row.dc_pct.map(|p| format!("{p:6.2}")).unwrap_or_default();
        println!("{}  {pct:>6}  {}", sci3(row.delta), label.as_str());
    }

    let fits: Vec<_> = fit_zone(&rows, &zone)
        .into_iter()
        .filter_map(|(class, fit)| fit.ok().map(|f| (class, f)))
        .collect();
    let report = zone_report(&zone, &fits);
    println!("\nzone: {}", report.table_row());
    for (class, f) in &report.fits {
        println!("{:>3}: beta={:.3} R2={:.4} p={:.2e}", class.as_str(), f.beta, f.r_squared, f.p_value);
    }
    Ok(())
}
