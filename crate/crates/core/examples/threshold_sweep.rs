//! Sweeps a seeded GBM path over the default 50-point threshold grid and
//! prints the summary table in the published rendering.
//!
//!     cargo run --release --example threshold_sweep

use std::io;

use intrinsic_time::sweep::{run_sweep_jobs, summary_cells, SUMMARY_HEADER};
use intrinsic_time::synth::{generate_gbm, GbmParams};
use intrinsic_time::table::write_rows;
use intrinsic_time::{make_grid, OutputStyle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate_gbm(&GbmParams {
        n_steps: 200_000,
        ..GbmParams::default()
    })?;
    let grid = make_grid(1e-5, 1.0, 50)?;
    let result = run_sweep_jobs(&series, &grid, 0)?;

    let rows: Vec<Vec<String>> = result
        .summaries()
        .iter()
        .map(|s| summary_cells(s, OutputStyle::Table))
        .collect();
    write_rows(&mut io::stdout().lock(), &SUMMARY_HEADER, &rows)?;
    Ok(())
}
