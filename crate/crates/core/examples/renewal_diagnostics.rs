//! Runs the renewal test battery on synthetic exponential overshoots and on
//! a GBM path at one threshold.
//!
//!     cargo run --release --example renewal_diagnostics

use intrinsic_time::diagnostics::{
    consistency_check, diagnostics_row, empirical_dc_probability, exponential_test, geometric_test,
    ConsistencyConfig, RateBand, ShareBands,
};
use intrinsic_time::sweep::sweep_point;
use intrinsic_time::synth::{generate_gbm, generate_renewal_lengths, GbmParams, RenewalStreamParams};
use intrinsic_time::to_log_prices;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (seed, lambda) in [(41, 0.8), (42, 1.0), (43, 1.3)] {
        let stream = generate_renewal_lengths(&RenewalStreamParams {
            lambda,
            n_cycles: 200_000,
            seed,
        })?;
        let (n_dc, n_os) = stream.event_counts();
        let share = empirical_dc_probability(n_dc, n_os)?;
        let geo = geometric_test(&stream.counts)?;
        let exp = exponential_test(&stream.lengths)?;
        println!(
            "lambda={lambda}: p_mean={:.4} p_geom={:.4} (chi2 p={:.3}) lam_hat={:.4} (KS p={:.3}) p_pred={:.4}",
            share.p_mean,
            geo.p_geom,
            geo.chi2_p.unwrap_or(f64::NAN),
            exp.lambda_hat,
            exp.ks_p,
            exp.p_pred
        );
    }

    let series = generate_gbm(&GbmParams {
        n_steps: 1_000_000,
        ..GbmParams::default()
    })?;
    let log_prices = to_log_prices(&series);
    let delta = 3e-3;
    let point = sweep_point(&log_prices, log_prices.len(), delta)?;
    let row = diagnostics_row(delta, &point.summary, &point.cycles);
    println!("\nGBM at delta={delta}: {row:?}");
    println!("labels: {:?}", row.labels(ShareBands::default(), RateBand::default()));
    match consistency_check(&row, ConsistencyConfig::default()) {
        Ok(report) => println!("{}", report.message),
        Err(e) => println!("consistency check skipped: {e}"),
    }
    Ok(())
}
