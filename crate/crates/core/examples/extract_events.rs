//! Walks a short price series through the DcOS state machine and prints
//! every event, then the closed cycles.
//!
//!     cargo run --example extract_events

use std::io;

use intrinsic_time::events::{count_events, write_event_log};
use intrinsic_time::{extract_events, Threshold};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prices = [100.0, 100.4, 101.2, 102.5, 101.9, 100.6, 100.1, 99.2, 99.8, 101.3, 101.0];
    let log_prices: Vec<f64> = prices.iter().map(|p: &f64| p.ln()).collect();
    let delta = Threshold::new(0.01)?;

    let (events, cycles) = extract_events(&log_prices, delta)?;
    write_event_log(&mut io::stdout().lock(), delta, &events, true)?;

    let counts = count_events(&events);
    println!("\n{} Dc, {} Os", counts.n_dc, counts.n_os);
    for (i, c) in cycles.iter().enumerate() {
        println!("cycle {i}: K = {}, x/delta = {:.3}", c.overshoot_count, c.overshoot_length_norm);
    }
    Ok(())
}
