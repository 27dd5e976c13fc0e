//! Writes a synthetic tick file, reads it back with a custom column
//! mapping, and checks the round trip.
//!
//!     cargo run --example simulate_and_load

use std::fs;

use intrinsic_time::ingest::write_ticks;
use intrinsic_time::synth::{generate_gbm, GbmParams};
use intrinsic_time::{load_ticks, ColumnMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("intrinsic_time_example");
    fs::create_dir_all(&dir)?;

    let series = generate_gbm(&GbmParams {
        n_steps: 10_000,
        seed: 3,
        ..GbmParams::default()
    })?;
    let path = dir.join("ticks.csv");
    write_ticks(&path, &series)?;
    let back = load_ticks(&path, &ColumnMap::default())?;
    assert_eq!(back, series);
    println!("{} ticks round-tripped through {}", back.n_ticks(), path.display());

    // semicolon-delimited export with vendor column names
    let text: String = std::iter::once("ts;mid\n".to_string())
        .chain(series.ticks().iter().map(|t| format!("{};{}\n", t.timestamp, t.price)))
        .collect();
    let vendor = dir.join("vendor.csv");
    fs::write(&vendor, text)?;
    let columns = ColumnMap {
        timestamp: "ts".into(),
        price: "mid".into(),
        delimiter: b';',
    };
    let loaded = load_ticks(&vendor, &columns)?;
    println!("vendor file: {} ticks, last price {:.4}", loaded.n_ticks(), loaded.ticks().last().unwrap().price);
    Ok(())
}
