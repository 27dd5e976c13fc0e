//! Directional-change / overshoot (DcOS) decomposition of price series,
//! renewal-process diagnostics of the resulting event statistics, and
//! scaling-zone detection across a logarithmic threshold grid.
//!
//! ```
//! use intrinsic_time::{extract_events, Threshold};
//!
//! let log_prices = [0.0, 0.02, 0.00995];
//! let (events, cycles) = extract_events(&log_prices, Threshold::new(0.01).unwrap()).unwrap();
//! assert_eq!(events.len(), 3);
//! assert_eq!(cycles[0].overshoot_count, 1);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod events;
pub mod ingest;
pub mod numerics;
pub mod scaling;
pub mod sweep;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use events::{
    count_events, extract_events, extract_into, CycleRecord, DcosEvent, Direction, EventCounts, EventKind,
    EventSink, Extractor, Threshold,
};
pub use ingest::{load_ticks, read_ticks, to_log_prices, ColumnMap, Tick, TickSeries};
pub use sweep::{make_grid, run_sweep, SweepResult, ThresholdGrid, ThresholdSummary};
pub use table::OutputStyle;
