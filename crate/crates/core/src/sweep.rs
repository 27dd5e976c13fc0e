//! Extraction across a logarithmic threshold grid and per-threshold
//! frequency statistics.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::{extract_into, CountingSink, CycleRecord, EventCounts, Threshold};
use crate::ingest::{to_log_prices, TickSeries};
use crate::table::{self, Column, OutputStyle};

/// Log-spaced thresholds with exact endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    deltas: Vec<f64>,
}

impl ThresholdGrid {
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Wraps an explicit threshold list (strictly increasing, positive).
    pub fn from_deltas(deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidRange { min: f64::NAN, max: f64::NAN, n: 0 });
        }
        for d in &deltas {
            Threshold::new(*d)?;
        }
        if deltas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRange {
                min: deltas[0],
                max: deltas[deltas.len() - 1],
                n: deltas.len(),
            });
        }
        Ok(Self { deltas })
    }
}

/// `deltas[i] = min * (max/min)^(i/(n-1))`, with both endpoints exact.
pub fn make_grid(delta_min: f64, delta_max: f64, n: usize) -> Result<ThresholdGrid> {
    let valid = delta_min > 0.0
        && delta_max.is_finite()
        && delta_min < delta_max
        && n >= 2;
    if !valid {
        return Err(Error::InvalidRange {
            min: delta_min,
            max: delta_max,
            n,
        });
    }
    let ratio = delta_max / delta_min;
    let last = (n - 1) as f64;
    let mut deltas: Vec<f64> = (0..n)
        .map(|i| delta_min * ratio.powf(i as f64 / last))
        .collect();
    deltas[0] = delta_min;
    deltas[n - 1] = delta_max;
    Ok(ThresholdGrid { deltas })
}

/// One row of the per-threshold frequency table.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSummary {
    pub delta: f64,
    pub n_dc: u64,
    pub n_os: u64,
    pub n_ev: u64,
    pub f_dc: f64,
    /// Binomial standard errors; undefined when the frequency exceeds one
    /// event per tick.
    pub f_dc_se: Option<f64>,
    pub f_os: f64,
    pub f_os_se: Option<f64>,
    pub f_ev: f64,
    pub f_ev_se: Option<f64>,
    /// `100 * f_dc / f_ev`; absent when there are no events.
    pub dc_pct: Option<f64>,
    /// Binomial standard error of `dc_pct`, in percentage points.
    pub dc_pct_se: Option<f64>,
}

fn binomial_se(f: f64, n: f64) -> f64 {
    (f * (1.0 - f) / n).max(0.0).sqrt()
}

fn rate_se(f: f64, n: f64) -> Option<f64> {
    (f <= 1.0).then(|| binomial_se(f, n))
}

impl ThresholdSummary {
    pub fn from_counts(delta: f64, counts: EventCounts, n_ticks: usize) -> Self {
        let n = n_ticks as f64;
        let f_dc = counts.n_dc as f64 / n;
        let f_os = counts.n_os as f64 / n;
        let f_ev = f_dc + f_os;
        let n_ev = counts.n_ev();
        let (dc_pct, dc_pct_se) = if n_ev > 0 {
            let p = counts.n_dc as f64 / n_ev as f64;
            (
                Some(100.0 * f_dc / f_ev),
                Some(100.0 * binomial_se(p, n_ev as f64)),
            )
        } else {
            (None, None)
        };
        Self {
            delta,
            n_dc: counts.n_dc,
            n_os: counts.n_os,
            n_ev,
            f_dc,
            f_dc_se: rate_se(f_dc, n),
            f_os,
            f_os_se: rate_se(f_os, n),
            f_ev,
            f_ev_se: rate_se(f_ev, n),
            dc_pct,
            dc_pct_se,
        }
    }

    pub fn counts(&self) -> EventCounts {
        EventCounts {
            n_dc: self.n_dc,
            n_os: self.n_os,
        }
    }
}

/// Summary and closed cycles for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub summary: ThresholdSummary,
    pub cycles: Vec<CycleRecord>,
}

pub fn sweep_point(log_prices: &[f64], n_ticks: usize, delta: f64) -> Result<SweepPoint> {
    if n_ticks == 0 {
        return Err(Error::EmptySeries);
    }
    let threshold = Threshold::new(delta)?;
    let mut sink = CountingSink::default();
    extract_into(log_prices, threshold, &mut sink)?;
    Ok(SweepPoint {
        summary: ThresholdSummary::from_counts(delta, sink.counts, n_ticks),
        cycles: sink.cycles,
    })
}

pub fn summarize_threshold(log_prices: &[f64], n_ticks: usize, delta: Threshold) -> Result<ThresholdSummary> {
    sweep_point(log_prices, n_ticks, delta.value()).map(|p| p.summary)
}

/// Runs `work` once per threshold and returns results in grid order.
///
/// `jobs == 1` runs on the calling thread; otherwise a dedicated pool with
/// `jobs` workers is used (`0` lets rayon choose). Results never depend on
/// scheduling.
pub fn map_grid<T, F>(grid: &ThresholdGrid, jobs: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    if jobs == 1 {
        return grid.deltas().iter().map(|&d| work(d)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| grid.deltas().par_iter().map(|&d| work(d)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub n_ticks: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn summaries(&self) -> Vec<ThresholdSummary> {
        self.points.iter().map(|p| p.summary.clone()).collect()
    }
}

pub fn run_sweep(series: &TickSeries, grid: &ThresholdGrid) -> Result<SweepResult> {
    run_sweep_jobs(series, grid, 0)
}

pub fn run_sweep_jobs(series: &TickSeries, grid: &ThresholdGrid, jobs: usize) -> Result<SweepResult> {
    let log_prices = to_log_prices(series);
    run_sweep_log(&log_prices, grid, jobs)
}

pub fn run_sweep_log(log_prices: &[f64], grid: &ThresholdGrid, jobs: usize) -> Result<SweepResult> {
    let n_ticks = log_prices.len();
    let points = map_grid(grid, jobs, |d| sweep_point(log_prices, n_ticks, d))?;
    Ok(SweepResult { n_ticks, points })
}

pub const SUMMARY_HEADER: [&str; 12] = [
    "delta", "nDc", "nOs", "nEv", "fDc", "fDc_se", "fOs", "fOs_se", "fEv", "fEv_se", "dcPct",
    "seDcPct",
];

pub fn summary_cells(s: &ThresholdSummary, style: OutputStyle) -> Vec<String> {
    let sci = |v: f64| table::real(Some(v), style, Column::Sci3);
    vec![
        table::delta(s.delta, style),
        table::count(s.n_dc, style),
        table::count(s.n_os, style),
        table::count(s.n_ev, style),
        sci(s.f_dc),
        table::real(s.f_dc_se, style, Column::Sci3),
        sci(s.f_os),
        table::real(s.f_os_se, style, Column::Sci3),
        sci(s.f_ev),
        table::real(s.f_ev_se, style, Column::Sci3),
        table::real(s.dc_pct, style, Column::Fixed(2)),
        table::real(s.dc_pct_se, style, Column::Fixed(2)),
    ]
}

pub fn write_summary(path: &Path, rows: &[ThresholdSummary], style: OutputStyle) -> Result<()> {
    let cells: Vec<_> = rows.iter().map(|r| summary_cells(r, style)).collect();
    table::write_csv(path, &SUMMARY_HEADER, &cells)
}

/// Reads `summary.csv`. Blank counts and frequencies read as zero, blank
/// standard errors as `None`.
pub fn read_summary(path: &Path) -> Result<Vec<ThresholdSummary>> {
    let records = table::read_csv(path, &SUMMARY_HEADER)?;
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let line = i as u64 + 2;
            let real = |col: usize| {
                table::parse_real(rec.get(col).unwrap_or(""))
                    .map_err(|m| table::parse_err(line, SUMMARY_HEADER[col], m))
            };
            let count = |col: usize| {
                table::parse_count(rec.get(col).unwrap_or(""))
                    .map_err(|m| table::parse_err(line, SUMMARY_HEADER[col], m))
            };
            let zero = |col: usize| real(col).map(|v| v.unwrap_or(0.0));
            let delta = real(0)?.ok_or_else(|| table::parse_err(line, "delta", "blank".into()))?;
            Ok(ThresholdSummary {
                delta,
                n_dc: count(1)?,
                n_os: count(2)?,
                n_ev: count(3)?,
                f_dc: zero(4)?,
                f_dc_se: real(5)?,
                f_os: zero(6)?,
                f_os_se: real(7)?,
                f_ev: zero(8)?,
                f_ev_se: real(9)?,
                dc_pct: real(10)?,
                dc_pct_se: real(11)?,
            })
        })
        .collect()
}
