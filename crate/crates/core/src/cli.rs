//! Pipeline stages behind the `dcos` binary. Each stage reads its inputs
//! from disk, writes its report files into the output directory, and parses
//! them back before returning.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{self, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::events::{extract_events, write_event_log, CycleRecord, Threshold};
use crate::ingest::{load_ticks, to_log_prices, write_ticks, ColumnMap, TickSeries};
use crate::scaling::{self, EventClass, RegressionResult, ScalingConfig, ZoneReport};
use crate::sweep::{self, make_grid, map_grid, sweep_point, ThresholdGrid, ThresholdSummary};
use crate::synth::{generate_gbm, generate_renewal_lengths, GbmParams, RenewalStreamParams};
use crate::table::{self, Column, OutputStyle};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const ZONE_FILE: &str = "zone.csv";
pub const REGRESSION_FILE: &str = "regression.csv";
pub const PLOTDATA_FILE: &str = "plotdata.csv";
pub const CYCLES_FILE: &str = "cycles.csv";
pub const EVENTS_FILE: &str = "events.csv";

pub const PLOTDATA_HEADER: [&str; 5] = ["delta", "fDc", "fOs", "fEv", "dcPct"];
pub const RENEWAL_HEADER: [&str; 2] = ["length", "count"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub columns: ColumnMap,
    pub delta_min: f64,
    pub delta_max: f64,
    pub n_deltas: usize,
    pub target_pct: f64,
    pub tolerance_pct: f64,
    pub out: PathBuf,
    pub table_fidelity: bool,
    /// Worker threads for the sweep; 0 picks the machine default.
    pub jobs: usize,
    /// Also write every event for every threshold to `events.csv`.
    pub dump_events: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            columns: ColumnMap::default(),
            delta_min: 1e-5,
            delta_max: 1.0,
            n_deltas: 50,
            target_pct: 61.21,
            tolerance_pct: 2.5,
            out: out.into(),
            table_fidelity: false,
            jobs: 0,
            dump_events: false,
        }
    }

    pub fn style(&self) -> OutputStyle {
        if self.table_fidelity {
            OutputStyle::Table
        } else {
            OutputStyle::Full
        }
    }

    pub fn grid(&self) -> Result<ThresholdGrid> {
        make_grid(self.delta_min, self.delta_max, self.n_deltas)
    }

    pub fn scaling(&self) -> Result<ScalingConfig> {
        ScalingConfig::new(self.target_pct, self.tolerance_pct)
    }
}

/// In-memory results of the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n_ticks: usize,
    pub summaries: Vec<ThresholdSummary>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub zone: Option<ZoneReport>,
    pub warnings: Vec<String>,
}

/// Sweep, diagnostics and zone detection on a loaded series. Cycles are
/// reduced to a diagnostics row inside each worker and then dropped.
pub fn analyze_series(series: &TickSeries, grid: &ThresholdGrid, scaling: &ScalingConfig, jobs: usize) -> Result<Analysis> {
    let log_prices = to_log_prices(series);
    let n_ticks = log_prices.len();
    let rows = map_grid(grid, jobs, |d| {
        let point = sweep_point(&log_prices, n_ticks, d)?;
        let diag = diagnostics::diagnostics_row(d, &point.summary, &point.cycles);
        Ok((point.summary, diag))
    })?;
    let (summaries, diagnostics): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let (zone, warnings) = zone_stage(&summaries, scaling)?;
    Ok(Analysis {
        n_ticks,
        summaries,
        diagnostics,
        zone,
        warnings,
    })
}

fn zone_stage(rows: &[ThresholdSummary], cfg: &ScalingConfig) -> Result<(Option<ZoneReport>, Vec<String>)> {
    let mut warnings = Vec::new();
    let zone = match scaling::detect_zone(rows, cfg) {
        Ok(z) => z,
        Err(Error::NoZoneFound) => {
            warnings.push(format!(
                "no scaling zone: no threshold reaches {}% Dc share inside ±{}",
                cfg.target_pct, cfg.tolerance_pct
            ));
            return Ok((None, warnings));
        }
        Err(e) => return Err(e),
    };
    let mut fits: Vec<(EventClass, RegressionResult)> = Vec::new();
    for (class, fit) in scaling::fit_zone(rows, &zone) {
        match fit {
            Ok(f) => fits.push((class, f)),
            Err(e) => warnings.push(format!("no {} power-law fit: {e}", class.as_str())),
        }
    }
    Ok((Some(scaling::zone_report(&zone, &fits)), warnings))
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_plotdata(path: &Path, rows: &[ThresholdSummary], style: OutputStyle) -> Result<()> {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|s| {
            vec![
                table::delta(s.delta, style),
                table::real(Some(s.f_dc), style, Column::Sci3),
                table::real(Some(s.f_os), style, Column::Sci3),
                table::real(Some(s.f_ev), style, Column::Sci3),
                table::real(s.dc_pct, style, Column::Fixed(2)),
            ]
        })
        .collect();
    table::write_csv(path, &PLOTDATA_HEADER, &cells)
}

fn write_zone_files(out: &Path, zone: Option<&ZoneReport>, style: OutputStyle) -> Result<()> {
    scaling::write_zone(&out.join(ZONE_FILE), zone, style)?;
    let fits = zone.map(|z| z.fits.as_slice()).unwrap_or(&[]);
    scaling::write_regression(&out.join(REGRESSION_FILE), fits, style)
}

fn expect_rows(path: &Path, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::InvalidArgument(format!(
            "{} has {found} rows after writing {expected}",
            path.display()
        )));
    }
    Ok(())
}

/// Writes one block of events per threshold, sequentially in grid order.
pub fn dump_events(path: &Path, log_prices: &[f64], grid: &ThresholdGrid) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (i, &d) in grid.deltas().iter().enumerate() {
        let threshold = Threshold::new(d)?;
        let (events, _) = extract_events(log_prices, threshold)?;
        write_event_log(&mut out, threshold, &events, i == 0).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Full pipeline: writes summary, diagnostics, zone, regression and plot
/// data, then reads every file back.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Analysis> {
    let grid = cfg.grid()?;
    let scaling_cfg = cfg.scaling()?;
    let series = load_ticks(&cfg.input, &cfg.columns)?;
    let analysis = analyze_series(&series, &grid, &scaling_cfg, cfg.jobs)?;

    let style = cfg.style();
    let out = &cfg.out;
    ensure_out_dir(out)?;
    sweep::write_summary(&out.join(SUMMARY_FILE), &analysis.summaries, style)?;
    diagnostics::write_diagnostics(&out.join(DIAGNOSTICS_FILE), &analysis.diagnostics, style)?;
    write_zone_files(out, analysis.zone.as_ref(), style)?;
    write_plotdata(&out.join(PLOTDATA_FILE), &analysis.summaries, style)?;
    if cfg.dump_events {
        dump_events(&out.join(EVENTS_FILE), &to_log_prices(&series), &grid)?;
    }

    let n = grid.len();
    let p = out.join(SUMMARY_FILE);
    expect_rows(&p, sweep::read_summary(&p)?.len(), n)?;
    let p = out.join(DIAGNOSTICS_FILE);
    expect_rows(&p, diagnostics::read_diagnostics(&p)?.len(), n)?;
    let p = out.join(PLOTDATA_FILE);
    expect_rows(&p, table::read_csv(&p, &PLOTDATA_HEADER)?.len(), n)?;
    scaling::read_zone(&out.join(ZONE_FILE))?;
    scaling::read_regression(&out.join(REGRESSION_FILE))?;
    Ok(analysis)
}

/// Sweep stage: `summary.csv` plus `cycles.csv` for the diagnose stage.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<ThresholdSummary>> {
    let grid = cfg.grid()?;
    let series = load_ticks(&cfg.input, &cfg.columns)?;
    let log_prices = to_log_prices(&series);
    let result = sweep::run_sweep_log(&log_prices, &grid, cfg.jobs)?;
    let summaries = result.summaries();

    ensure_out_dir(&cfg.out)?;
    let summary_path = cfg.out.join(SUMMARY_FILE);
    sweep::write_summary(&summary_path, &summaries, cfg.style())?;
    let per_delta: Vec<(f64, &[CycleRecord])> = result
        .points
        .iter()
        .map(|p| (p.summary.delta, p.cycles.as_slice()))
        .collect();
    diagnostics::write_cycles(&cfg.out.join(CYCLES_FILE), &per_delta)?;
    if cfg.dump_events {
        dump_events(&cfg.out.join(EVENTS_FILE), &log_prices, &grid)?;
    }
    expect_rows(&summary_path, sweep::read_summary(&summary_path)?.len(), grid.len())?;
    Ok(summaries)
}

/// Diagnose stage: reads `summary.csv` and `cycles.csv` from `dir`, writes
/// `diagnostics.csv` there.
pub fn cmd_diagnose(dir: &Path, style: OutputStyle) -> Result<Vec<DiagnosticsRow>> {
    let summaries = sweep::read_summary(&dir.join(SUMMARY_FILE))?;
    let cycles = diagnostics::read_cycles(&dir.join(CYCLES_FILE))?;
    let rows: Vec<DiagnosticsRow> = summaries
        .iter()
        .map(|s| {
            let c = cycles
                .iter()
                .find(|(d, _)| *d == s.delta)
                .map(|(_, c)| c.as_slice())
                .unwrap_or(&[]);
            diagnostics::diagnostics_row(s.delta, s, c)
        })
        .collect();
    let path = dir.join(DIAGNOSTICS_FILE);
    diagnostics::write_diagnostics(&path, &rows, style)?;
    expect_rows(&path, diagnostics::read_diagnostics(&path)?.len(), rows.len())?;
    Ok(rows)
}

/// Zone stage: reads `summary.csv` from `dir`, writes `zone.csv`,
/// `regression.csv` and `plotdata.csv`.
pub fn cmd_zone(dir: &Path, cfg: &ScalingConfig, style: OutputStyle) -> Result<(Option<ZoneReport>, Vec<String>)> {
    let summaries = sweep::read_summary(&dir.join(SUMMARY_FILE))?;
    let (zone, warnings) = zone_stage(&summaries, cfg)?;
    write_zone_files(dir, zone.as_ref(), style)?;
    write_plotdata(&dir.join(PLOTDATA_FILE), &summaries, style)?;
    scaling::read_zone(&dir.join(ZONE_FILE))?;
    scaling::read_regression(&dir.join(REGRESSION_FILE))?;
    Ok((zone, warnings))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulateKind {
    Gbm(GbmParams),
    Renewal(RenewalStreamParams),
}

/// Writes a tick CSV (`gbm`) or a `length,count` CSV (`renewal`).
pub fn cmd_simulate(kind: &SimulateKind, out: &Path) -> Result<()> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_out_dir(parent)?;
    }
    match kind {
        SimulateKind::Gbm(p) => write_ticks(out, &generate_gbm(p)?),
        SimulateKind::Renewal(p) => {
            let stream = generate_renewal_lengths(p)?;
            let rows: Vec<Vec<String>> = stream
                .lengths
                .iter()
                .zip(&stream.counts)
                .map(|(x, k)| vec![x.to_string(), k.to_string()])
                .collect();
            table::write_csv(out, &RENEWAL_HEADER, &rows)
        }
    }
}
