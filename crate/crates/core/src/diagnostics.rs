//! Renewal-process test battery: empirical Dc probability, geometric fit of
//! overshoot counts, exponential fit of overshoot lengths, and the joint
//! consistency check.

use std::path::Path;

use crate::error::{Error, Result};
use crate::events::CycleRecord;
use crate::numerics::{chi2_sf, kolmogorov_sf};
use crate::sweep::ThresholdSummary;
use crate::synth::{sample_exponential, seeded_rng};
use crate::table::{self, Column, OutputStyle};

/// 1 - e^-1: probability that an exponential renewal completes within one
/// mean interval.
pub const P0: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Minimum expected count per chi-squared bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Normal quantile for the 95% rate interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcProbability {
    pub p1: f64,
    /// `1 / (1 + n_os / n_dc)`; undefined when `n_dc == 0`.
    pub p2: Option<f64>,
    pub p_mean: f64,
    pub se: f64,
    pub delta_p: f64,
}

/// `p_mean` averages the two Dc-share estimators that are present.
pub fn empirical_dc_probability(n_dc: u64, n_os: u64) -> Result<DcProbability> {
    let n = n_dc + n_os;
    if n == 0 {
        return Err(Error::NoEvents);
    }
    let p1 = n_dc as f64 / n as f64;
    let p2 = (n_dc > 0).then(|| 1.0 / (1.0 + n_os as f64 / n_dc as f64));
    let p_mean = match p2 {
        Some(p2) => 0.5 * (p1 + p2),
        None => p1,
    };
    let se = (p_mean * (1.0 - p_mean) / n as f64).max(0.0).sqrt();
    Ok(DcProbability {
        p1,
        p2,
        p_mean,
        se,
        delta_p: p_mean - P0,
    })
}

// ---------------------------------------------------------------------------
// regime labels

/// Interpretation bands for a Dc-share style estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShareBands {
    pub low: f64,
    pub high: f64,
}

impl Default for ShareBands {
    fn default() -> Self {
        Self { low: 0.60, high: 0.66 }
    }
}

/// Band around unit hazard rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBand {
    pub tolerance: f64,
}

impl Default for RateBand {
    fn default() -> Self {
        Self { tolerance: 0.10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcShareRegime {
    Renewal,
    OvershootPersistence,
    AntiPersistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometricRegime {
    Memoryless,
    Trending,
    Choppy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HazardRegime {
    ScaleInvariant,
    Persistence,
    AntiPersistence,
}

pub fn classify_p_mean(p: f64) -> DcShareRegime {
    classify_p_mean_with(p, ShareBands::default())
}

pub fn classify_p_mean_with(p: f64, bands: ShareBands) -> DcShareRegime {
    if p < bands.low {
        DcShareRegime::OvershootPersistence
    } else if p > bands.high {
        DcShareRegime::AntiPersistent
    } else {
        DcShareRegime::Renewal
    }
}

pub fn classify_p_geom(p: f64, bands: ShareBands) -> GeometricRegime {
    if p < bands.low {
        GeometricRegime::Trending
    } else if p > bands.high {
        GeometricRegime::Choppy
    } else {
        GeometricRegime::Memoryless
    }
}

pub fn classify_lambda(lambda: f64, band: RateBand) -> HazardRegime {
    if lambda < 1.0 - band.tolerance {
        HazardRegime::Persistence
    } else if lambda > 1.0 + band.tolerance {
        HazardRegime::AntiPersistence
    } else {
        HazardRegime::ScaleInvariant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeLabels {
    pub p_mean: Option<DcShareRegime>,
    pub p_geom: Option<GeometricRegime>,
    pub lambda: Option<HazardRegime>,
}

// ---------------------------------------------------------------------------
// geometric overshoot counts

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricFit {
    pub p_geom: f64,
    pub chi2_p: Option<f64>,
    pub ks_p: Option<f64>,
    pub n_cycles: usize,
    /// `(observed, expected)` per chi-squared bin; the last bin is the tail.
    pub bins: Vec<(u64, f64)>,
}

/// Bins `k = 0..j-1` individually plus a tail `k >= j`, with the largest `j`
/// such that every bin expects at least [`MIN_EXPECTED`] counts.
pub fn chi2_bins(counts: &[u64], p: f64) -> Vec<(u64, f64)> {
    let n = counts.len() as f64;
    let q = 1.0 - p;
    let expected_at = |k: usize| n * q.powi(k as i32) * p;
    let tail_from = |k: usize| n * q.powi(k as i32);
    let mut j = 0usize;
    while expected_at(j) >= MIN_EXPECTED && tail_from(j + 1) >= MIN_EXPECTED {
        j += 1;
    }
    let mut observed = vec![0u64; j + 1];
    for &k in counts {
        observed[(k as usize).min(j)] += 1;
    }
    (0..=j)
        .map(|k| {
            let e = if k < j { expected_at(k) } else { tail_from(k) };
            (observed[k], e)
        })
        .collect()
}

/// Largest gap between the empirical and fitted geometric CDFs, evaluated
/// on every integer up to the sample maximum.
fn geometric_ks_distance(counts: &[u64], p: f64) -> f64 {
    let max_k = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max_k + 1];
    for &k in counts {
        hist[k as usize] += 1;
    }
    let n = counts.len() as f64;
    let q = 1.0 - p;
    let mut cum = 0u64;
    let mut d: f64 = 0.0;
    for (k, h) in hist.iter().enumerate() {
        cum += h;
        let model = 1.0 - q.powi(k as i32 + 1);
        d = d.max((cum as f64 / n - model).abs());
    }
    d
}

pub fn geometric_test(counts: &[u64]) -> Result<GeometricFit> {
    if counts.is_empty() {
        return Err(Error::EmptyCycles);
    }
    let n = counts.len();
    let mean_k = counts.iter().map(|&k| k as f64).sum::<f64>() / n as f64;
    let p_geom = 1.0 / (1.0 + mean_k);
    if mean_k == 0.0 {
        return Ok(GeometricFit {
            p_geom: 1.0,
            chi2_p: None,
            ks_p: None,
            n_cycles: n,
            bins: Vec::new(),
        });
    }

    let bins = chi2_bins(counts, p_geom);
    // one fitted parameter
    let chi2_p = if bins.len() >= 3 {
        let stat: f64 = bins
            .iter()
            .map(|&(o, e)| (o as f64 - e).powi(2) / e)
            .sum();
        Some(chi2_sf(stat, (bins.len() - 2) as u32)?.value())
    } else {
        None
    };
    let ks_p = Some(kolmogorov_sf(geometric_ks_distance(counts, p_geom), n as u64).value());

    Ok(GeometricFit {
        p_geom,
        chi2_p,
        ks_p,
        n_cycles: n,
        bins,
    })
}

// ---------------------------------------------------------------------------
// exponential overshoot lengths

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialFit {
    pub lambda_hat: f64,
    pub ks_stat: f64,
    pub ks_p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_pred: f64,
    pub n_overshoots: usize,
}

/// Optional parametric-bootstrap p-value for the exponential KS test, which
/// accounts for λ being estimated from the same sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExponentialOptions {
    pub bootstrap: Option<Bootstrap>,
}

/// One-sample KS distance against Exp(rate); sorts `xs` in place.
fn exponential_ks_distance(xs: &mut [f64], rate: f64) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .fold(0.0f64, |d, (i, &x)| {
            let cdf = 1.0 - (-rate * x).exp();
            let above = (i as f64 + 1.0) / n - cdf;
            let below = cdf - i as f64 / n;
            d.max(above).max(below)
        })
}

pub fn exponential_test(lengths: &[f64]) -> Result<ExponentialFit> {
    exponential_test_with(lengths, ExponentialOptions::default())
}

pub fn exponential_test_with(lengths: &[f64], options: ExponentialOptions) -> Result<ExponentialFit> {
    if lengths.is_empty() {
        return Err(Error::EmptyLengths);
    }
    if let Some(index) = lengths.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidLength { index });
    }
    let n = lengths.len();
    let mean = lengths.iter().sum::<f64>() / n as f64;
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let lambda_hat = 1.0 / mean;
    let mut sorted = lengths.to_vec();
    let ks_stat = exponential_ks_distance(&mut sorted, lambda_hat);
    let ks_p = match options.bootstrap {
        None => kolmogorov_sf(ks_stat, n as u64).value(),
        Some(b) => bootstrap_ks_p(ks_stat, n, lambda_hat, b),
    };
    let half = Z95 / (n as f64).sqrt();
    Ok(ExponentialFit {
        lambda_hat,
        ks_stat,
        ks_p,
        ci_low: lambda_hat * (1.0 - half),
        ci_high: lambda_hat * (1.0 + half),
        p_pred: 1.0 - (-lambda_hat).exp(),
        n_overshoots: n,
    })
}

fn bootstrap_ks_p(observed: f64, n: usize, rate: f64, b: Bootstrap) -> f64 {
    let mut rng = seeded_rng(b.seed);
    let mut sample = vec![0.0; n];
    let mut exceed = 0usize;
    for _ in 0..b.resamples {
        for x in sample.iter_mut() {
            *x = sample_exponential(&mut rng, rate);
        }
        let mean = sample.iter().sum::<f64>() / n as f64;
        if exponential_ks_distance(&mut sample, 1.0 / mean) >= observed {
            exceed += 1;
        }
    }
    (exceed + 1) as f64 / (b.resamples + 1) as f64
}

// ---------------------------------------------------------------------------
// per-threshold row

/// Minimum completed cycles before the exponential fit is reported.
pub const MIN_CYCLES_EXPONENTIAL: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub delta: f64,
    pub p_mean: Option<f64>,
    pub diff: Option<f64>,
    pub p_geom: Option<f64>,
    pub geo_chi2_p: Option<f64>,
    pub geo_ks_p: Option<f64>,
    pub lam_hat: Option<f64>,
    pub exp_ks_p: Option<f64>,
    pub lam_ci_low: Option<f64>,
    pub lam_ci_high: Option<f64>,
    pub p_pred: Option<f64>,
}

impl DiagnosticsRow {
    pub fn blank(delta: f64) -> Self {
        Self {
            delta,
            p_mean: None,
            diff: None,
            p_geom: None,
            geo_chi2_p: None,
            geo_ks_p: None,
            lam_hat: None,
            exp_ks_p: None,
            lam_ci_low: None,
            lam_ci_high: None,
            p_pred: None,
        }
    }

    pub fn labels(&self, bands: ShareBands, rate: RateBand) -> RegimeLabels {
        RegimeLabels {
            p_mean: self.p_mean.map(|p| classify_p_mean_with(p, bands)),
            p_geom: self.p_geom.map(|p| classify_p_geom(p, bands)),
            lambda: self.lam_hat.map(|l| classify_lambda(l, rate)),
        }
    }
}

/// Assembles one row; fields whose prerequisites fail stay blank.
pub fn diagnostics_row(delta: f64, summary: &ThresholdSummary, cycles: &[CycleRecord]) -> DiagnosticsRow {
    diagnostics_row_with(delta, summary, cycles, ExponentialOptions::default())
}

pub fn diagnostics_row_with(
    delta: f64,
    summary: &ThresholdSummary,
    cycles: &[CycleRecord],
    options: ExponentialOptions,
) -> DiagnosticsRow {
    let mut row = DiagnosticsRow::blank(delta);
    if let Ok(p) = empirical_dc_probability(summary.n_dc, summary.n_os) {
        row.p_mean = Some(p.p_mean);
        row.diff = Some(p.delta_p);
    }
    let counts: Vec<u64> = cycles.iter().map(|c| c.overshoot_count).collect();
    if let Ok(fit) = geometric_test(&counts) {
        row.p_geom = Some(fit.p_geom);
        row.geo_chi2_p = fit.chi2_p;
        row.geo_ks_p = fit.ks_p;
    }
    if cycles.len() >= MIN_CYCLES_EXPONENTIAL {
        let lengths: Vec<f64> = cycles.iter().map(|c| c.overshoot_length_norm).collect();
        if let Ok(fit) = exponential_test_with(&lengths, options) {
            row.lam_hat = Some(fit.lambda_hat);
            row.exp_ks_p = Some(fit.ks_p);
            row.lam_ci_low = Some(fit.ci_low);
            row.lam_ci_high = Some(fit.ci_high);
            row.p_pred = Some(fit.p_pred);
        }
    }
    row
}

// ---------------------------------------------------------------------------
// consistency

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyConfig {
    /// Largest allowed pairwise gap among p_mean, p_geom, p_pred.
    pub tol: f64,
    /// Largest allowed |lam_hat - 1|.
    pub tol_lambda: f64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self {
            tol: 0.02,
            tol_lambda: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub max_pairwise_diff: f64,
    pub lambda_deviation: f64,
    pub message: String,
}

pub fn consistency_check(row: &DiagnosticsRow, cfg: ConsistencyConfig) -> Result<ConsistencyReport> {
    let fields = [
        ("pMean", row.p_mean),
        ("pGeom", row.p_geom),
        ("pPred", row.p_pred),
        ("lamHat", row.lam_hat),
    ];
    let missing: Vec<&'static str> = fields
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(name, _)| *name)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFields(missing));
    }
    let ps = [row.p_mean.unwrap(), row.p_geom.unwrap(), row.p_pred.unwrap()];
    let lam = row.lam_hat.unwrap();
    let max_pairwise_diff = ps
        .iter()
        .flat_map(|a| ps.iter().map(move |b| (a - b).abs()))
        .fold(0.0f64, f64::max);
    let lambda_deviation = (lam - 1.0).abs();
    // small slack so table-rounded inputs on the boundary pass
    let slack = 1e-12;
    let consistent = max_pairwise_diff <= cfg.tol + slack && lambda_deviation <= cfg.tol_lambda + slack;
    let message = format!(
        "delta={}: max |dp| = {:.4} (tol {}), |lam-1| = {:.4} (tol {}) -> {}",
        row.delta,
        max_pairwise_diff,
        cfg.tol,
        lambda_deviation,
        cfg.tol_lambda,
        if consistent { "consistent" } else { "inconsistent" }
    );
    Ok(ConsistencyReport {
        consistent,
        max_pairwise_diff,
        lambda_deviation,
        message,
    })
}

// ---------------------------------------------------------------------------
// diagnostics.csv

pub const DIAGNOSTICS_HEADER: [&str; 11] = [
    "delta", "pMean", "diff", "pGeom", "geoChi2p", "geoKSp", "lamHat", "expKSp", "lamCiLow",
    "lamCiHigh", "pPred",
];

pub fn diagnostics_cells(r: &DiagnosticsRow, style: OutputStyle) -> Vec<String> {
    let fixed = |v| table::real(v, style, Column::Fixed(2));
    let pval = |v| table::real(v, style, Column::PValue);
    vec![
        table::delta(r.delta, style),
        fixed(r.p_mean),
        fixed(r.diff),
        fixed(r.p_geom),
        pval(r.geo_chi2_p),
        pval(r.geo_ks_p),
        fixed(r.lam_hat),
        pval(r.exp_ks_p),
        fixed(r.lam_ci_low),
        fixed(r.lam_ci_high),
        fixed(r.p_pred),
    ]
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow], style: OutputStyle) -> Result<()> {
    let cells: Vec<_> = rows.iter().map(|r| diagnostics_cells(r, style)).collect();
    table::write_csv(path, &DIAGNOSTICS_HEADER, &cells)
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let records = table::read_csv(path, &DIAGNOSTICS_HEADER)?;
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let line = i as u64 + 2;
            let mut vals = [None; 11];
            for (col, slot) in vals.iter_mut().enumerate() {
                *slot = table::parse_real(rec.get(col).unwrap_or(""))
                    .map_err(|m| table::parse_err(line, DIAGNOSTICS_HEADER[col], m))?;
            }
            let delta = vals[0].ok_or_else(|| table::parse_err(line, "delta", "blank".into()))?;
            Ok(DiagnosticsRow {
                delta,
                p_mean: vals[1],
                diff: vals[2],
                p_geom: vals[3],
                geo_chi2_p: vals[4],
                geo_ks_p: vals[5],
                lam_hat: vals[6],
                exp_ks_p: vals[7],
                lam_ci_low: vals[8],
                lam_ci_high: vals[9],
                p_pred: vals[10],
            })
        })
        .collect()
}

/// Closed cycles for every threshold, as written by the `sweep` stage:
/// `delta,overshoot_count,overshoot_length_norm`.
pub const CYCLES_HEADER: [&str; 3] = ["delta", "overshoot_count", "overshoot_length_norm"];

pub fn write_cycles(path: &Path, per_delta: &[(f64, &[CycleRecord])]) -> Result<()> {
    let rows: Vec<Vec<String>> = per_delta
        .iter()
        .flat_map(|(d, cycles)| {
            cycles.iter().map(move |c| {
                vec![
                    d.to_string(),
                    c.overshoot_count.to_string(),
                    c.overshoot_length_norm.to_string(),
                ]
            })
        })
        .collect();
    table::write_csv(path, &CYCLES_HEADER, &rows)
}

/// Groups cycles by the exact threshold value in the first column.
pub fn read_cycles(path: &Path) -> Result<Vec<(f64, Vec<CycleRecord>)>> {
    let records = table::read_csv(path, &CYCLES_HEADER)?;
    let mut out: Vec<(f64, Vec<CycleRecord>)> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let line = i as u64 + 2;
        let get = |col: usize| rec.get(col).unwrap_or("").trim();
        let delta: f64 = get(0)
            .parse()
            .map_err(|e| table::parse_err(line, "delta", format!("{e}")))?;
        let overshoot_count: u64 = get(1)
            .parse()
            .map_err(|e| table::parse_err(line, "overshoot_count", format!("{e}")))?;
        let overshoot_length_norm: f64 = get(2)
            .parse()
            .map_err(|e| table::parse_err(line, "overshoot_length_norm", format!("{e}")))?;
        let record = CycleRecord {
            overshoot_count,
            overshoot_length_norm,
        };
        match out.last_mut() {
            Some((d, v)) if *d == delta => v.push(record),
            _ => out.push((delta, vec![record])),
        }
    }
    Ok(out)
}
