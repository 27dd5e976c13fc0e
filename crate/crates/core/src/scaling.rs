//! Scaling-zone detection from the Dc share curve and log–log power-law
//! regression of event frequencies.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::t_sf_two_sided;
use crate::sweep::ThresholdSummary;
use crate::table::{self, Column, OutputStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdConvention {
    /// `n - 1` denominator.
    #[default]
    Sample,
    /// `n` denominator.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig {
    pub target_pct: f64,
    pub tolerance_pct: f64,
    pub std_convention: StdConvention,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            target_pct: 61.21,
            tolerance_pct: 2.5,
            std_convention: StdConvention::Sample,
        }
    }
}

impl ScalingConfig {
    pub fn new(target_pct: f64, tolerance_pct: f64) -> Result<Self> {
        if !(target_pct > 0.0 && target_pct < 100.0) || !(tolerance_pct > 0.0) || !tolerance_pct.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "target_pct must be in (0, 100) and tolerance_pct positive, got {target_pct} and {tolerance_pct}"
            )));
        }
        Ok(Self {
            target_pct,
            tolerance_pct,
            ..Self::default()
        })
    }

    fn in_band(&self, pct: f64) -> bool {
        (pct - self.target_pct).abs() <= self.tolerance_pct
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneLabel {
    MicrostructureNoise,
    Scaling,
    DataScarcity,
}

impl ZoneLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneLabel::MicrostructureNoise => "microstructure_noise",
            ZoneLabel::Scaling => "scaling",
            ZoneLabel::DataScarcity => "data_scarcity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingZone {
    pub min_delta: f64,
    pub max_delta: f64,
    /// Inclusive start, exclusive end, into the input rows.
    pub index_range: std::ops::Range<usize>,
    pub n_deltas: usize,
    pub mean_dc_pct: f64,
    pub std_dc_pct: f64,
    pub labels: Vec<ZoneLabel>,
}

pub fn detect_zone(rows: &[ThresholdSummary], cfg: &ScalingConfig) -> Result<ScalingZone> {
    let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let pcts: Vec<Option<f64>> = rows.iter().map(|r| r.dc_pct).collect();
    detect_zone_from_pct(&deltas, &pcts, cfg)
}

/// Zone entry is the first threshold whose Dc share reaches the target; the
/// zone then runs while the share stays inside the tolerance band. Blank
/// shares never qualify.
pub fn detect_zone_from_pct(deltas: &[f64], dc_pct: &[Option<f64>], cfg: &ScalingConfig) -> Result<ScalingZone> {
    if deltas.len() != dc_pct.len() {
        return Err(Error::InvalidArgument(format!(
            "{} thresholds but {} dcPct values",
            deltas.len(),
            dc_pct.len()
        )));
    }
    let start = dc_pct
        .iter()
        .position(|p| p.is_some_and(|p| p >= cfg.target_pct))
        .ok_or(Error::NoZoneFound)?;
    let end = start
        + dc_pct[start..]
            .iter()
            .take_while(|p| p.is_some_and(|p| cfg.in_band(p)))
            .count();
    if end == start {
        // entry point overshoots the band
        return Err(Error::NoZoneFound);
    }

    let values: Vec<f64> = dc_pct[start..end].iter().map(|p| p.unwrap()).collect();
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let std = match cfg.std_convention {
        StdConvention::Sample if n > 1 => (ss / (n - 1) as f64).sqrt(),
        StdConvention::Sample => 0.0,
        StdConvention::Population => (ss / n as f64).sqrt(),
    };
    let labels = (0..deltas.len())
        .map(|i| {
            if i < start {
                ZoneLabel::MicrostructureNoise
            } else if i < end {
                ZoneLabel::Scaling
            } else {
                ZoneLabel::DataScarcity
            }
        })
        .collect();

    Ok(ScalingZone {
        min_delta: deltas[start],
        max_delta: deltas[end - 1],
        index_range: start..end,
        n_deltas: n,
        mean_dc_pct: mean,
        std_dc_pct: std,
        labels,
    })
}

/// Per-point labels; without a zone every point counts as microstructure noise.
pub fn zone_labels(n_points: usize, zone: Option<&ScalingZone>) -> Vec<ZoneLabel> {
    match zone {
        Some(z) => z.labels.clone(),
        None => vec![ZoneLabel::MicrostructureNoise; n_points],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    /// Slope of log10 f against log10 δ.
    pub beta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub p_value: f64,
    pub n_points: usize,
}

/// Ordinary least squares on `(log10 δ, log10 f)`.
pub fn fit_power_law(deltas: &[f64], freqs: &[f64]) -> Result<RegressionResult> {
    if deltas.len() != freqs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} thresholds but {} frequencies",
            deltas.len(),
            freqs.len()
        )));
    }
    let n = deltas.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    if let Some(i) = freqs.iter().position(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::NonPositiveFrequency(i));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::InvalidThreshold(*d));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.log10()).collect();
    let ys: Vec<f64> = freqs.iter().map(|f| f.log10()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateAbscissa);
    }
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - beta * x).powi(2))
        .sum();
    let dof = n - 2;
    // an exact fit leaves only rounding noise in the residuals
    let exact = ss_res <= 1e-24 * syy.max(f64::MIN_POSITIVE) || syy == 0.0;
    let (r_squared, p_value) = if exact {
        (1.0, 0.0)
    } else {
        let r2 = (1.0 - ss_res / syy).clamp(0.0, 1.0);
        let se = (ss_res / dof as f64 / sxx).sqrt();
        (r2, t_sf_two_sided(beta / se, dof as u32)?.value())
    };
    Ok(RegressionResult {
        beta,
        intercept,
        r_squared,
        p_value,
        n_points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventClass {
    Tot,
    Dc,
    Os,
}

impl EventClass {
    pub const ALL: [EventClass; 3] = [EventClass::Tot, EventClass::Dc, EventClass::Os];

    pub fn as_str(self) -> &'static str {
        match self {
            EventClass::Tot => "tot",
            EventClass::Dc => "dc",
            EventClass::Os => "os",
        }
    }

    fn frequency(self, s: &ThresholdSummary) -> f64 {
        match self {
            EventClass::Tot => s.f_ev,
            EventClass::Dc => s.f_dc,
            EventClass::Os => s.f_os,
        }
    }
}

/// Fits each event class over the zone's rows.
pub fn fit_zone(rows: &[ThresholdSummary], zone: &ScalingZone) -> Vec<(EventClass, Result<RegressionResult>)> {
    let zone_rows = &rows[zone.index_range.clone()];
    let deltas: Vec<f64> = zone_rows.iter().map(|r| r.delta).collect();
    EventClass::ALL
        .iter()
        .map(|&class| {
            let freqs: Vec<f64> = zone_rows.iter().map(|r| class.frequency(r)).collect();
            (class, fit_power_law(&deltas, &freqs))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneReport {
    pub min_delta: f64,
    pub max_delta: f64,
    pub n_deltas: usize,
    pub mean_dc_pct: f64,
    pub std_dc_pct: f64,
    pub fits: Vec<(EventClass, RegressionResult)>,
}

pub fn zone_report(zone: &ScalingZone, fits: &[(EventClass, RegressionResult)]) -> ZoneReport {
    ZoneReport {
        min_delta: zone.min_delta,
        max_delta: zone.max_delta,
        n_deltas: zone.n_deltas,
        mean_dc_pct: zone.mean_dc_pct,
        std_dc_pct: zone.std_dc_pct,
        fits: fits.to_vec(),
    }
}

impl ZoneReport {
    /// `0.0045 & 0.0754 & 13 & 62.29 & 0.93`
    pub fn table_row(&self) -> String {
        format!(
            "{:.4} & {:.4} & {} & {:.2} & {:.2}",
            self.min_delta, self.max_delta, self.n_deltas, self.mean_dc_pct, self.std_dc_pct
        )
    }
}

pub const ZONE_HEADER: [&str; 5] = ["min_delta", "max_delta", "n_deltas", "mean_dc_pct", "std_dc_pct"];
pub const REGRESSION_HEADER: [&str; 5] = ["event_class", "beta", "r_squared", "p_value", "n_points"];

pub fn zone_cells(r: &ZoneReport, style: OutputStyle) -> Vec<String> {
    // a found zone always has every value, so no zero-blanking here
    let fixed = |v: f64, d: usize| match style {
        OutputStyle::Full => v.to_string(),
        OutputStyle::Table => format!("{v:.d$}"),
    };
    vec![
        fixed(r.min_delta, 4),
        fixed(r.max_delta, 4),
        r.n_deltas.to_string(),
        fixed(r.mean_dc_pct, 2),
        fixed(r.std_dc_pct, 2),
    ]
}

pub fn regression_cells(class: EventClass, fit: &RegressionResult, style: OutputStyle) -> Vec<String> {
    vec![
        class.as_str().to_string(),
        table::real(Some(fit.beta), style, Column::Fixed(2)),
        table::real(Some(fit.r_squared), style, Column::Fixed(2)),
        table::real(Some(fit.p_value), style, Column::PValue),
        fit.n_points.to_string(),
    ]
}

/// Writes the zone row; with no zone the file holds only the header.
pub fn write_zone(path: &Path, report: Option<&ZoneReport>, style: OutputStyle) -> Result<()> {
    let rows: Vec<_> = report.map(|r| zone_cells(r, style)).into_iter().collect();
    table::write_csv(path, &ZONE_HEADER, &rows)
}

pub fn write_regression(path: &Path, fits: &[(EventClass, RegressionResult)], style: OutputStyle) -> Result<()> {
    let rows: Vec<_> = fits.iter().map(|(c, f)| regression_cells(*c, f, style)).collect();
    table::write_csv(path, &REGRESSION_HEADER, &rows)
}

/// One row of `zone.csv` as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneRow {
    pub min_delta: f64,
    pub max_delta: f64,
    pub n_deltas: usize,
    pub mean_dc_pct: f64,
    pub std_dc_pct: f64,
}

/// One row of `regression.csv`; blank cells read as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub event_class: String,
    pub beta: Option<f64>,
    pub r_squared: Option<f64>,
    pub p_value: Option<f64>,
    pub n_points: u64,
}

/// `None` when the file holds only the header (no zone found).
pub fn read_zone(path: &Path) -> Result<Option<ZoneRow>> {
    let records = table::read_csv(path, &ZONE_HEADER)?;
    let Some(rec) = records.first() else {
        return Ok(None);
    };
    let real = |col: usize| -> Result<f64> {
        table::parse_real(rec.get(col).unwrap_or(""))
            .map_err(|m| table::parse_err(2, ZONE_HEADER[col], m))?
            .ok_or_else(|| table::parse_err(2, ZONE_HEADER[col], "blank".into()))
    };
    let n = table::parse_count(rec.get(2).unwrap_or("")).map_err(|m| table::parse_err(2, "n_deltas", m))?;
    Ok(Some(ZoneRow {
        min_delta: real(0)?,
        max_delta: real(1)?,
        n_deltas: n as usize,
        mean_dc_pct: real(3)?,
        std_dc_pct: real(4)?,
    }))
}

pub fn read_regression(path: &Path) -> Result<Vec<RegressionRow>> {
    let records = table::read_csv(path, &REGRESSION_HEADER)?;
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let line = i as u64 + 2;
            let real = |col: usize| {
                table::parse_real(rec.get(col).unwrap_or(""))
                    .map_err(|m| table::parse_err(line, REGRESSION_HEADER[col], m))
            };
            let n_points = table::parse_count(rec.get(4).unwrap_or(""))
                .map_err(|m| table::parse_err(line, "n_points", m))?;
            Ok(RegressionRow {
                event_class: rec.get(0).unwrap_or("").to_string(),
                beta: real(1)?,
                r_squared: real(2)?,
                p_value: real(3)?,
                n_points,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1e-5 * 10f64.powf(5.0 * i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn constant_target_spans_full_grid() {
        let d = grid(50);
        let pct = vec![Some(61.21); 50];
        let z = detect_zone_from_pct(&d, &pct, &ScalingConfig::default()).unwrap();
        assert_eq!(z.index_range, 0..50);
        assert_eq!(z.n_deltas, 50);
        assert!(z.labels.iter().all(|l| *l == ZoneLabel::Scaling));
        assert!(z.std_dc_pct < 1e-12);
    }

    #[test]
    fn below_target_is_no_zone() {
        let d = grid(10);
        let pct = vec![Some(55.0); 10];
        assert!(matches!(
            detect_zone_from_pct(&d, &pct, &ScalingConfig::default()),
            Err(Error::NoZoneFound)
        ));
        assert!(zone_labels(10, None).iter().all(|l| *l == ZoneLabel::MicrostructureNoise));
    }

    #[test]
    fn zone_stops_at_first_excursion_or_blank() {
        let d = grid(8);
        let pct = [50.0, 58.0, 61.5, 62.0, 63.7, 64.0, 62.0, 61.0].map(Some);
        let z = detect_zone_from_pct(&d, &pct, &ScalingConfig::default()).unwrap();
        assert_eq!(z.index_range, 2..5);
        use ZoneLabel::*;
        assert_eq!(
            z.labels,
            vec![MicrostructureNoise, MicrostructureNoise, Scaling, Scaling, Scaling, DataScarcity, DataScarcity, DataScarcity]
        );

        let mut pct = pct.to_vec();
        pct[3] = None;
        let z = detect_zone_from_pct(&d, &pct, &ScalingConfig::default()).unwrap();
        assert_eq!(z.index_range, 2..3);
    }

    #[test]
    fn entry_above_band_is_no_zone() {
        let d = grid(3);
        let pct = [50.0, 70.0, 62.0].map(Some);
        assert!(detect_zone_from_pct(&d, &pct, &ScalingConfig::default()).is_err());
    }

    #[test]
    fn std_conventions() {
        let d = grid(4);
        let pct = [61.5, 62.5, 61.5, 62.5].map(Some);
        let mut cfg = ScalingConfig::default();
        let z = detect_zone_from_pct(&d, &pct, &cfg).unwrap();
        assert!((z.mean_dc_pct - 62.0).abs() < 1e-12);
        // sum of squares 1.0 over 3
        assert!((z.std_dc_pct - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        cfg.std_convention = StdConvention::Population;
        let z = detect_zone_from_pct(&d, &pct, &cfg).unwrap();
        assert!((z.std_dc_pct - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_inverse_square() {
        let d = grid(7);
        let f: Vec<f64> = d.iter().map(|x| x.powi(-2)).collect();
        let fit = fit_power_law(&d, &f).unwrap();
        assert!((fit.beta + 2.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
        assert_eq!(fit.p_value, 0.0);
    }

    #[test]
    fn noisy_fit_has_valid_p_value() {
        let d = grid(5);
        let f: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(i, x)| x.powf(-1.5) * if i % 2 == 0 { 1.05 } else { 0.95 })
            .collect();
        let fit = fit_power_law(&d, &f).unwrap();
        assert!((fit.beta + 1.5).abs() < 0.05);
        assert!(fit.r_squared > 0.99 && fit.r_squared < 1.0);
        assert!(fit.p_value > 0.0 && fit.p_value < 1e-3);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::TooFewPoints(2))));
        assert!(matches!(
            fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]),
            Err(Error::NonPositiveFrequency(1))
        ));
        assert!(matches!(
            fit_power_law(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateAbscissa)
        ));
    }

    #[test]
    fn report_row_format() {
        let zone = ScalingZone {
            min_delta: 4.498e-3,
            max_delta: 7.543e-2,
            index_range: 20..33,
            n_deltas: 13,
            mean_dc_pct: 62.2908,
            std_dc_pct: 0.9296,
            labels: Vec::new(),
        };
        let r = zone_report(&zone, &[]);
        assert_eq!(r.table_row(), "0.0045 & 0.0754 & 13 & 62.29 & 0.93");
        assert_eq!(zone_cells(&r, OutputStyle::Table), ["0.0045", "0.0754", "13", "62.29", "0.93"]);
        let single = ZoneReport { std_dc_pct: 0.0, ..r };
        assert_eq!(zone_cells(&single, OutputStyle::Table)[4], "0.00");
    }

    #[test]
    fn zone_and_regression_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = grid(6);
        let pct = vec![Some(62.0); 6];
        let zone = detect_zone_from_pct(&d, &pct, &ScalingConfig::default()).unwrap();
        let f: Vec<f64> = d.iter().map(|x| 3.0 * x.powf(-1.9)).collect();
        let fits = vec![(EventClass::Tot, fit_power_law(&d, &f).unwrap())];
        let report = zone_report(&zone, &fits);
        let zp = dir.path().join("zone.csv");
        let rp = dir.path().join("regression.csv");
        write_zone(&zp, Some(&report), OutputStyle::Full).unwrap();
        write_regression(&rp, &fits, OutputStyle::Full).unwrap();
        let z = read_zone(&zp).unwrap().unwrap();
        assert_eq!((z.min_delta, z.max_delta, z.n_deltas, z.mean_dc_pct), (d[0], d[5], 6, 62.0));
        let back = read_regression(&rp).unwrap();
        assert_eq!(back[0].event_class, "tot");
        assert_eq!(back[0].beta, Some(fits[0].1.beta));

        write_zone(&zp, None, OutputStyle::Full).unwrap();
        assert_eq!(read_zone(&zp).unwrap(), None);
    }
}
