//! Loading and validating midprice series from delimited text.
//!
//! Thresholding downstream happens in natural-log price space, so every
//! price must be strictly positive. Duplicate timestamps are accepted as-is;
//! only a decreasing timestamp is rejected.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One midprice sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    /// Epoch milliseconds, UTC.
    pub timestamp: i64,
    pub price: f64,
}

/// An ordered, validated midprice series.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    ticks: Vec<Tick>,
}

impl TickSeries {
    /// Validates ordering and positivity. Indices in errors are 1-based
    /// row numbers (the header is not counted).
    pub fn new(ticks: Vec<Tick>) -> Result<Self> {
        if ticks.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, t) in ticks.iter().enumerate() {
            let line = i as u64 + 1;
            if !(t.price > 0.0) || !t.price.is_finite() {
                return Err(Error::NonPositivePrice { line });
            }
            if i > 0 && t.timestamp < ticks[i - 1].timestamp {
                return Err(Error::TimestampRegression { line });
            }
        }
        Ok(Self { ticks })
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    pub fn n_ticks(&self) -> usize {
        self.ticks.len()
    }

    pub fn prices(&self) -> impl Iterator<Item = f64> + '_ {
        self.ticks.iter().map(|t| t.price)
    }
}

/// Column mapping for delimited input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub timestamp: String,
    pub price: String,
    pub delimiter: u8,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".to_string(),
            price: "price".to_string(),
            delimiter: b',',
        }
    }
}

pub fn load_ticks(path: impl AsRef<Path>, format: &ColumnMap) -> Result<TickSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_ticks(file, format)
}

/// Parses ticks from any reader. Error line numbers refer to physical
/// lines of the input, header included.
pub fn read_ticks<R: Read>(reader: R, format: &ColumnMap) -> Result<TickSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let ts_col = column(&format.timestamp)?;
    let px_col = column(&format.price)?;

    let mut ticks: Vec<Tick> = Vec::new();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |col: usize, name: &str| {
            record.get(col).ok_or_else(|| Error::Parse {
                line,
                column: name.to_string(),
                message: "missing field".to_string(),
            })
        };
        let ts_raw = field(ts_col, &format.timestamp)?;
        let timestamp: i64 = ts_raw.parse().map_err(|e| Error::Parse {
            line,
            column: format.timestamp.clone(),
            message: format!("{ts_raw:?}: {e}"),
        })?;
        let px_raw = field(px_col, &format.price)?;
        let price: f64 = px_raw.parse().map_err(|e| Error::Parse {
            line,
            column: format.price.clone(),
            message: format!("{px_raw:?}: {e}"),
        })?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::NonPositivePrice { line });
        }
        if let Some(prev) = ticks.last() {
            if timestamp < prev.timestamp {
                return Err(Error::TimestampRegression { line });
            }
        }
        ticks.push(Tick { timestamp, price });
    }

    if ticks.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(TickSeries { ticks })
}

/// Writes `timestamp,price` with shortest round-trip float formatting, so
/// reloading yields the identical series.
pub fn write_ticks(path: impl AsRef<Path>, series: &TickSeries) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_ticks_to(&mut out, series).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_ticks_to<W: Write>(out: &mut W, series: &TickSeries) -> std::io::Result<()> {
    writeln!(out, "timestamp,price")?;
    for t in &series.ticks {
        writeln!(out, "{},{}", t.timestamp, t.price)?;
    }
    Ok(())
}

/// Natural log of every price, order preserved.
pub fn to_log_prices(series: &TickSeries) -> Vec<f64> {
    series.ticks.iter().map(|t| t.price.ln()).collect()
}
