//! Cell formatting shared by the CSV writers.
//!
//! `Full` writes shortest round-trip floats and leaves undefined values
//! blank. `Table` mimics the published tables: 3-digit scientific notation
//! for thresholds and frequencies, fixed decimals elsewhere, `<0.0001` for
//! tiny p-values, and real-valued exact zeros rendered as blanks.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputStyle {
    #[default]
    Full,
    Table,
}

/// Rendering of a real-valued column under [`OutputStyle::Table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Sci3,
    Fixed(usize),
    PValue,
}

pub const PVALUE_FLOOR: f64 = 1e-4;

/// C-style `%.3e`: `1.265e-05`, `1.000e+00`.
pub fn sci3(v: f64) -> String {
    let s = format!("{v:.3e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// Counts are always written, zeros included.
pub fn count(n: u64, _style: OutputStyle) -> String {
    n.to_string()
}

pub fn real(v: Option<f64>, style: OutputStyle, column: Column) -> String {
    let Some(v) = v else {
        return String::new();
    };
    match style {
        OutputStyle::Full => v.to_string(),
        OutputStyle::Table => match column {
            Column::PValue if v < PVALUE_FLOOR => format!("<{PVALUE_FLOOR}"),
            _ if v == 0.0 => String::new(),
            Column::Sci3 => sci3(v),
            Column::Fixed(d) => format!("{v:.d$}"),
            Column::PValue => format!("{v:.2}"),
        },
    }
}

/// Threshold column: always populated.
pub fn delta(v: f64, style: OutputStyle) -> String {
    match style {
        OutputStyle::Full => v.to_string(),
        OutputStyle::Table => sci3(v),
    }
}

/// Parses a cell written by [`real`]. Blank cells are `None`; censored
/// cells such as `<0.0001` read as `0`.
pub fn parse_real(cell: &str) -> std::result::Result<Option<f64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    if cell.starts_with('<') {
        return Ok(Some(0.0));
    }
    cell.parse::<f64>().map(Some).map_err(|e| format!("{cell:?}: {e}"))
}

pub fn parse_count(cell: &str) -> std::result::Result<u64, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(0);
    }
    cell.parse::<u64>().map_err(|e| format!("{cell:?}: {e}"))
}

/// Writes a header and rows of pre-rendered cells.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_rows(&mut out, header, rows).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_rows<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a CSV produced by [`write_csv`], checking the header exactly.
pub fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let found = rdr.headers()?.clone();
    if found.len() != header.len() || found.iter().zip(header).any(|(a, b)| a != *b) {
        let missing = header
            .iter()
            .find(|h| !found.iter().any(|f| f == **h))
            .unwrap_or(&header[0]);
        return Err(Error::MissingColumn((*missing).to_string()));
    }
    rdr.records().map(|r| r.map_err(Error::from)).collect()
}

pub(crate) fn parse_err(line: u64, column: &str, message: String) -> Error {
    Error::Parse {
        line,
        column: column.to_string(),
        message,
    }
}
