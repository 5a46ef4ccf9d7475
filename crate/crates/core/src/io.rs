//! CSV ingestion and output of series matrices.

use std::fs;
use std::path::Path;

use crate::analysis::InputKind;
use crate::error::{Error, Result};
use crate::report::fmt_sig;
use crate::spectral::SeriesMatrix;

/// Parsed CSV: the data plus the header names if a header row was present.
#[derive(Debug, Clone)]
pub struct CsvSeries {
    pub series: SeriesMatrix,
    pub header: Option<Vec<String>>,
    pub kind: InputKind,
}

/// Read a comma-separated file: one row per time point, an optional header
/// row (detected when the first row is not entirely numeric), LF or CRLF.
pub fn ingest_csv(path: &Path, kind: InputKind) -> Result<CsvSeries> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
    parse_csv(&text, kind)
}

pub fn parse_csv(text: &str, kind: InputKind) -> Result<CsvSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = i + 1;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, ()>> = record
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| ()))
            .collect();
        if i == 0 && parsed.iter().any(|p| p.is_err()) {
            header = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: row_no,
                expected,
                found: record.len(),
            });
        }
        let mut values = Vec::with_capacity(expected);
        for (c, (cell, p)) in record.iter().zip(parsed).enumerate() {
            match p {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(_) => return Err(Error::NonFinite { row: row_no, col: c + 1 }),
                Err(()) => {
                    return Err(Error::NonNumeric {
                        row: row_no,
                        col: c + 1,
                        cell: cell.to_string(),
                    })
                }
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(CsvSeries {
        series: SeriesMatrix::from_rows(&rows)?,
        header,
        kind,
    })
}

/// Render a series as CSV with an optional header.
pub fn series_to_csv(series: &SeriesMatrix, header: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for t in 0..series.n() {
        let row: Vec<String> = series.row(t).into_iter().map(fmt_sig).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
