//! Daily series CSV reading and writing.
//!
//! Accepted layouts, chosen by header width:
//!
//! ```text
//! date,value            2017-01-01,345.0
//! index,date,value      0,2017-01-01,345.0
//! ```
//!
//! Dates are ISO `YYYY-MM-DD`; an empty value cell marks a missing day.

use aqi_fractal_core::series::{Observation, RawSeries};
use chrono::NaiveDate;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header must have 2 (date,value) or 3 (index,date,value) columns, found {0}")]
    Layout(usize),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: malformed date {text:?} (expected YYYY-MM-DD)")]
    Date { row: usize, text: String },
    #[error("row {row}: invalid value {text:?} (expected a non-negative number)")]
    Value { row: usize, text: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
}

/// Parses a strict ISO calendar date.
fn parse_date(text: &str) -> Option<NaiveDate> {
    let b = text.as_bytes();
    let shaped = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if !shaped {
        return None;
    }
    NaiveDate::from_ymd_opt(
        text[0..4].parse().ok()?,
        text[5..7].parse().ok()?,
        text[8..10].parse().ok()?,
    )
}

fn parse_value(text: &str) -> Option<Option<f64>> {
    if text.is_empty() {
        return Some(None);
    }
    let v: f64 = text.parse().ok()?;
    (v.is_finite() && v >= 0.0).then_some(Some(v))
}

/// Reads a series from CSV bytes. Rows may come in any order; the result is
/// sorted by date. Row numbers in errors count data rows from 1.
pub fn parse_series(csv_bytes: &[u8], series_id: &str) -> Result<RawSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_bytes);
    let width = reader.headers()?.len();
    let (date_col, value_col) = match width {
        2 => (0, 1),
        3 => (1, 2),
        n => return Err(IngestError::Layout(n)),
    };

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        if row.len() != width {
            return Err(IngestError::RowWidth {
                row: row_no,
                expected: width,
                found: row.len(),
            });
        }
        let date_text = &row[date_col];
        let date = parse_date(date_text).ok_or_else(|| IngestError::Date {
            row: row_no,
            text: date_text.to_owned(),
        })?;
        let value_text = &row[value_col];
        let value = parse_value(value_text).ok_or_else(|| IngestError::Value {
            row: row_no,
            text: value_text.to_owned(),
        })?;
        records.push(Observation::new(date, value));
    }

    RawSeries::new(series_id, records).map_err(|e| match e {
        aqi_fractal_core::Error::UnorderedDates { date } => IngestError::DuplicateDate(date),
        // Values were screened above.
        other => unreachable!("unexpected validation failure: {other}"),
    })
}

/// Writes a series in the two-column layout. Values use Rust's shortest
/// round-trip formatting so that re-parsing reproduces them exactly.
pub fn write_series(series: &RawSeries) -> String {
    let mut out = String::from("date,value\n");
    for r in series.records() {
        out.push_str(&r.date.format("%Y-%m-%d").to_string());
        out.push(',');
        if let Some(v) = r.value {
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}
