//! Canonical daily series and calendar gap auditing.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate};

use crate::{Error, Result};

/// Calendar month key, ordered chronologically and displayed as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn of(date: NaiveDate) -> Self {
        YearMonth {
            year: date.year(),
            month: date.month(),
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for YearMonth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One daily observation; `None` marks a missing value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Observation {
    pub date: NaiveDate,
    pub value: Option<f64>,
}

impl Observation {
    pub fn new(date: NaiveDate, value: Option<f64>) -> Self {
        Observation { date, value }
    }
}

/// Dated observations as read from input, possibly with missing values.
///
/// Records are strictly ascending by date and every present value is finite
/// and non-negative.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RawSeries {
    series_id: String,
    records: Vec<Observation>,
}

impl RawSeries {
    /// Sorts `records` by date and validates them.
    pub fn new(series_id: impl Into<String>, mut records: Vec<Observation>) -> Result<Self> {
        records.sort_by_key(|r| r.date);
        for pair in records.windows(2) {
            if pair[0].date == pair[1].date {
                return Err(Error::UnorderedDates { date: pair[1].date });
            }
        }
        for r in &records {
            if let Some(v) = r.value {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidValue { value: v });
                }
            }
        }
        Ok(RawSeries {
            series_id: series_id.into(),
            records,
        })
    }

    pub fn series_id(&self) -> &str {
        &self.series_id
    }

    pub fn records(&self) -> &[Observation] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Present values in date order.
    pub fn present_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter_map(|r| r.value)
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.records.first().map(|r| r.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.records.last().map(|r| r.date)
    }
}

/// Missing-day tallies between the first and last record of a series.
///
/// Every month and year touched by the span has an entry, zero included.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapReport {
    pub missing_dates: Vec<NaiveDate>,
    pub per_month_missing: BTreeMap<YearMonth, usize>,
    pub per_year_missing: BTreeMap<i32, usize>,
}

impl GapReport {
    pub fn total_missing(&self) -> usize {
        self.missing_dates.len()
    }
}

/// Days in `[first, last]` that are absent or carry no value, with monthly
/// and yearly counts.
pub fn calendar_audit(series: &RawSeries) -> Result<GapReport> {
    let (first, last) = match (series.first_date(), series.last_date()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Empty),
    };
    let mut per_month_missing = BTreeMap::new();
    let mut per_year_missing = BTreeMap::new();
    let mut missing_dates = Vec::new();
    let mut records = series.records().iter().peekable();

    for day in first.iter_days().take_while(|d| *d <= last) {
        let present = match records.peek() {
            Some(r) if r.date == day => {
                let r = records.next().expect("peeked");
                r.value.is_some()
            }
            _ => false,
        };
        let month = per_month_missing.entry(YearMonth::of(day)).or_insert(0);
        let year = per_year_missing.entry(day.year()).or_insert(0);
        if !present {
            *month += 1;
            *year += 1;
            missing_dates.push(day);
        }
    }

    Ok(GapReport {
        missing_dates,
        per_month_missing,
        per_year_missing,
    })
}
