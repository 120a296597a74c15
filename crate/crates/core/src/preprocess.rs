//! Tiered median imputation.
//!
//! Missing days inside the observed span are resolved in two passes:
//!
//! 1. A month whose missing count is at most [`ImputationPolicy::month_gap_max`]
//!    and which has present values gets its gaps filled with the month median.
//! 2. Whatever the month pass left open is counted per year. A year whose
//!    open count is at most [`ImputationPolicy::year_gap_max`] and which has
//!    present values gets those gaps filled with the year median.
//!
//! Everything else is removed, as are missing days before the first or after
//! the last present value. Medians are always taken over the original present
//! values, so fills stay inside the observed range and a second pass over the
//! output changes nothing.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate};

use crate::order::median;
use crate::series::{calendar_audit, Observation, RawSeries, YearMonth};
use crate::{Error, Result};

/// Gap-size thresholds for the two imputation passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ImputationPolicy {
    pub month_gap_max: u32,
    pub year_gap_max: u32,
}

impl ImputationPolicy {
    pub const DEFAULT_MONTH_GAP_MAX: u32 = 7;
    pub const DEFAULT_YEAR_GAP_MAX: u32 = 60;

    pub fn new(month_gap_max: u32, year_gap_max: u32) -> Result<Self> {
        if month_gap_max > 31 || year_gap_max < month_gap_max || year_gap_max > 366 {
            return Err(Error::InvalidPolicy {
                month_gap_max,
                year_gap_max,
            });
        }
        Ok(ImputationPolicy {
            month_gap_max,
            year_gap_max,
        })
    }
}

impl Default for ImputationPolicy {
    fn default() -> Self {
        ImputationPolicy {
            month_gap_max: Self::DEFAULT_MONTH_GAP_MAX,
            year_gap_max: Self::DEFAULT_YEAR_GAP_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DailyValue {
    pub date: NaiveDate,
    pub value: f64,
}

/// Gap-free series: ascending dates, every value present.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CleanSeries {
    series_id: String,
    values: Vec<DailyValue>,
}

impl CleanSeries {
    pub fn series_id(&self) -> &str {
        &self.series_id
    }

    pub fn values(&self) -> &[DailyValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The bare values in date order.
    pub fn observations(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value).collect()
    }

    /// Re-wraps the clean series as raw input, e.g. to impute it again.
    pub fn to_raw(&self) -> RawSeries {
        let records = self
            .values
            .iter()
            .map(|v| Observation::new(v.date, Some(v.value)))
            .collect();
        RawSeries::new(self.series_id.clone(), records).expect("clean series is valid")
    }
}

/// One imputed day and the median that supplied it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Fill {
    pub date: NaiveDate,
    pub value: f64,
    pub median: f64,
}

/// Inclusive range of consecutive removed days.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CleanCounts {
    pub missing: usize,
    pub filled_month: usize,
    pub filled_year: usize,
    pub removed: usize,
}

/// Audit trail of every fill and removal made by [`impute`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CleanReport {
    pub policy: ImputationPolicy,
    pub counts: CleanCounts,
    pub filled_month: Vec<Fill>,
    pub filled_year: Vec<Fill>,
    pub removed: Vec<DateRange>,
}

enum Resolution {
    Month(f64),
    Year(f64),
    Removed,
}

pub fn impute(series: &RawSeries, policy: ImputationPolicy) -> Result<(CleanSeries, CleanReport)> {
    let gaps = calendar_audit(series)?;
    let present: Vec<(NaiveDate, f64)> = series
        .records()
        .iter()
        .filter_map(|r| r.value.map(|v| (r.date, v)))
        .collect();
    let (span_start, span_end) = match (present.first(), present.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(Error::Empty),
    };

    let mut by_month: BTreeMap<YearMonth, Vec<f64>> = BTreeMap::new();
    let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for &(date, v) in &present {
        by_month.entry(YearMonth::of(date)).or_default().push(v);
        by_year.entry(date.year()).or_default().push(v);
    }
    let month_median: BTreeMap<YearMonth, f64> =
        by_month.iter().map(|(k, v)| (*k, median(v))).collect();
    let year_median: BTreeMap<i32, f64> = by_year.iter().map(|(k, v)| (*k, median(v))).collect();

    let interior: Vec<NaiveDate> = gaps
        .missing_dates
        .iter()
        .copied()
        .filter(|d| *d > span_start && *d < span_end)
        .collect();

    let mut month_missing: BTreeMap<YearMonth, u32> = BTreeMap::new();
    for d in &interior {
        *month_missing.entry(YearMonth::of(*d)).or_default() += 1;
    }
    let month_fillable = |ym: YearMonth| -> Option<f64> {
        let missing = month_missing.get(&ym).copied().unwrap_or(0);
        if missing <= policy.month_gap_max {
            month_median.get(&ym).copied()
        } else {
            None
        }
    };

    let mut year_open: BTreeMap<i32, u32> = BTreeMap::new();
    for d in &interior {
        if month_fillable(YearMonth::of(*d)).is_none() {
            *year_open.entry(d.year()).or_default() += 1;
        }
    }

    let mut resolution: BTreeMap<NaiveDate, Resolution> = BTreeMap::new();
    for d in &interior {
        let r = if let Some(m) = month_fillable(YearMonth::of(*d)) {
            Resolution::Month(m)
        } else {
            let open = year_open.get(&d.year()).copied().unwrap_or(0);
            match year_median.get(&d.year()) {
                Some(&m) if open <= policy.year_gap_max => Resolution::Year(m),
                _ => Resolution::Removed,
            }
        };
        resolution.insert(*d, r);
    }

    let mut filled_month = Vec::new();
    let mut filled_year = Vec::new();
    let mut removed_days = Vec::new();
    for d in &gaps.missing_dates {
        match resolution.get(d) {
            Some(Resolution::Month(m)) => filled_month.push(Fill {
                date: *d,
                value: *m,
                median: *m,
            }),
            Some(Resolution::Year(m)) => filled_year.push(Fill {
                date: *d,
                value: *m,
                median: *m,
            }),
            Some(Resolution::Removed) | None => removed_days.push(*d),
        }
    }

    let mut values: Vec<DailyValue> = present
        .iter()
        .map(|&(date, value)| DailyValue { date, value })
        .chain(filled_month.iter().chain(&filled_year).map(|f| DailyValue {
            date: f.date,
            value: f.value,
        }))
        .collect();
    values.sort_by_key(|v| v.date);

    let counts = CleanCounts {
        missing: gaps.missing_dates.len(),
        filled_month: filled_month.len(),
        filled_year: filled_year.len(),
        removed: removed_days.len(),
    };
    let report = CleanReport {
        policy,
        counts,
        filled_month,
        filled_year,
        removed: contiguous_ranges(&removed_days),
    };
    let clean = CleanSeries {
        series_id: String::from(series.series_id()),
        values,
    };
    Ok((clean, report))
}

fn contiguous_ranges(days: &[NaiveDate]) -> Vec<DateRange> {
    let mut out: Vec<DateRange> = Vec::new();
    for &d in days {
        match out.last_mut() {
            Some(r) if r.end.succ_opt() == Some(d) => r.end = d,
            _ => out.push(DateRange { start: d, end: d }),
        }
    }
    out
}

/// Minimum and maximum with the date each first occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub min_date: NaiveDate,
    pub max_date: NaiveDate,
}

pub fn extremes_summary(series: &CleanSeries) -> Result<Extremes> {
    let first = series.values().first().ok_or(Error::Empty)?;
    let mut ext = Extremes {
        min: first.value,
        max: first.value,
        min_date: first.date,
        max_date: first.date,
    };
    for v in &series.values()[1..] {
        if v.value < ext.min {
            ext.min = v.value;
            ext.min_date = v.date;
        }
        if v.value > ext.max {
            ext.max = v.value;
            ext.max_date = v.date;
        }
    }
    Ok(ext)
}
