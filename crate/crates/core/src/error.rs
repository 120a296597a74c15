use core::fmt;

use chrono::NaiveDate;

pub type Result<T> = core::result::Result<T, Error>;

/// Failures of the numerical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that needs data was handed none.
    Empty,
    /// Fewer observations than the operation needs.
    TooFew { needed: usize, got: usize },
    /// A value is NaN, infinite, or negative where that is not allowed.
    InvalidValue { value: f64 },
    /// Series dates are not strictly ascending (duplicate or out of order).
    UnorderedDates { date: NaiveDate },
    /// An argument lies outside the domain of a function.
    Domain { what: &'static str, value: f64 },
    /// Zero-variance data given to a fit that needs spread.
    Degenerate,
    /// Imputation thresholds violate `0 <= month <= 31`, `month <= year <= 366`.
    InvalidPolicy {
        month_gap_max: u32,
        year_gap_max: u32,
    },
    /// A histogram was requested with zero bins.
    ZeroBins,
    /// A value lies below the fractal reference minimum.
    BelowTheta { value: f64, theta: f64 },
    /// Every observation was excluded from the fractal analysis.
    NoRecords,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty => f.write_str("empty input"),
            Error::TooFew { needed, got } => {
                write!(f, "need at least {needed} observations, got {got}")
            }
            Error::InvalidValue { value } => write!(f, "invalid observation value {value}"),
            Error::UnorderedDates { date } => {
                write!(f, "dates must be strictly ascending (offending date {date})")
            }
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Degenerate => f.write_str("zero-variance data cannot be fitted"),
            Error::InvalidPolicy {
                month_gap_max,
                year_gap_max,
            } => write!(
                f,
                "invalid imputation policy: month_gap_max={month_gap_max}, year_gap_max={year_gap_max}"
            ),
            Error::ZeroBins => f.write_str("histogram needs at least one bin"),
            Error::BelowTheta { value, theta } => {
                write!(f, "value {value} is below the reference minimum {theta}")
            }
            Error::NoRecords => f.write_str("no observation survives the fractal exclusions"),
        }
    }
}

impl core::error::Error for Error {}
