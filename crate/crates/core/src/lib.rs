//! Fractal statistics for daily air-quality index series.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numerical piece of
//! the analysis pipeline:
//!
//! - [`series`]: the canonical dated series and its calendar gap audit.
//! - [`preprocess`]: tiered month/year median imputation with an audit trail.
//! - [`distribution`]: descriptive statistics, histogram, Q-Q pairs and the
//!   one-sample Kolmogorov-Smirnov test against a fitted normal.
//! - [`normal`]: standard normal CDF and its inverse.
//! - [`fractal`]: per-observation fractal dimension, fractal spectrum,
//!   scale bands and the scale-disparity risk score.
//! - [`health`]: AQI health categories and cross-city rankings.
//!
//! File formats, CSV parsing and the command line live in the `aqi-fractal`
//! companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod distribution;
pub mod error;
pub mod fractal;
pub mod health;
pub mod normal;
pub mod preprocess;
pub mod series;

mod order;

pub use error::{Error, Result};
