//! Per-observation fractal dimension and the statistics built on it.
//!
//! For a sample sorted ascending with ordinal ranks `1..=n` and reference
//! minimum `θ`, each observation gets
//!
//! ```text
//! α = rank / n
//! λ = 1 − ln(1 − α) / ln(x / θ)
//! S = 1 / ln(x / θ)
//! ```
//!
//! Observations equal to `θ` (zero denominator) and the top-ranked one
//! (`α = 1`, where `ln 0` diverges) carry no finite λ and are excluded.
//! λ does not depend on the logarithm base; `S` is defined with the natural
//! logarithm.
//!
//! On exact Pareto quantiles `x = θ (1 − α)^(−1/a)` every λ equals `1 + a`.

use alloc::vec::Vec;

use libm::{log, pow};

use crate::distribution::descriptive_stats;
use crate::order::mean;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FractalRecord {
    pub x: f64,
    pub rank: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FractalAnalysis {
    pub theta: f64,
    pub n_input: usize,
    /// Ascending in `x` (and in rank).
    pub records: Vec<FractalRecord>,
    pub excluded_min: usize,
    pub excluded_top: usize,
}

/// Ranks the sample and computes `(α, λ, S)` for every observation that
/// admits them.
///
/// `theta_override` replaces the sample minimum as reference; every value
/// must then be at least that large.
pub fn compute_fractal_records(
    values: &[f64],
    theta_override: Option<f64>,
) -> Result<FractalAnalysis> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFew { needed: 3, got: n });
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidValue { value: bad });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let theta = theta_override.unwrap_or(sorted[0]);
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Domain {
            what: "reference minimum",
            value: theta,
        });
    }
    if sorted[0] < theta {
        return Err(Error::BelowTheta {
            value: sorted[0],
            theta,
        });
    }

    let excluded_min = sorted.iter().take_while(|&&x| x == theta).count();
    let total = n as f64;
    let records: Vec<FractalRecord> = sorted
        .iter()
        .enumerate()
        .take(n - 1)
        .skip(excluded_min)
        .map(|(i, &x)| {
            let rank = i + 1;
            let alpha = rank as f64 / total;
            let (lambda, scale) = lambda_and_scale(x, theta, alpha);
            FractalRecord {
                x,
                rank,
                alpha,
                lambda,
                scale,
            }
        })
        .collect();
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(FractalAnalysis {
        theta,
        n_input: n,
        records,
        excluded_min,
        excluded_top: 1,
    })
}

fn lambda_and_scale(x: f64, theta: f64, alpha: f64) -> (f64, f64) {
    let log_ratio = log(x / theta);
    (1.0 - log(1.0 - alpha) / log_ratio, 1.0 / log_ratio)
}

/// Descriptive statistics of the λ column.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FractalSummary {
    pub n: usize,
    pub mean_lambda: f64,
    /// n−1 divisor; `None` for a single record.
    pub std_dev: Option<f64>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn fractal_summary(analysis: &FractalAnalysis) -> Result<FractalSummary> {
    let lambdas: Vec<f64> = analysis.records.iter().map(|r| r.lambda).collect();
    let s = descriptive_stats(&lambdas).map_err(|_| Error::NoRecords)?;
    Ok(FractalSummary {
        n: s.n,
        mean_lambda: s.mean,
        std_dev: s.std_dev,
        min: s.min,
        median: s.median,
        max: s.max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectrumPoint {
    pub scale: f64,
    pub lambda: f64,
}

/// `(S, λ)` pairs ascending in scale; ties keep ascending-x order.
pub fn spectrum_points(analysis: &FractalAnalysis) -> Vec<SpectrumPoint> {
    by_scale(&analysis.records)
        .into_iter()
        .map(|r| SpectrumPoint {
            scale: r.scale,
            lambda: r.lambda,
        })
        .collect()
}

fn by_scale(records: &[FractalRecord]) -> Vec<FractalRecord> {
    let mut out = records.to_vec();
    out.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ScaleBand {
    Small,
    Medium,
    Large,
}

/// Records split into three contiguous scale bands.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleBands {
    pub small: Vec<FractalRecord>,
    pub medium: Vec<FractalRecord>,
    pub large: Vec<FractalRecord>,
}

/// Equal-count tertiles over ascending scale. The remainder goes to the
/// small band first, then medium. Since `S` falls as `x` grows, the small
/// band holds the largest observations.
pub fn partition_scales(analysis: &FractalAnalysis) -> Result<ScaleBands> {
    let n = analysis.records.len();
    if n < 3 {
        return Err(Error::TooFew { needed: 3, got: n });
    }
    let base = n / 3;
    let rem = n % 3;
    let small_len = base + usize::from(rem >= 1);
    let medium_len = base + usize::from(rem >= 2);

    let mut ordered = by_scale(&analysis.records);
    let large = ordered.split_off(small_len + medium_len);
    let medium = ordered.split_off(small_len);
    Ok(ScaleBands {
        small: ordered,
        medium,
        large,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScaleBandStats {
    pub band: ScaleBand,
    pub count: usize,
    /// Mean observation value.
    pub a: f64,
    /// Mean λ.
    pub b: f64,
    /// `a^b`
    pub ruggedness: f64,
}

impl ScaleBandStats {
    pub fn from_means(band: ScaleBand, count: usize, a: f64, b: f64) -> Self {
        ScaleBandStats {
            band,
            count,
            a,
            b,
            ruggedness: pow(a, b),
        }
    }
}

pub fn band_stats(records: &[FractalRecord], band: ScaleBand) -> Result<ScaleBandStats> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let xs: Vec<f64> = records.iter().map(|r| r.x).collect();
    let lambdas: Vec<f64> = records.iter().map(|r| r.lambda).collect();
    Ok(ScaleBandStats::from_means(
        band,
        records.len(),
        mean(&xs),
        mean(&lambdas),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScaleDisparityReport {
    pub small: ScaleBandStats,
    pub medium: ScaleBandStats,
    pub large: ScaleBandStats,
    /// Small-band ruggedness minus large-band ruggedness.
    pub disparity: f64,
}

impl ScaleDisparityReport {
    pub fn from_bands(
        small: ScaleBandStats,
        medium: ScaleBandStats,
        large: ScaleBandStats,
    ) -> Self {
        ScaleDisparityReport {
            small,
            medium,
            large,
            disparity: small.ruggedness - large.ruggedness,
        }
    }
}

pub fn scale_disparity(analysis: &FractalAnalysis) -> Result<ScaleDisparityReport> {
    let bands = partition_scales(analysis)?;
    Ok(ScaleDisparityReport::from_bands(
        band_stats(&bands.small, ScaleBand::Small)?,
        band_stats(&bands.medium, ScaleBand::Medium)?,
        band_stats(&bands.large, ScaleBand::Large)?,
    ))
}
