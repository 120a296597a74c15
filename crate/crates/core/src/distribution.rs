//! Normality diagnostics: descriptive statistics, histogram, Q-Q pairs and
//! the one-sample Kolmogorov-Smirnov test against a fitted normal.

use alloc::vec::Vec;

use libm::{ceil, exp, log2, pow, sqrt};

use crate::normal::{normal_cdf, normal_quantile};
use crate::order::{mean, median_sorted, sorted};
use crate::{Error, Result};

/// Count, moments and order statistics of a sample.
///
/// `std_dev` uses the n−1 divisor; `skewness` is the moment ratio
/// `m3 / m2^1.5`. Both are `None` when undefined (n < 2, or zero spread
/// for the skewness).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: Option<f64>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub skewness: Option<f64>,
}

pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let n = values.len();
    let s = sorted(values);
    let mean = mean(values);
    let (std_dev, skewness) = if n >= 2 {
        let m2 = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
        let m3 = values.iter().map(|x| pow(x - mean, 3.0)).sum::<f64>();
        let std = sqrt(m2 / (n - 1) as f64);
        let pop_m2 = m2 / n as f64;
        let skew = if pop_m2 > 0.0 {
            Some((m3 / n as f64) / pow(pop_m2, 1.5))
        } else {
            None
        };
        (Some(std), skew)
    } else {
        (None, None)
    };
    Ok(DescriptiveStats {
        n,
        mean,
        std_dev,
        min: s[0],
        median: median_sorted(&s),
        max: s[n - 1],
        skewness,
    })
}

/// Equal-width bins; `edges.len() == counts.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HistogramBins {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Sturges' rule, `⌈1 + log₂ n⌉`.
pub fn sturges_bins(n: usize) -> usize {
    if n <= 1 {
        1
    } else {
        ceil(1.0 + log2(n as f64)) as usize
    }
}

/// Equal-width histogram over `[min, max]`.
///
/// Bins are right-exclusive except the last, which includes `max`. Constant
/// data is binned over `[v − 0.5, v + 0.5]`.
pub fn histogram(values: &[f64], bin_count: usize) -> Result<HistogramBins> {
    if bin_count == 0 {
        return Err(Error::ZeroBins);
    }
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bin_count as f64;
    let mut edges: Vec<f64> = (0..bin_count).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);

    let mut counts = alloc::vec![0usize; bin_count];
    for &v in values {
        let mut idx = (((v - lo) / width) as usize).min(bin_count - 1);
        // Keep assignment consistent with the stored edges under rounding.
        while idx + 1 < bin_count && v >= edges[idx + 1] {
            idx += 1;
        }
        while idx > 0 && v < edges[idx] {
            idx -= 1;
        }
        counts[idx] += 1;
    }
    Ok(HistogramBins { edges, counts })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QQPair {
    pub theoretical: f64,
    pub sample: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QQPoints {
    pub pairs: Vec<QQPair>,
}

/// Normal Q-Q pairs at Hazen plotting positions `(i − 0.5)/n`.
pub fn qq_points(values: &[f64]) -> Result<QQPoints> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let n = values.len() as f64;
    let pairs = sorted(values)
        .into_iter()
        .enumerate()
        .map(|(i, sample)| {
            let p = (i as f64 + 0.5) / n;
            let theoretical = normal_quantile(p).expect("plotting position lies in (0, 1)");
            QQPair {
                theoretical,
                sample,
            }
        })
        .collect();
    Ok(QQPoints { pairs })
}

/// Two-sided K-S distance between the empirical CDF and `N(mean, std²)`.
///
/// The supremum is attained at a step of the empirical CDF, so both sides of
/// every step are checked.
pub fn ks_statistic(values: &[f64], mean: f64, std: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: values.len(),
        });
    }
    if !(std.is_finite() && std > 0.0) {
        return Err(Error::Degenerate);
    }
    let n = values.len() as f64;
    let d = sorted(values)
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf((x - mean) / std);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max);
    Ok(d)
}

/// Asymptotic Kolmogorov p-value with Stephens' finite-n correction,
/// `t = (√n + 0.12 + 0.11/√n)·D`.
///
/// Uses `2 Σ (−1)^(k−1) exp(−2k²t²)` for `t ≥ 1.18` and the equivalent
/// Jacobi theta form below that, where the alternating series converges
/// slowly. Summation stops once a term is below 1e-30 relative to the sum.
pub fn kolmogorov_pvalue(d: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain {
            what: "K-S statistic",
            value: d,
        });
    }
    if n == 0 {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    let rn = sqrt(n as f64);
    let t = (rn + 0.12 + 0.11 / rn) * d;
    Ok(kolmogorov_survival(t).clamp(0.0, 1.0))
}

fn kolmogorov_survival(t: f64) -> f64 {
    use core::f64::consts::PI;
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.18 {
        let w = PI * PI / (8.0 * t * t);
        let mut sum = 0.0;
        for k in 1..=100u32 {
            let j = (2 * k - 1) as f64;
            let term = exp(-j * j * w);
            sum += term;
            if term <= 1e-30 * sum {
                break;
            }
        }
        return 1.0 - sqrt(2.0 * PI) / t * sum;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100u32 {
        let k = k as f64;
        let term = exp(-2.0 * k * k * t * t);
        sum += sign * term;
        if term <= 1e-30 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    2.0 * sum
}

/// Everything the normality check reports for one sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormalityReport {
    pub stats: DescriptiveStats,
    pub histogram: HistogramBins,
    pub qq: QQPoints,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Descriptive statistics, histogram and Q-Q pairs, plus the K-S test
/// against the normal fitted by sample mean and sample standard deviation.
pub fn normality_report(values: &[f64], bin_count: usize) -> Result<NormalityReport> {
    if values.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: values.len(),
        });
    }
    let stats = descriptive_stats(values)?;
    let histogram = histogram(values, bin_count)?;
    let qq = qq_points(values)?;
    let std = stats.std_dev.ok_or(Error::Degenerate)?;
    let d = ks_statistic(values, stats.mean, std)?;
    let p_value = kolmogorov_pvalue(d, values.len())?;
    Ok(NormalityReport {
        stats,
        histogram,
        qq,
        ks_statistic: d,
        p_value,
    })
}
