//! AQI health categories and cross-city rankings.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// Six-level AQI classification, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HealthCategory {
    Good,
    Satisfactory,
    Moderate,
    Poor,
    VeryPoor,
    Severe,
}

impl HealthCategory {
    pub const ALL: [HealthCategory; 6] = [
        HealthCategory::Good,
        HealthCategory::Satisfactory,
        HealthCategory::Moderate,
        HealthCategory::Poor,
        HealthCategory::VeryPoor,
        HealthCategory::Severe,
    ];

    pub fn label(self) -> &'static str {
        match self {
            HealthCategory::Good => "Good",
            HealthCategory::Satisfactory => "Satisfactory",
            HealthCategory::Moderate => "Moderate",
            HealthCategory::Poor => "Poor",
            HealthCategory::VeryPoor => "Very Poor",
            HealthCategory::Severe => "Severe",
        }
    }

    pub fn color_code(self) -> &'static str {
        match self {
            HealthCategory::Good => "Green",
            HealthCategory::Satisfactory => "Light Green",
            HealthCategory::Moderate => "Yellow",
            HealthCategory::Poor => "Orange",
            HealthCategory::VeryPoor => "Red",
            HealthCategory::Severe => "Dark Red",
        }
    }

    pub fn impact_statement(self) -> &'static str {
        match self {
            HealthCategory::Good => "Minimal Impact",
            HealthCategory::Satisfactory => "Minor breathing discomfort to sensitive people",
            HealthCategory::Moderate => {
                "Breathing discomfort to the people with lungs, asthma and heart diseases"
            }
            HealthCategory::Poor => "Breathing discomfort to most people on prolonged exposure",
            HealthCategory::VeryPoor => "Respiratory illness on prolonged exposure",
            HealthCategory::Severe => {
                "Affects healthy people and seriously impacts those with existing diseases"
            }
        }
    }

    /// Inclusive upper bound of the category's AQI range.
    pub fn upper_bound(self) -> f64 {
        match self {
            HealthCategory::Good => 50.0,
            HealthCategory::Satisfactory => 100.0,
            HealthCategory::Moderate => 200.0,
            HealthCategory::Poor => 300.0,
            HealthCategory::VeryPoor => 400.0,
            HealthCategory::Severe => f64::INFINITY,
        }
    }
}

impl fmt::Display for HealthCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for HealthCategory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HealthCategory", 3)?;
        st.serialize_field("label", self.label())?;
        st.serialize_field("color_code", self.color_code())?;
        st.serialize_field("impact_statement", self.impact_statement())?;
        st.end()
    }
}

/// `[0,50]` Good, `(50,100]` Satisfactory, `(100,200]` Moderate,
/// `(200,300]` Poor, `(300,400]` Very Poor, above 400 Severe.
pub fn classify_aqi(value: f64) -> Result<HealthCategory> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::Domain { what: "AQI", value });
    }
    Ok(HealthCategory::ALL
        .into_iter()
        .find(|c| value <= c.upper_bound())
        .unwrap_or(HealthCategory::Severe))
}

/// Per-category counts over a sample, in severity order.
pub fn category_counts(values: &[f64]) -> Result<[(HealthCategory, usize); 6]> {
    let mut counts = HealthCategory::ALL.map(|c| (c, 0usize));
    for &v in values {
        counts[classify_aqi(v)? as usize].1 += 1;
    }
    Ok(counts)
}

/// Most frequent category; ties go to the less severe one.
pub fn modal_category(values: &[f64]) -> Result<HealthCategory> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let counts = category_counts(values)?;
    let mut best = counts[0];
    for c in &counts[1..] {
        if c.1 > best.1 {
            best = *c;
        }
    }
    Ok(best.0)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CitySummary {
    pub series_id: String,
    pub mean_lambda: f64,
    pub disparity: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CityRankings {
    pub by_mean_lambda: Vec<CitySummary>,
    pub by_disparity: Vec<CitySummary>,
}

/// Descending rankings by λ̄ and by disparity; ties by series id.
pub fn rank_cities(summaries: &[CitySummary]) -> CityRankings {
    let rank_by = |key: fn(&CitySummary) -> f64| {
        let mut v = summaries.to_vec();
        v.sort_by(|a, b| match key(b).total_cmp(&key(a)) {
            Ordering::Equal => a.series_id.cmp(&b.series_id),
            o => o,
        });
        v
    };
    CityRankings {
        by_mean_lambda: rank_by(|c| c.mean_lambda),
        by_disparity: rank_by(|c| c.disparity),
    }
}
