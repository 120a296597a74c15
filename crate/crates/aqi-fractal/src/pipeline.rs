//! Multi-city orchestration: ingest, clean, analyze, write.
//!
//! Each city is analyzed fully in memory before any of its files are written,
//! so a failing city leaves no partial output. Files are written through a
//! temporary name and renamed into place. `comparison.json` is written last,
//! from the cities that succeeded.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use aqi_fractal_core::distribution::{
    descriptive_stats, normality_report, sturges_bins, DescriptiveStats, NormalityReport,
};
use aqi_fractal_core::fractal::{
    compute_fractal_records, fractal_summary, scale_disparity, spectrum_points, FractalAnalysis,
    FractalSummary, ScaleDisparityReport, SpectrumPoint,
};
use aqi_fractal_core::health::{
    category_counts, modal_category, rank_cities, CityRankings, CitySummary, HealthCategory,
};
use aqi_fractal_core::preprocess::{
    extremes_summary, impute, CleanReport, CleanSeries, Extremes, ImputationPolicy,
};
use aqi_fractal_core::series::{calendar_audit, GapReport, RawSeries, YearMonth};
use serde::Serialize;

use crate::ingest::{parse_series, IngestError};
use crate::report;

/// Names of the files written for every city, in write order.
pub const CITY_FILES: [&str; 10] = [
    "clean.csv",
    "clean_report.json",
    "normality.json",
    "histogram.csv",
    "qq.csv",
    "fractal_records.csv",
    "spectrum.csv",
    "fractal_summary.json",
    "scale_disparity.json",
    "summary.json",
];

pub const COMPARISON_FILE: &str = "comparison.json";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    /// Histogram bins; Sturges' rule when unset.
    pub bin_count: Option<usize>,
    pub policy: ImputationPolicy,
    pub theta_override: Option<f64>,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            inputs,
            output_dir: output_dir.into(),
            bin_count: None,
            policy: ImputationPolicy::default(),
            theta_override: None,
            jobs: 1,
        }
    }
}

/// Problems detected before any city is processed.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("no input files given")]
    NoInputs,
    #[error("--bins must be at least 1")]
    ZeroBins,
    #[error("--jobs must be at least 1")]
    ZeroJobs,
    #[error("--theta must be a positive finite number, got {0}")]
    Theta(f64),
    #[error("cannot derive a series id from {0}")]
    SeriesId(PathBuf),
    #[error("series id {0:?} is used by more than one input")]
    DuplicateSeriesId(String),
    #[error("cannot create output directory {path}: {source}")]
    OutputDir { path: PathBuf, source: io::Error },
}

/// Why one city failed.
#[derive(Debug, thiserror::Error)]
pub enum CityError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: IngestError },
    #[error("analysis failed: {0}")]
    Analysis(#[from] aqi_fractal_core::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Serialize)]
pub struct CleanReportFile<'a> {
    pub series_id: &'a str,
    pub gaps: GapSummary<'a>,
    pub imputation: &'a CleanReport,
    pub extremes: Extremes,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapSummary<'a> {
    pub total_missing: usize,
    pub per_year_missing: &'a BTreeMap<i32, usize>,
    pub per_month_missing: &'a BTreeMap<YearMonth, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FractalSummaryFile<'a> {
    pub series_id: &'a str,
    pub theta: f64,
    pub n_input: usize,
    pub excluded_min: usize,
    pub excluded_top: usize,
    pub summary: &'a FractalSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryShare {
    pub label: &'static str,
    pub color_code: &'static str,
    pub count: usize,
    pub share: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryFile<'a> {
    pub series_id: &'a str,
    pub stats: &'a DescriptiveStats,
    pub modal_category: HealthCategory,
    pub category_shares: Vec<CategoryShare>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedCity {
    pub rank: usize,
    pub series_id: String,
    pub mean_lambda: f64,
    pub disparity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonFile {
    pub cities: usize,
    pub by_mean_lambda: Vec<RankedCity>,
    pub by_disparity: Vec<RankedCity>,
    pub failed: Vec<String>,
}

/// Everything computed for one city.
#[derive(Debug, Clone)]
pub struct CityAnalysis {
    pub series_id: String,
    pub gaps: GapReport,
    pub clean: CleanSeries,
    pub clean_report: CleanReport,
    pub extremes: Extremes,
    pub normality: NormalityReport,
    pub fractal: FractalAnalysis,
    pub fractal_summary: FractalSummary,
    pub spectrum: Vec<SpectrumPoint>,
    pub disparity: ScaleDisparityReport,
    pub stats: DescriptiveStats,
    pub modal_category: HealthCategory,
    pub category_counts: [(HealthCategory, usize); 6],
}

impl CityAnalysis {
    pub fn city_summary(&self) -> CitySummary {
        CitySummary {
            series_id: self.series_id.clone(),
            mean_lambda: self.fractal_summary.mean_lambda,
            disparity: self.disparity.disparity,
        }
    }

    /// File name and contents for each of [`CITY_FILES`].
    pub fn render(&self) -> Vec<(&'static str, Vec<u8>)> {
        let id = self.series_id.as_str();
        let n = self.clean.len() as f64;
        let shares = self
            .category_counts
            .iter()
            .map(|&(c, count)| CategoryShare {
                label: c.label(),
                color_code: c.color_code(),
                count,
                share: count as f64 / n,
            })
            .collect();
        let files = [
            report::clean_csv(&self.clean),
            report::to_json(&CleanReportFile {
                series_id: id,
                gaps: GapSummary {
                    total_missing: self.gaps.total_missing(),
                    per_year_missing: &self.gaps.per_year_missing,
                    per_month_missing: &self.gaps.per_month_missing,
                },
                imputation: &self.clean_report,
                extremes: self.extremes,
            }),
            report::to_json(&self.normality),
            report::histogram_csv(&self.normality.histogram),
            report::qq_csv(&self.normality.qq),
            report::records_csv(&self.fractal.records),
            report::spectrum_csv(&self.spectrum),
            report::to_json(&FractalSummaryFile {
                series_id: id,
                theta: self.fractal.theta,
                n_input: self.fractal.n_input,
                excluded_min: self.fractal.excluded_min,
                excluded_top: self.fractal.excluded_top,
                summary: &self.fractal_summary,
            }),
            report::to_json(&self.disparity),
            report::to_json(&SummaryFile {
                series_id: id,
                stats: &self.stats,
                modal_category: self.modal_category,
                category_shares: shares,
            }),
        ];
        CITY_FILES.into_iter().zip(files).collect()
    }
}

/// Runs every analysis step on one parsed series.
pub fn analyze_series(
    raw: &RawSeries,
    config: &RunConfig,
) -> Result<CityAnalysis, aqi_fractal_core::Error> {
    let gaps = calendar_audit(raw)?;
    let (clean, clean_report) = impute(raw, config.policy)?;
    let extremes = extremes_summary(&clean)?;
    let values = clean.observations();
    let bins = config
        .bin_count
        .unwrap_or_else(|| sturges_bins(values.len()));
    let normality = normality_report(&values, bins)?;
    let fractal = compute_fractal_records(&values, config.theta_override)?;
    let summary = fractal_summary(&fractal)?;
    let spectrum = spectrum_points(&fractal);
    let disparity = scale_disparity(&fractal)?;
    let stats = descriptive_stats(&values)?;
    Ok(CityAnalysis {
        series_id: raw.series_id().to_owned(),
        gaps,
        extremes,
        normality,
        fractal_summary: summary,
        spectrum,
        disparity,
        stats,
        modal_category: modal_category(&values)?,
        category_counts: category_counts(&values)?,
        fractal,
        clean,
        clean_report,
    })
}

/// Outcome of one input file.
#[derive(Debug)]
pub struct CityOutcome {
    pub path: PathBuf,
    pub series_id: String,
    pub result: Result<CitySummary, CityError>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub cities: Vec<CityOutcome>,
    pub comparison: Result<(), CityError>,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &CityOutcome> {
        self.cities.iter().filter(|c| c.result.is_err())
    }

    /// 0 when every city and the comparison were written, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures().next().is_none() && self.comparison.is_ok() {
            0
        } else {
            1
        }
    }
}

/// Series id of an input: the file stem.
pub fn series_id_for(path: &Path) -> Option<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
}

fn validate(config: &RunConfig) -> Result<Vec<String>, ConfigError> {
    if config.inputs.is_empty() {
        return Err(ConfigError::NoInputs);
    }
    if config.bin_count == Some(0) {
        return Err(ConfigError::ZeroBins);
    }
    if config.jobs == 0 {
        return Err(ConfigError::ZeroJobs);
    }
    if let Some(t) = config.theta_override {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError::Theta(t));
        }
    }
    let mut seen = BTreeSet::new();
    config
        .inputs
        .iter()
        .map(|p| {
            let id = series_id_for(p).ok_or_else(|| ConfigError::SeriesId(p.clone()))?;
            if !seen.insert(id.clone()) {
                return Err(ConfigError::DuplicateSeriesId(id));
            }
            Ok(id)
        })
        .collect()
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CityError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let wrap = |source| CityError::Write {
        path: path.to_owned(),
        source,
    };
    fs::write(&tmp, contents).map_err(wrap)?;
    fs::rename(&tmp, path).map_err(wrap)
}

fn process_city(
    path: &Path,
    series_id: &str,
    config: &RunConfig,
) -> Result<CitySummary, CityError> {
    let bytes = fs::read(path).map_err(|source| CityError::Read {
        path: path.to_owned(),
        source,
    })?;
    let raw = parse_series(&bytes, series_id).map_err(|source| CityError::Parse {
        path: path.to_owned(),
        source,
    })?;
    let analysis = analyze_series(&raw, config)?;

    let dir = config.output_dir.join(series_id);
    fs::create_dir_all(&dir).map_err(|source| CityError::Write {
        path: dir.clone(),
        source,
    })?;
    for (name, contents) in analysis.render() {
        write_atomic(&dir.join(name), &contents)?;
    }
    Ok(analysis.city_summary())
}

pub fn comparison(summaries: &[CitySummary], failed: Vec<String>) -> ComparisonFile {
    let CityRankings {
        by_mean_lambda,
        by_disparity,
    } = rank_cities(summaries);
    let ranked = |v: Vec<CitySummary>| {
        v.into_iter()
            .enumerate()
            .map(|(i, c)| RankedCity {
                rank: i + 1,
                series_id: c.series_id,
                mean_lambda: c.mean_lambda,
                disparity: c.disparity,
            })
            .collect()
    };
    ComparisonFile {
        cities: summaries.len(),
        by_mean_lambda: ranked(by_mean_lambda),
        by_disparity: ranked(by_disparity),
        failed,
    }
}

/// Validates `config`, analyzes every input (up to `jobs` at a time) and
/// writes all output files.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary, ConfigError> {
    let ids = validate(config)?;
    fs::create_dir_all(&config.output_dir).map_err(|source| ConfigError::OutputDir {
        path: config.output_dir.clone(),
        source,
    })?;

    let jobs: Vec<(usize, &PathBuf, &String)> = config
        .inputs
        .iter()
        .zip(&ids)
        .enumerate()
        .map(|(i, (p, id))| (i, p, id))
        .collect();
    let queue = Mutex::new(jobs.into_iter());
    let results = Mutex::new(Vec::with_capacity(ids.len()));
    let workers = config.jobs.min(ids.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let next = queue.lock().expect("queue lock").next();
                let Some((i, path, id)) = next else { break };
                let result = process_city(path, id, config);
                results.lock().expect("results lock").push((
                    i,
                    CityOutcome {
                        path: path.clone(),
                        series_id: id.clone(),
                        result,
                    },
                ));
            });
        }
    });
    let mut outcomes = results.into_inner().expect("results lock");
    outcomes.sort_by_key(|(i, _)| *i);
    let cities: Vec<CityOutcome> = outcomes.into_iter().map(|(_, o)| o).collect();

    let summaries: Vec<CitySummary> = cities
        .iter()
        .filter_map(|c| c.result.as_ref().ok().cloned())
        .collect();
    let failed = cities
        .iter()
        .filter(|c| c.result.is_err())
        .map(|c| c.series_id.clone())
        .collect();
    let file = comparison(&summaries, failed);
    let written = write_atomic(
        &config.output_dir.join(COMPARISON_FILE),
        &report::to_json(&file),
    );
    Ok(RunSummary {
        cities,
        comparison: written,
    })
}
