//! File formats and batch orchestration for `aqi-fractal-core`.
//!
//! - [`ingest`] reads daily series CSVs.
//! - [`report`] renders JSON reports and plot-data CSVs.
//! - [`pipeline`] runs the full analysis over several cities and writes the
//!   output tree.

pub mod ingest;
pub mod pipeline;
pub mod report;

pub use pipeline::{run_pipeline, RunConfig, RunSummary};
