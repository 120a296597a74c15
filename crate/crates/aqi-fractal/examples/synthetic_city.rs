//! Prints a synthetic daily AQI series as CSV.
//!
//! Three years of log-normal values with a winter peak, plus three kinds of
//! gaps: scattered empty cells, a 12-day outage in one month, and rows absent
//! from the file. This is the generator behind
//! `tests/fixtures/synthetic_city.csv`:
//!
//! ```text
//! cargo run -p aqi-fractal --example synthetic_city > crates/aqi-fractal/tests/fixtures/synthetic_city.csv
//! ```

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, LogNormal};

fn main() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20170101);
    let noise = LogNormal::new(0.0, 0.55).expect("valid log-normal");
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).expect("valid date");
    let end = NaiveDate::from_ymd_opt(2021, 12, 31).expect("valid date");

    println!(",Time-stamp,AQI");
    let mut index = 0;
    for day in start.iter_days().take_while(|d| *d <= end) {
        // Outage: rows missing from the file entirely.
        if day.year() == 2020 && day.month() == 7 && (3..15).contains(&day.day()) {
            continue;
        }
        let phase = (day.ordinal() as f64 / 365.25) * std::f64::consts::TAU;
        let seasonal = 95.0 + 45.0 * phase.cos();
        let value = (seasonal * noise.sample(&mut rng))
            .round()
            .clamp(12.0, 500.0);
        let cell = if rng.gen_bool(0.015) {
            String::new()
        } else {
            format!("{value:.1}")
        };
        println!("{index},{},{cell}", day.format("%Y-%m-%d"));
        index += 1;
    }
}
