//! Report and plot-data file rendering.
//!
//! Every floating-point number written out is first rounded to six
//! significant digits and then printed in its shortest round-trip form, so
//! output is stable across platforms and runs.

use aqi_fractal_core::distribution::{HistogramBins, QQPoints};
use aqi_fractal_core::fractal::{FractalRecord, SpectrumPoint};
use aqi_fractal_core::preprocess::CleanSeries;
use serde::Serialize;
use serde_json::Value;

/// Rounds to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Six significant digits in shortest form, e.g. `43488.3`, `4.65e-12`.
pub fn fmt_num(x: f64) -> String {
    serde_json::Number::from_f64(round_sig6(x))
        .map(|n| n.to_string())
        .unwrap_or_else(|| x.to_string())
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig6(x)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to six significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_floats(&mut v);
    let mut out = serde_json::to_vec_pretty(&v).expect("json value serializes");
    out.push(b'\n');
    out
}

fn csv<I, const N: usize>(header: &str, rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = [String; N]>,
{
    let mut out = String::with_capacity(64);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn clean_csv(series: &CleanSeries) -> Vec<u8> {
    csv(
        "date,value",
        series
            .values()
            .iter()
            .map(|v| [v.date.format("%Y-%m-%d").to_string(), fmt_num(v.value)]),
    )
}

/// One row per bin: `bin_start,bin_end,count`.
pub fn histogram_csv(h: &HistogramBins) -> Vec<u8> {
    csv(
        "bin_start,bin_end,count",
        h.edges
            .windows(2)
            .zip(&h.counts)
            .map(|(e, c)| [fmt_num(e[0]), fmt_num(e[1]), c.to_string()]),
    )
}

pub fn qq_csv(qq: &QQPoints) -> Vec<u8> {
    csv(
        "theoretical,sample",
        qq.pairs
            .iter()
            .map(|p| [fmt_num(p.theoretical), fmt_num(p.sample)]),
    )
}

pub fn records_csv(records: &[FractalRecord]) -> Vec<u8> {
    csv(
        "x,rank,alpha,lambda,scale",
        records.iter().map(|r| {
            [
                fmt_num(r.x),
                r.rank.to_string(),
                fmt_num(r.alpha),
                fmt_num(r.lambda),
                fmt_num(r.scale),
            ]
        }),
    )
}

pub fn spectrum_csv(points: &[SpectrumPoint]) -> Vec<u8> {
    csv(
        "scale,lambda",
        points.iter().map(|p| [fmt_num(p.scale), fmt_num(p.lambda)]),
    )
}

/// Parses `fractal_records.csv` back into records.
pub fn parse_records_csv(text: &str) -> Result<Vec<FractalRecord>, String> {
    let mut lines = text.lines();
    if lines.next() != Some("x,rank,alpha,lambda,scale") {
        return Err("unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || format!("row {}: {line:?}", i + 1);
            if f.len() != 5 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(FractalRecord {
                x: num(f[0])?,
                rank: f[1].parse().map_err(|_| bad())?,
                alpha: num(f[2])?,
                lambda: num(f[3])?,
                scale: num(f[4])?,
            })
        })
        .collect()
}
