//! Acceptance criteria, one line each. Run with
//! `cargo test -p aqi-fractal --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aqi_fractal::ingest::parse_series;
use aqi_fractal::pipeline::{run_pipeline, RunConfig, CITY_FILES, COMPARISON_FILE};
use aqi_fractal_core::distribution::{kolmogorov_pvalue, ks_statistic};
use aqi_fractal_core::fractal::{
    band_stats, compute_fractal_records, fractal_summary, FractalRecord, ScaleBand, ScaleBandStats,
    ScaleDisparityReport,
};
use aqi_fractal_core::health::classify_aqi;
use aqi_fractal_core::normal::{normal_cdf, normal_quantile};
use aqi_fractal_core::preprocess::{impute, ImputationPolicy};
use aqi_fractal_core::series::{calendar_audit, Observation, RawSeries};
use chrono::NaiveDate;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/fixtures/synthetic_city.csv"
);

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Published per-city band values: (city, small a, small b, small a^b,
/// large a, large b, large a^b, disparity).
type BandRow = (&'static str, f64, f64, f64, f64, f64, f64, f64);

const REFERENCE_BANDS: [BandRow; 4] = [
    (
        "Delhi", 317.555, 1.854, 43488.291, 83.634, 1.167, 175.154, 43313.137,
    ),
    (
        "Mumbai", 185.315, 2.169, 83003.811, 49.239, 1.186, 101.643, 82902.168,
    ),
    (
        "Kolkata", 245.309, 1.966, 49908.751, 40.019, 1.217, 89.116, 49819.635,
    ),
    (
        "Bengaluru",
        108.476,
        2.533,
        143054.053,
        46.666,
        1.196,
        99.112,
        142954.941,
    ),
];

fn band_from(a: f64, b: f64, band: ScaleBand) -> ScaleBandStats {
    // One record carrying the band means reproduces them exactly.
    let record = FractalRecord {
        x: a,
        rank: 1,
        alpha: 0.5,
        lambda: b,
        scale: 1.0,
    };
    band_stats(&[record], band).expect("non-empty band")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (city, sa, sb, sr, la, lb, lr, disparity) in REFERENCE_BANDS {
        let small = band_from(sa, sb, ScaleBand::Small);
        let large = band_from(la, lb, ScaleBand::Large);
        let medium = band_from(1.0, 1.0, ScaleBand::Medium);
        let report = ScaleDisparityReport::from_bands(small, medium, large);
        for (what, got, want) in [
            ("small ruggedness", small.ruggedness, sr),
            ("large ruggedness", large.ruggedness, lr),
            ("disparity", report.disparity, disparity),
        ] {
            let e = rel_err(got, want);
            worst = worst.max(e);
            if e > 0.01 {
                return Err(format!("{city} {what}: {got} vs {want} (rel err {e:.2e})"));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "8 ruggedness rows + 4 disparities, worst rel err {worst:.2e}"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rows = [
        ("Delhi", 0.073, 2465, 4.65e-12),
        ("Mumbai", 0.118, 2830, 5.37e-35),
        ("Kolkata", 0.173, 2375, 4.02e-63),
        ("Bengaluru", 0.107, 2830, 4.65e-29),
    ];
    let mut detail = Vec::new();
    let mut failed = Vec::new();
    for (city, d, n, printed) in rows {
        let p = kolmogorov_pvalue(d, n).map_err(|e| e.to_string())?;
        let ratio = p / printed;
        detail.push(format!("{city} x{ratio:.2}"));
        if !(1.0 / 3.0..=3.0).contains(&ratio) {
            failed.push(format!(
                "{city}: p={p:.3e} vs printed {printed:.2e} (x{ratio:.2})"
            ));
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    if failed.is_empty() {
        Ok(detail.join(", "))
    } else {
        Err(failed.join("; "))
    }
}

fn pareto_values(n: usize, a: f64, theta: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (1..n)
        .map(|i| theta * (1.0 - i as f64 / n as f64).powf(-1.0 / a))
        .collect();
    // Rank-n point; excluded from the records whatever its value.
    v.push(2.0 * v[n - 2]);
    v
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let theta = 24.0;
    let mut worst: f64 = 0.0;
    for n in [100, 10_000] {
        for a in [0.5, 1.0, 2.5] {
            let analysis = compute_fractal_records(&pareto_values(n, a, theta), Some(theta))
                .map_err(|e| e.to_string())?;
            for r in &analysis.records {
                let e = (r.lambda - (1.0 + a)).abs();
                worst = worst.max(e);
                if e > 1e-9 {
                    return Err(format!("n={n} a={a} rank {}: λ={}", r.rank, r.lambda));
                }
            }
            let std = fractal_summary(&analysis)
                .map_err(|e| e.to_string())?
                .std_dev
                .unwrap_or(0.0);
            if std > 1e-9 {
                return Err(format!("n={n} a={a}: std {std}"));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("6 cases, worst |λ-(1+a)| = {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    for case in 0..1000 {
        let n = rng.gen_range(3..400);
        // Distinct integers shuffled: unique min and max.
        let mut values: Vec<f64> = (0..n).map(|i| 10.0 + i as f64 * 1.5).collect();
        for i in (1..n).rev() {
            values.swap(i, rng.gen_range(0..=i));
        }
        let a = compute_fractal_records(&values, None).map_err(|e| e.to_string())?;
        if a.records.len() != n - 2 {
            return Err(format!("case {case}: n={n}, {} records", a.records.len()));
        }
        // k copies of the minimum.
        let k = rng.gen_range(2..6);
        let mut dup = values.clone();
        dup.extend(std::iter::repeat_n(10.0, k - 1));
        let b = compute_fractal_records(&dup, None).map_err(|e| e.to_string())?;
        if b.records.len() != dup.len() - k - 1 {
            return Err(format!(
                "case {case}: n={} k={k}, {} records",
                dup.len(),
                b.records.len()
            ));
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("1000 unique-extreme series and 1000 duplicated-minimum series".into())
}

fn ks_brute_force(values: &[f64], mean: f64, std: f64) -> f64 {
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for &x in values {
        let at = values.iter().filter(|&&v| v <= x).count() as f64 / n;
        let before = values.iter().filter(|&&v| v < x).count() as f64 / n;
        let phi = normal_cdf((x - mean) / std);
        d = d.max((at - phi).abs()).max((before - phi).abs());
    }
    d
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.gen_range(2..=50);
        let values: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..300.0f64).round())
            .collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        if std == 0.0 {
            continue;
        }
        let d = ks_statistic(&values, mean, std).map_err(|e| e.to_string())?;
        let e = (d - ks_brute_force(&values, mean, std)).abs();
        worst = worst.max(e);
        if e > 1e-12 {
            return Err(format!("case {case}: |D - oracle| = {e:e}"));
        }
    }
    Ok(format!("200 samples, worst |D - oracle| = {worst:.1e}"))
}

fn bisect_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_6() -> Outcome {
    let (lo, hi) = (1e-6, 1.0 - 1e-6);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let p = lo + (hi - lo) * i as f64 / 999.0;
        let z = normal_quantile(p).map_err(|e| e.to_string())?;
        let e = (z - bisect_quantile(p)).abs();
        worst = worst.max(e);
        if e > 1e-8 {
            return Err(format!("p={p}: z={z}, error {e:e}"));
        }
    }
    Ok(format!(
        "1000 grid points, worst |z - bisection| = {worst:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0usize;
    for case in 0..300 {
        let n = rng.gen_range(3..500);
        let values: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(5.0..500.0f64).round())
            .collect();
        let Ok(a) = compute_fractal_records(&values, None) else {
            continue;
        };
        let c = rng.gen_range(0.01..100.0);
        let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
        let b = compute_fractal_records(&scaled, None).map_err(|e| e.to_string())?;
        for (r, s) in a.records.iter().zip(&b.records) {
            if r.lambda.is_nan() || r.lambda <= 1.0 {
                return Err(format!("case {case}: λ = {}", r.lambda));
            }
            if (r.lambda - s.lambda).abs() > 1e-12 {
                return Err(format!(
                    "case {case}: scaling moved λ by {:e}",
                    r.lambda - s.lambda
                ));
            }
            let base10 = 1.0 - (1.0 - r.alpha).log10() / (r.x / a.theta).log10();
            if (r.lambda - base10).abs() > 1e-12 {
                return Err(format!(
                    "case {case}: base 10 moved λ by {:e}",
                    r.lambda - base10
                ));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} records: λ > 1, scaling and base invariant"
    ))
}

fn random_gappy(rng: &mut StdRng) -> RawSeries {
    let start = NaiveDate::from_ymd_opt(2017, 1, 1).unwrap();
    let len = rng.gen_range(60..1100);
    let p_missing = rng.gen_range(0.0..0.5);
    let outage = rng.gen_range(0..len);
    let outage_len = rng.gen_range(0..120);
    let records = start
        .iter_days()
        .take(len)
        .enumerate()
        .filter_map(|(i, date)| {
            let in_outage = (outage..outage + outage_len).contains(&i);
            if in_outage && rng.gen_bool(0.5) {
                return None;
            }
            let value = if in_outage || rng.gen_bool(p_missing) {
                None
            } else {
                Some(rng.gen_range(20.0..450.0f64).round())
            };
            Some(Observation::new(date, value))
        })
        .collect();
    RawSeries::new("g", records).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut totals = [0usize; 3];
    for case in 0..300 {
        let raw = random_gappy(&mut rng);
        let m = rng.gen_range(0..=31);
        let policy = ImputationPolicy::new(m, m + rng.gen_range(0..=120)).unwrap();
        let Ok((clean, report)) = impute(&raw, policy) else {
            continue;
        };
        let missing = calendar_audit(&raw).unwrap().total_missing();
        let removed: usize = report.removed.iter().map(|r| r.days()).sum();
        let accounted = report.filled_month.len() + report.filled_year.len() + removed;
        if accounted != missing {
            return Err(format!(
                "case {case}: {accounted} accounted, {missing} missing"
            ));
        }
        let present: Vec<f64> = raw.present_values().collect();
        let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if let Some(f) = report
            .filled_month
            .iter()
            .chain(&report.filled_year)
            .find(|f| f.value < lo || f.value > hi)
        {
            return Err(format!(
                "case {case}: fill {} outside [{lo}, {hi}]",
                f.value
            ));
        }
        let (again, _) = impute(&clean.to_raw(), policy).map_err(|e| e.to_string())?;
        if again != clean {
            return Err(format!("case {case}: second imputation changed the series"));
        }
        totals[0] += report.filled_month.len();
        totals[1] += report.filled_year.len();
        totals[2] += removed;
    }
    Ok(format!(
        "300 series: {} month fills, {} year fills, {} removed; idempotent",
        totals[0], totals[1], totals[2]
    ))
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_owned(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs = tmp.path().join("in");
    fs::create_dir_all(&inputs).unwrap();
    let fixture = fs::read_to_string(FIXTURE).unwrap();
    let city_a = inputs.join("CityA.csv");
    let city_b = inputs.join("CityB.csv");
    fs::write(&city_a, &fixture).unwrap();
    let scaled: String = fixture
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                return format!("{l}\n");
            }
            let mut f: Vec<String> = l.split(',').map(str::to_owned).collect();
            if let Ok(v) = f[2].parse::<f64>() {
                f[2] = format!("{}", (v * 0.6).round());
            }
            format!("{}\n", f.join(","))
        })
        .collect();
    fs::write(&city_b, scaled).unwrap();

    let run = |out: &str, jobs: usize| {
        let mut cfg = RunConfig::new(vec![city_a.clone(), city_b.clone()], tmp.path().join(out));
        cfg.jobs = jobs;
        let summary = run_pipeline(&cfg).map_err(|e| e.to_string())?;
        if summary.exit_code() != 0 {
            return Err(format!("{out}: exit code {}", summary.exit_code()));
        }
        Ok(read_tree(&tmp.path().join(out)))
    };
    let first = run("run1", 1)?;
    let second = run("run2", 2)?;
    if first != second {
        return Err("output trees differ between runs".into());
    }

    let broken = inputs.join("Broken.csv");
    fs::write(&broken, "date,value\n2017-01-01,50\n2017-13-01,60\n").unwrap();
    let cfg = RunConfig::new(vec![broken, city_a.clone()], tmp.path().join("run3"));
    let summary = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    if summary.exit_code() == 0 {
        return Err("malformed input did not produce a nonzero exit".into());
    }
    let tree = read_tree(&tmp.path().join("run3"));
    let city_a_files = tree.keys().filter(|p| p.starts_with("CityA")).count();
    if city_a_files != CITY_FILES.len() || tree.keys().any(|p| p.starts_with("Broken")) {
        return Err(format!(
            "isolation: {city_a_files} files for the valid city"
        ));
    }
    Ok(format!(
        "{} files byte-identical across runs; malformed input isolated",
        first.len()
    ))
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cfg = RunConfig::new(vec![PathBuf::from(FIXTURE)], tmp.path());
    let summary = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if summary.exit_code() != 0 {
        return Err(format!("exit code {}", summary.exit_code()));
    }
    within(elapsed, Duration::from_secs(5))?;
    let dir = tmp.path().join("synthetic_city");
    for f in CITY_FILES {
        if !dir.join(f).is_file() {
            return Err(format!("missing {f}"));
        }
    }
    if !tmp.path().join(COMPARISON_FILE).is_file() {
        return Err("missing comparison.json".into());
    }

    let normality: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("normality.json")).unwrap()).unwrap();
    let p = normality["p_value"].as_f64().ok_or("p_value missing")?;
    if p.is_nan() || p >= 0.01 {
        return Err(format!("p-value {p} not below 0.01"));
    }

    let raw = parse_series(&fs::read(FIXTURE).unwrap(), "synthetic_city").unwrap();
    let gaps = calendar_audit(&raw).unwrap();
    if gaps.total_missing() == 0 {
        return Err("fixture has no gaps".into());
    }
    let clean_text = fs::read_to_string(dir.join("clean.csv")).unwrap();
    let mut counts = BTreeMap::new();
    for line in clean_text.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        *counts.entry(classify_aqi(v).unwrap()).or_insert(0usize) += 1;
    }
    let max = counts.values().copied().max().unwrap();
    let expected = counts.iter().find(|(_, &c)| c == max).unwrap().0.label();
    let summary_json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
    let modal = summary_json["modal_category"]["label"]
        .as_str()
        .unwrap_or_default();
    if modal != expected {
        return Err(format!(
            "modal category {modal}, classify_aqi says {expected}"
        ));
    }
    Ok(format!(
        "{} gaps handled, 10 files in {elapsed:?}, p = {p:.3e}, modal category {modal}",
        gaps.total_missing()
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("reference ruggedness and disparity within 1%", criterion_1),
        ("reference K-S p-values within a factor of 3", criterion_2),
        ("Pareto quantiles give λ = 1 + a exactly", criterion_3),
        ("exclusion-count identity", criterion_4),
        ("K-S statistic equals brute force", criterion_5),
        ("inverse normal agrees with bisection", criterion_6),
        ("λ bound and invariances", criterion_7),
        ("imputation accounting and idempotence", criterion_8),
        ("pipeline determinism and isolation", criterion_9),
        ("end-to-end synthetic city", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
