//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use vecon::heatmap::{gaussian_blur, histogram2d};
use vecon::indexes::{build_sum_index, inflation_pct};
use vecon::ingest::save_snapshot;
use vecon::report::{analyze, prepare, run_report, Config, Input};
use vecon::stationarity::adf_test;
use vecon::synthetic::{generate_economy, EconomySpec, QuartileDrift};
use vecon::transforms::first_difference;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn ar1(rng: &mut ChaCha8Rng, phi: f64, n: usize) -> Vec<f64> {
    let mut y = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        let e: f64 = rng.sample(StandardNormal);
        prev = phi * prev + e;
        y.push(prev);
    }
    y
}

fn adf_oracle() -> Outcome {
    let cases = common::adf_cases();
    let started = Instant::now();
    let mut worst_t: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut problems = Vec::new();
    for case in &cases {
        let e = &case.expected;
        match adf_test(&case.series, None) {
            Ok(r) => {
                worst_t = worst_t.max((r.t_stat - e["t_stat"].as_f64().unwrap()).abs());
                worst_p = worst_p.max((r.p_value - e["p_value"].as_f64().unwrap()).abs());
                if r.lags_used as u64 != e["lags_used"].as_u64().unwrap() {
                    problems.push(format!("{}: lags {}", case.name, r.lags_used));
                }
            }
            Err(err) => problems.push(format!("{}: {err}", case.name)),
        }
    }
    let elapsed = started.elapsed();
    let pass = cases.len() == 6
        && problems.is_empty()
        && worst_t <= 1e-4
        && worst_p <= 1e-3
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "{} series, max |dt| = {worst_t:.2e}, max |dp| = {worst_p:.2e}, lags {}, {}",
            cases.len(),
            if problems.is_empty() {
                "identical".to_string()
            } else {
                problems.join("; ")
            },
            secs(elapsed)
        ),
    )
}

fn adf_size_power() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rate = |rng: &mut ChaCha8Rng, phi: f64| {
        let mut rejected = 0;
        for _ in 0..200 {
            let y = ar1(rng, phi, 180);
            if adf_test(&y, None).is_ok_and(|r| r.rejects_at(0.05)) {
                rejected += 1;
            }
        }
        rejected as f64 / 200.0
    };
    let size = rate(&mut rng, 1.0);
    let power = rate(&mut rng, 0.5);
    let elapsed = started.elapsed();
    outcome(
        (0.01..=0.10).contains(&size) && power >= 0.90 && elapsed < Duration::from_secs(10),
        format!(
            "random-walk rejection {size:.3}, AR(0.5) rejection {power:.3}, {}",
            secs(elapsed)
        ),
    )
}

fn affine_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..50 {
        let phi = [1.0, 0.9, 0.5, 0.0][i % 4];
        let y = ar1(&mut rng, phi, 180);
        let Ok(base) = adf_test(&y, None) else {
            failures += 1;
            continue;
        };
        for a in [0.5, 3.0, 1000.0] {
            for b in [-10.0, 0.0, 7.0] {
                let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
                match adf_test(&z, None) {
                    Ok(r) if r.lags_used == base.lags_used => {
                        worst = worst.max((r.t_stat - base.t_stat).abs())
                    }
                    _ => failures += 1,
                }
            }
        }
    }
    outcome(
        failures == 0 && worst <= 1e-8,
        format!("450 transformed series, max |dt| = {worst:.2e}, {failures} lag or fit mismatches"),
    )
}

fn transform_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let len = rng.random_range(2..400);
        let y: Vec<i64> = (0..len)
            .map(|_| rng.random_range(-1_000_000_000_000i64..1_000_000_000_000))
            .collect();
        let d = first_difference(&y).expect("len >= 2");
        let mut back = Vec::with_capacity(len);
        back.push(y[0]);
        for v in d {
            back.push(back.last().unwrap() + v);
        }
        if back != y {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("1000 integer series, {mismatches} mismatches"),
    )
}

fn index_completeness() -> Outcome {
    let snap = generate_economy(&EconomySpec::default());
    let prepared = prepare(&snap).expect("prepare");
    let ids: Vec<_> = prepared.filtered.series().keys().copied().collect();
    let all = build_sum_index(&prepared.filtered, &ids, "all").expect("all index");
    let mut summed = vec![0u128; all.values.len()];
    for ix in &prepared.indexes[..4] {
        for (s, v) in summed.iter_mut().zip(&ix.values) {
            *s += v;
        }
    }
    let sizes: Vec<usize> = prepared.indexes[..4]
        .iter()
        .map(|ix| ix.membership.len())
        .collect();
    outcome(
        summed == all.values && ids.len() == 400,
        format!(
            "400 items in groups {sizes:?}, elementwise sums {}",
            if summed == all.values {
                "equal"
            } else {
                "differ"
            }
        ),
    )
}

fn inflation_formula() -> Outcome {
    let rising: Vec<f64> = (100..=110).map(f64::from).collect();
    let got = inflation_pct(&rising).expect("rising");
    let flat = inflation_pct(&[250.0; 30]).expect("flat");
    let want = 100.0 * 10.0 / 110.0;
    outcome(
        (got - 9.090909090909).abs() <= 1e-9 && (got - want).abs() <= 1e-9 && flat == 0.0,
        format!("[100..110] -> {got:.12}%, flat -> {flat}"),
    )
}

fn blur_conservation() -> Outcome {
    let snap = generate_economy(&EconomySpec {
        items: 3358,
        ..EconomySpec::default()
    });
    let stats = prepare(&snap).expect("prepare").stats;
    let points: Vec<(f64, f64)> = stats
        .iter()
        .map(|s| (s.log_mean_price, s.mean_daily_pct_change))
        .collect();
    let started = Instant::now();
    let raw = histogram2d(&points, 1000).expect("histogram");
    let blurred = gaussian_blur(&raw, 8.0).expect("blur");
    let elapsed = started.elapsed();
    let rel = (blurred.total() - raw.total()).abs() / raw.total();
    outcome(
        points.len() == 3358 && rel <= 1e-9 && elapsed < Duration::from_secs(2),
        format!(
            "{} points, relative mass error {rel:.2e}, {}",
            points.len(),
            secs(elapsed)
        ),
    )
}

fn drift_detection() -> Outcome {
    let snap = generate_economy(&EconomySpec {
        items: 400,
        drift: Some(QuartileDrift {
            quartile: 2,
            inflation_pct: 12.0,
        }),
        ..EconomySpec::default()
    });
    let config = Config {
        heatmap_bins: 200,
        ..Config::default()
    };
    let report = analyze(&snap, Vec::new(), &config).expect("report").report;
    let got: Vec<(String, f64)> = report
        .quartiles
        .iter()
        .map(|q| (q.label.clone(), q.inflation_pct))
        .collect();
    let pass = got.iter().all(|(label, v)| {
        let target = if label == "upper-mid" { 12.0 } else { 0.0 };
        (v - target).abs() <= 2.0
    });
    let detail = got
        .iter()
        .map(|(l, v)| format!("{l} {v:.2}%"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn exclusion_rule() -> Outcome {
    let snap = generate_economy(&EconomySpec {
        items: 3467,
        constant_items: 109,
        ..EconomySpec::default()
    });
    let config = Config {
        heatmap_bins: 100,
        ..Config::default()
    };
    let ex = analyze(&snap, Vec::new(), &config)
        .expect("report")
        .report
        .exclusion;
    outcome(
        ex.retained_count == 3358 && ex.excluded_ids.len() == 109 && ex.input_count == 3467,
        format!(
            "{} in, {} retained, {} excluded",
            ex.input_count,
            ex.retained_count,
            ex.excluded_ids.len()
        ),
    )
}

/// Runs the `report` command on the 3358-item snapshot; returns the wall time.
fn cli_report(snapshot: &Path, out: &Path) -> Result<Duration, String> {
    let started = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_vecon"))
        .args(["report", "--snapshot"])
        .arg(snapshot)
        .arg("--out")
        .arg(out)
        .env_remove("VECON_SOURCE")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    if o.status.success() {
        Ok(elapsed)
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn full_scale(dir: &Path) -> (Outcome, Outcome) {
    let snapshot = dir.join("snapshot");
    let snap = generate_economy(&EconomySpec {
        items: 3358,
        ..EconomySpec::default()
    });
    save_snapshot(&snap, &snapshot).expect("snapshot saved");

    let first = cli_report(&snapshot, &dir.join("a"));
    let perf = match &first {
        Ok(t) => outcome(
            *t < Duration::from_secs(60),
            format!("3358 x 180 report in {}", secs(*t)),
        ),
        Err(e) => outcome(false, format!("report failed: {e}")),
    };

    // second run goes through the library entry point
    let second = run_report(
        &Config::default(),
        &Input::Snapshot(snapshot),
        &dir.join("b"),
    );
    let det = match (first, second) {
        (Ok(_), Ok(_)) => {
            let mut differing = Vec::new();
            for f in [
                "report.json",
                "heatmaps/mean_change_vs_log_price.csv",
                "heatmaps/cov_vs_mean_change.csv",
            ] {
                let x = std::fs::read(dir.join("a").join(f)).unwrap_or_default();
                let y = std::fs::read(dir.join("b").join(f)).unwrap_or_default();
                if x.is_empty() || x != y {
                    differing.push(f);
                }
            }
            outcome(
                differing.is_empty(),
                if differing.is_empty() {
                    "report.json and 2 heatmap CSVs byte-identical".to_string()
                } else {
                    format!("differ: {}", differing.join(", "))
                },
            )
        }
        (_, Err(e)) => outcome(false, format!("second run failed: {e}")),
        (Err(_), _) => outcome(false, "first run failed".to_string()),
    };
    (perf, det)
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "ADF oracle equivalence", adf_oracle()),
        (2, "ADF size and power", adf_size_power()),
        (3, "ADF affine invariance", affine_invariance()),
        (4, "transform round trip", transform_round_trip()),
        (5, "index completeness", index_completeness()),
        (6, "inflation formula", inflation_formula()),
        (7, "blur conservation and scale", blur_conservation()),
        (8, "drift detection", drift_detection()),
        (9, "exclusion rule", exclusion_rule()),
    ];
    let (perf, det) = full_scale(dir.path());
    results.push((10, "report performance", perf));
    results.push((11, "report determinism", det));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {n:>2} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
