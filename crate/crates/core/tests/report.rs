mod common;

use std::path::Path;

use serde_json::Value;

use vecon::ingest::save_snapshot;
use vecon::report::{analyze, run_report, AlertLevel, Config, Input, ReportError};
use vecon::synthetic::{generate_economy, EconomySpec, QuartileDrift};
use vecon::{BondQuote, Fixed4, Snapshot};

fn bond() -> BondQuote {
    BondQuote::new(Fixed4::from_raw(59_900), 4_000_000).unwrap()
}

fn economy_400() -> Snapshot {
    generate_economy(&EconomySpec {
        bond: Some(bond()),
        ..EconomySpec::default()
    })
}

fn quick_config() -> Config {
    Config {
        heatmap_bins: 200,
        heatmap_sigma: 2.0,
        ..Config::default()
    }
}

fn run_on(snapshot: &Snapshot, config: &Config, out: &Path) -> vecon::report::HealthReport {
    let snap_dir = out.join("snapshot");
    save_snapshot(snapshot, &snap_dir).unwrap();
    run_report(config, &Input::Snapshot(snap_dir), &out.join("report")).unwrap()
}

#[test]
fn matches_reference_pipeline() {
    let text =
        std::fs::read_to_string(common::fixtures_dir().join("report/expected.json")).unwrap();
    let expected: Value = serde_json::from_str(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_on(&economy_400(), &quick_config(), dir.path());

    assert_eq!(
        report.exclusion.retained_count as u64,
        expected["retained"].as_u64().unwrap()
    );
    assert_eq!(report.quartiles.len(), 4);
    let top = report.top.as_ref().expect("volumes present");
    let indexes: Vec<_> = report.indexes().collect();
    assert_eq!(indexes.len(), 5);
    for ix in indexes {
        let e = &expected["indexes"][ix.label.as_str()];
        assert_eq!(
            ix.members as u64,
            e["members"].as_u64().unwrap(),
            "{}",
            ix.label
        );
        assert_eq!(
            ix.first_value,
            e["first"].as_u64().unwrap() as u128,
            "{}",
            ix.label
        );
        assert_eq!(
            ix.last_value,
            e["last"].as_u64().unwrap() as u128,
            "{}",
            ix.label
        );
        let infl = e["inflation_pct"].as_f64().unwrap();
        assert!((ix.inflation_pct - infl).abs() < 1e-12, "{}", ix.label);
        let adf = ix.adf.as_ref().expect("adf ran");
        let t = e["t_stat"].as_f64().unwrap();
        assert!(
            (adf.t_stat - t).abs() < 1e-6,
            "{}: t {} vs {t}",
            ix.label,
            adf.t_stat
        );
        let p = e["p_value"].as_f64().unwrap();
        assert!(
            (adf.p_value - p).abs() < 1e-6,
            "{}: p {} vs {p}",
            ix.label,
            adf.p_value
        );
        assert_eq!(
            adf.lags_used as u64,
            e["lags_used"].as_u64().unwrap(),
            "{}",
            ix.label
        );
        assert_eq!(
            adf.n_obs as u64,
            e["n_obs"].as_u64().unwrap(),
            "{}",
            ix.label
        );
    }
    for row in &top.volume_shares {
        let e = expected["shares"][row.k.to_string()].as_f64().unwrap();
        assert!((row.share - e).abs() < 1e-12, "share k={}", row.k);
    }
    let tv = top.traded_value.as_ref().expect("bond present");
    assert_eq!(
        tv.head_value.to_string(),
        expected["traded_head"].as_str().unwrap()
    );
    assert_eq!(
        tv.all_value.to_string(),
        expected["traded_all"].as_str().unwrap()
    );

    let out = dir.path().join("report");
    for f in [
        "report.json",
        "report.md",
        "stats.csv",
        "adf.csv",
        "indexes/manifest.json",
        "indexes/top-100.csv",
        "heatmaps/mean_change_vs_log_price.csv",
        "heatmaps/cov_vs_mean_change.pgm",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let adf_csv = std::fs::read_to_string(out.join("adf.csv")).unwrap();
    assert_eq!(adf_csv.lines().count(), 6);
    assert_eq!(report.heatmaps.len(), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let snap = economy_400();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_on(&snap, &quick_config(), a.path());
    run_on(&snap, &quick_config(), b.path());
    for f in [
        "report.json",
        "report.md",
        "stats.csv",
        "adf.csv",
        "heatmaps/mean_change_vs_log_price.csv",
        "heatmaps/cov_vs_mean_change.csv",
        "heatmaps/cov_vs_mean_change.json",
    ] {
        let x = std::fs::read(a.path().join("report").join(f)).unwrap();
        let y = std::fs::read(b.path().join("report").join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn markdown_numbers_appear_in_json() {
    let dir = tempfile::tempdir().unwrap();
    run_on(&economy_400(), &quick_config(), dir.path());
    let md = std::fs::read_to_string(dir.path().join("report/report.md")).unwrap();
    let json = std::fs::read_to_string(dir.path().join("report/report.json")).unwrap();
    let mut checked = 0;
    for token in number_tokens(&md) {
        assert!(
            json.contains(&token),
            "{token} is in report.md but not report.json"
        );
        checked += 1;
    }
    assert!(checked > 30, "only {checked} numbers found");
}

/// Maximal numeric tokens (sign, digits, decimals, exponent).
fn number_tokens(text: &str) -> Vec<String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let starts = bytes[i].is_ascii_digit()
            || (bytes[i] == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit));
        let glued = i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'.');
        if !starts || glued {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < bytes.len() {
            let c = bytes[i];
            let exp_sign = (c == b'-' || c == b'+') && matches!(bytes[i - 1], b'e' | b'E');
            if c.is_ascii_digit()
                || exp_sign
                || (matches!(c, b'.' | b'e' | b'E')
                    && bytes
                        .get(i + 1)
                        .is_some_and(|d| d.is_ascii_digit() || *d == b'-' || *d == b'+'))
            {
                i += 1;
            } else {
                break;
            }
        }
        out.push(text[start..i].to_string());
    }
    out
}

#[test]
fn sixty_percent_rise_is_critical() {
    let snap = generate_economy(&EconomySpec {
        items: 200,
        drift: Some(QuartileDrift {
            quartile: 3,
            inflation_pct: 60.0,
        }),
        ..EconomySpec::default()
    });
    let a = analyze(&snap, Vec::new(), &quick_config()).unwrap();
    let upper = &a.report.quartiles[3];
    assert!(
        (upper.inflation_pct - 60.0).abs() < 2.0,
        "{}",
        upper.inflation_pct
    );
    assert_eq!(upper.alert, AlertLevel::Critical);
    for q in &a.report.quartiles[..3] {
        assert_eq!(q.alert, AlertLevel::None);
    }
}

#[test]
fn warn_band() {
    let snap = generate_economy(&EconomySpec {
        items: 200,
        drift: Some(QuartileDrift {
            quartile: 0,
            inflation_pct: 20.0,
        }),
        ..EconomySpec::default()
    });
    let a = analyze(&snap, Vec::new(), &quick_config()).unwrap();
    assert_eq!(a.report.quartiles[0].alert, AlertLevel::Warn);
}

#[test]
fn empty_snapshot_is_an_error() {
    let snap = generate_economy(&EconomySpec {
        items: 12,
        constant_items: 12,
        volume_items: 0,
        ..EconomySpec::default()
    });
    assert!(matches!(
        analyze(&snap, Vec::new(), &quick_config()),
        Err(ReportError::EmptySnapshot)
    ));
}

#[test]
fn conventions_block_present() {
    let a = analyze(&economy_400(), Vec::new(), &quick_config()).unwrap();
    let json: Value = serde_json::from_str(&a.report.to_json()).unwrap();
    assert_eq!(json["schema"], "vecon-report-v1");
    let c = &json["conventions"];
    for key in [
        "inflation_denominator",
        "sigma_divisor",
        "quartile_criterion",
        "adf_flavor",
    ] {
        assert!(c[key].as_str().is_some_and(|s| !s.is_empty()), "{key}");
    }
    assert_eq!(json["quartile_scheme"], "quartile-by-mean-price");
    assert_eq!(
        json["quartiles"][0]["adf"]["critical_values"]
            .as_object()
            .unwrap()
            .len(),
        3
    );
}
