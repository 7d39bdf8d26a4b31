#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub struct AdfCase {
    pub name: String,
    pub series: Vec<f64>,
    pub expected: Value,
}

/// The committed ADF reference series and their expected results.
pub fn adf_cases() -> Vec<AdfCase> {
    let dir = fixtures_dir().join("adf");
    let text = std::fs::read_to_string(dir.join("expected.json")).expect("expected.json");
    let expected: BTreeMap<String, Value> = serde_json::from_str(&text).expect("valid json");
    expected
        .into_iter()
        .map(|(name, expected)| {
            let raw = std::fs::read_to_string(dir.join(format!("{name}.csv"))).expect("series csv");
            let series = raw
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| l.trim().parse().expect("numeric line"))
                .collect();
            AdfCase {
                name,
                series,
                expected,
            }
        })
        .collect()
}
