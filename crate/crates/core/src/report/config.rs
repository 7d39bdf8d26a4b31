use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::heatmap::{DEFAULT_BINS, DEFAULT_SIGMA};
use crate::ingest::{FetchPolicy, Source, DEFAULT_MIN_COVERAGE};
use crate::model::{AnalysisWindow, BondQuote, ItemId, DEFAULT_WINDOW_DAYS};

/// Environment variable consulted for the source when neither a flag nor
/// the config file names one.
pub const SOURCE_ENV: &str = "VECON_SOURCE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// First day; when absent the window ends on the latest observation.
    #[serde(default)]
    pub start_day: Option<NaiveDate>,
    #[serde(default = "default_window_days")]
    pub length_days: u32,
}

fn default_window_days() -> u32 {
    DEFAULT_WINDOW_DAYS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FetchConfig {
    pub min_request_interval_ms: u64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        let p = FetchPolicy::default();
        FetchConfig {
            min_request_interval_ms: p.min_request_interval_ms,
            max_retries: p.max_retries,
            backoff_base_ms: p.backoff_base_ms,
        }
    }
}

/// Run configuration, read from JSON. Every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Endpoint URL, fixture directory or snapshot directory.
    pub source: Option<String>,
    pub items: Option<Vec<u32>>,
    pub volume_table: Option<PathBuf>,
    pub window: Option<WindowConfig>,
    pub bond: Option<BondQuote>,
    pub min_coverage: f64,
    pub inflation_warn_pct: f64,
    pub inflation_critical_pct: f64,
    pub adf_alpha: f64,
    pub heatmap_bins: usize,
    pub heatmap_sigma: f64,
    pub fetch: FetchConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            source: None,
            items: None,
            volume_table: None,
            window: None,
            bond: None,
            min_coverage: DEFAULT_MIN_COVERAGE,
            inflation_warn_pct: 10.0,
            inflation_critical_pct: 50.0,
            adf_alpha: 0.05,
            heatmap_bins: DEFAULT_BINS,
            heatmap_sigma: DEFAULT_SIGMA,
            fetch: FetchConfig::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, ReportError> {
        let config: Config =
            serde_json::from_str(text).map_err(|e| ReportError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config, ReportError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ReportError::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?;
        Config::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        let bad = |m: String| Err(ReportError::InvalidConfig(m));
        if !(self.inflation_warn_pct > 0.0 && self.inflation_warn_pct < self.inflation_critical_pct)
        {
            return bad(format!(
                "need 0 < inflation_warn_pct ({}) < inflation_critical_pct ({})",
                self.inflation_warn_pct, self.inflation_critical_pct
            ));
        }
        if !(self.adf_alpha > 0.0 && self.adf_alpha < 1.0) {
            return bad(format!(
                "adf_alpha must be in (0, 1), got {}",
                self.adf_alpha
            ));
        }
        if !(0.0..=1.0).contains(&self.min_coverage) {
            return bad(format!(
                "min_coverage must be in [0, 1], got {}",
                self.min_coverage
            ));
        }
        if self.heatmap_bins == 0 {
            return bad("heatmap_bins must be positive".into());
        }
        if self.heatmap_sigma.is_nan() || self.heatmap_sigma < 0.0 {
            return bad(format!(
                "heatmap_sigma must be non-negative, got {}",
                self.heatmap_sigma
            ));
        }
        if let Some(w) = &self.window {
            if w.length_days < 2 {
                return bad(format!(
                    "window length_days must be >= 2, got {}",
                    w.length_days
                ));
            }
        }
        if let Some(items) = &self.items {
            if items.contains(&0) {
                return bad("item ids must be positive".into());
            }
        }
        Ok(())
    }

    pub fn policy(&self) -> FetchPolicy {
        FetchPolicy {
            min_request_interval_ms: self.fetch.min_request_interval_ms,
            max_retries: self.fetch.max_retries,
            backoff_base_ms: self.fetch.backoff_base_ms.max(1),
        }
    }

    pub fn item_ids(&self) -> Option<Vec<ItemId>> {
        self.items
            .as_ref()
            .map(|v| v.iter().filter_map(|&i| ItemId::new(i).ok()).collect())
    }

    pub fn explicit_window(&self) -> Result<Option<AnalysisWindow>, ReportError> {
        match &self.window {
            Some(WindowConfig {
                start_day: Some(start),
                length_days,
            }) => Ok(Some(
                AnalysisWindow::new(*start, *length_days)
                    .map_err(|e| ReportError::InvalidConfig(e.to_string()))?,
            )),
            _ => Ok(None),
        }
    }

    pub fn window_days(&self) -> u32 {
        self.window
            .as_ref()
            .map_or(DEFAULT_WINDOW_DAYS, |w| w.length_days)
    }
}

/// Where a run reads its data from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    /// A canonical snapshot directory.
    Snapshot(PathBuf),
    /// Raw documents to ingest first.
    Raw(Source),
}

/// Picks the input: explicit snapshot flag, then source flag, then the
/// config's `source`, then `VECON_SOURCE`. A directory holding `meta.json`
/// is a snapshot.
pub fn resolve_input(
    snapshot_flag: Option<&Path>,
    source_flag: Option<&str>,
    config: &Config,
    env_source: Option<String>,
) -> Result<Input, ReportError> {
    if let Some(p) = snapshot_flag {
        return Ok(Input::Snapshot(p.to_path_buf()));
    }
    let source = source_flag
        .map(str::to_string)
        .or_else(|| config.source.clone())
        .or(env_source)
        .ok_or(ReportError::NoSource)?;
    Ok(match Source::parse(&source) {
        Source::Fixtures(dir) if dir.join("meta.json").is_file() => Input::Snapshot(dir),
        other => Input::Raw(other),
    })
}
