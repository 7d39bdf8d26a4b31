//! The composite health report: filtering, statistics, indexes, inflation,
//! ADF results, alerts and heatmaps, written as `report.json` plus a
//! markdown projection of it.

pub mod config;
mod markdown;

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{resolve_input, Config, FetchConfig, Input, WindowConfig, SOURCE_ENV};

use crate::descriptive::{
    describe, stats_to_csv, traded_value, volume_share, DescriptiveStats, StatsError,
};
use crate::heatmap::{
    export_grid, gaussian_blur, histogram2d, AxisLabels, HeatmapError, HeatmapGrid,
};
use crate::indexes::{
    build_sum_index, build_weighted_index, inflation_rate, partition_quartiles, IndexError,
    IndexSeries, Weighting, QUARTILE_SCHEME,
};
use crate::ingest::{
    filter_static, ingest, load_snapshot, ExclusionReport, IngestError, IngestOptions,
};
use crate::io::write_atomic;
use crate::model::{ItemId, ModelError, Snapshot, VolumeRecord};
use crate::money::Fixed4;
use crate::stationarity::{adf_rows_to_csv, adf_test, AdfResult};
use crate::transforms::first_difference;

pub const REPORT_SCHEMA: &str = "vecon-report-v1";
pub const TOP_LABEL: &str = "top-100";
pub const TOP_SIZE: usize = 100;
/// Size of the smaller traded-value aggregate.
pub const TRADED_VALUE_HEAD: usize = 20;
const SHARE_KS: [usize; 6] = [1, 5, 10, 20, 50, 100];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no source given: pass --source or --snapshot, set `source` in the config, or set VECON_SOURCE")]
    NoSource,
    #[error("snapshot has no items left after filtering")]
    EmptySnapshot,
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("statistics: {0}")]
    Stats(#[from] StatsError),
    #[error("index: {0}")]
    Index(#[from] IndexError),
    #[error("heatmap: {0}")]
    Heatmap(#[from] HeatmapError),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlertLevel {
    None,
    Warn,
    Critical,
}

impl AlertLevel {
    pub fn classify(inflation_pct: f64, warn_pct: f64, critical_pct: f64) -> AlertLevel {
        if inflation_pct >= critical_pct {
            AlertLevel::Critical
        } else if inflation_pct >= warn_pct {
            AlertLevel::Warn
        } else {
            AlertLevel::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AlertLevel::None => "none",
            AlertLevel::Warn => "warn",
            AlertLevel::Critical => "critical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowInfo {
    pub start_day: NaiveDate,
    pub length_days: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub inflation_warn_pct: f64,
    pub inflation_critical_pct: f64,
    pub adf_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub inflation_denominator: &'static str,
    pub sigma_divisor: &'static str,
    pub quartile_criterion: &'static str,
    pub adf_flavor: &'static str,
    pub adf_lag_selection: &'static str,
    pub adf_p_values: &'static str,
    pub adf_decision: &'static str,
    pub gap_policy: &'static str,
    pub static_exclusion: &'static str,
    pub real_value_rounding: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    inflation_denominator: "end value: 100 * (last - first) / last",
    sigma_divisor: "population (n)",
    quartile_criterion: "quartile-by-mean-price; ties by item id; the n % 4 leftover items go to the lowest groups",
    adf_flavor: "constant, no trend, on the first-differenced index",
    adf_lag_selection: "AIC over 0..=floor(12 * (n / 100)^(1/4)) on a common sample, refit at the chosen lag",
    adf_p_values: "MacKinnon (1994) response surface; critical values MacKinnon (2010)",
    adf_decision: "reject the unit-root null when p < alpha",
    gap_policy: "missing days take the previous in-window price; leading gaps take the first in-window price",
    static_exclusion: "series with max == min over the window are excluded",
    real_value_rounding: "fixed-point, 4 decimals, round half to even",
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub label: String,
    pub weighting: Weighting,
    pub members: usize,
    pub first_value: u128,
    pub last_value: u128,
    pub inflation_pct: f64,
    /// `inflation_pct` rounded to 2 decimals for presentation.
    pub inflation_pct_display: String,
    pub alert: AlertLevel,
    pub adf: Option<AdfResult>,
    pub adf_error: Option<String>,
    /// `adf.p_value < adf_alpha`.
    pub rejects_unit_root: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareRow {
    pub k: usize,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradedValue {
    pub head_items: usize,
    pub head_value: Fixed4,
    pub all_items: usize,
    pub all_value: Fixed4,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopReport {
    pub index: IndexReport,
    /// Volume-table entries dropped because their item was not retained.
    pub dropped_ids: Vec<ItemId>,
    pub volume_shares: Vec<ShareRow>,
    pub traded_value: Option<TradedValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapFiles {
    pub csv: String,
    pub json: String,
    pub pgm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapSummary {
    pub name: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub points: usize,
    pub bins: usize,
    pub sigma: f64,
    pub total_mass: f64,
    pub files: HeatmapFiles,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedItem {
    pub item_id: ItemId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HealthReport {
    pub schema: &'static str,
    pub window: WindowInfo,
    pub exclusion: ExclusionReport,
    /// Items dropped while aligning raw documents to the window.
    pub rejected: Vec<RejectedItem>,
    pub thresholds: Thresholds,
    pub conventions: Conventions,
    pub quartile_scheme: &'static str,
    pub quartiles: Vec<IndexReport>,
    pub mean_quartile_inflation_pct: f64,
    pub top: Option<TopReport>,
    pub heatmaps: Vec<HeatmapSummary>,
    pub notes: Vec<String>,
}

impl HealthReport {
    /// Every analysed index, quartiles first.
    pub fn indexes(&self) -> impl Iterator<Item = &IndexReport> {
        self.quartiles
            .iter()
            .chain(self.top.as_ref().map(|t| &t.index))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        markdown::render(self)
    }
}

/// A blurred heatmap ready for export.
#[derive(Debug, Clone)]
pub struct NamedGrid {
    pub name: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub grid: HeatmapGrid,
}

/// Everything computed by [`analyze`]; written out by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: HealthReport,
    pub stats: Vec<DescriptiveStats>,
    pub indexes: Vec<IndexSeries>,
    pub heatmaps: Vec<NamedGrid>,
}

/// Loads a snapshot or ingests raw documents, returning alignment rejects.
pub fn load_input(
    input: &Input,
    config: &Config,
) -> Result<(Snapshot, Vec<RejectedItem>), ReportError> {
    match input {
        Input::Snapshot(dir) => {
            let snap = load_snapshot(dir)?;
            let snap = match config.bond {
                Some(bond) if snap.bond().is_none() => {
                    let (window, series, volumes, _) = snap.into_parts();
                    Snapshot::new(window, series, volumes, Some(bond))?
                }
                _ => snap,
            };
            Ok((snap, Vec::new()))
        }
        Input::Raw(source) => {
            let opts = IngestOptions {
                window: config.explicit_window()?,
                window_days: config.window_days(),
                min_coverage: config.min_coverage,
                bond: config.bond,
                volume_table: config.volume_table.clone(),
                policy: config.policy(),
            };
            let ids = config.item_ids();
            let outcome = ingest(source, ids.as_deref(), &opts)?;
            let rejected = outcome
                .rejected
                .into_iter()
                .map(|(item_id, e)| RejectedItem {
                    item_id,
                    reason: e.to_string(),
                })
                .collect();
            Ok((outcome.snapshot, rejected))
        }
    }
}

pub fn index_report(index: &IndexSeries, config: &Config) -> Result<IndexReport, ReportError> {
    let inflation = inflation_rate(index)?;
    let values = index.values_f64();
    let diffs = first_difference(&values).map_err(StatsError::from)?;
    let (adf, adf_error) = match adf_test(&diffs, None) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(IndexReport {
        label: index.label.clone(),
        weighting: index.weighting,
        members: index.membership.len(),
        first_value: index.values[0],
        last_value: *index.values.last().expect("inflation_rate checked length"),
        inflation_pct: inflation,
        inflation_pct_display: format!("{inflation:.2}"),
        alert: AlertLevel::classify(
            inflation,
            config.inflation_warn_pct,
            config.inflation_critical_pct,
        ),
        rejects_unit_root: adf.as_ref().map(|a| a.rejects_at(config.adf_alpha)),
        adf,
        adf_error,
    })
}

/// Filtered snapshot, per-item stats and every index, before any testing.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub filtered: Snapshot,
    pub exclusion: ExclusionReport,
    pub stats: Vec<DescriptiveStats>,
    /// Four quartile indexes, then the top-100 index when volumes exist.
    pub indexes: Vec<IndexSeries>,
    /// Volume records backing the top-100 index.
    pub top_table: Vec<VolumeRecord>,
    /// Volume-table entries dropped because their item was not retained.
    pub dropped_volume_ids: Vec<ItemId>,
}

pub fn prepare(snapshot: &Snapshot) -> Result<Prepared, ReportError> {
    let all: Vec<_> = snapshot.series().values().cloned().collect();
    let (retained, exclusion) = filter_static(all);
    if retained.is_empty() {
        return Err(ReportError::EmptySnapshot);
    }
    let filtered = snapshot.with_series(retained)?;

    let stats = filtered
        .series()
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|s| describe(s))
        .collect::<Result<Vec<_>, _>>()?;

    let partition = partition_quartiles(&stats)?;
    let mut indexes = Vec::with_capacity(5);
    for (label, members) in partition.labelled() {
        indexes.push(build_sum_index(&filtered, members, label)?);
    }

    let (mut top_table, mut dropped_volume_ids) = (Vec::new(), Vec::new());
    if let Some(vols) = filtered.volumes() {
        for v in vols {
            if filtered.get(v.item_id()).is_some() {
                if top_table.len() < TOP_SIZE {
                    top_table.push(*v);
                }
            } else {
                dropped_volume_ids.push(v.item_id());
            }
        }
        dropped_volume_ids.sort_unstable();
        if !top_table.is_empty() {
            indexes.push(build_weighted_index(&filtered, &top_table, TOP_LABEL)?);
        }
    }
    Ok(Prepared {
        filtered,
        exclusion,
        stats,
        indexes,
        top_table,
        dropped_volume_ids,
    })
}

fn top_section(
    prepared: &Prepared,
    index: &IndexSeries,
    config: &Config,
) -> Result<TopReport, ReportError> {
    let table = &prepared.top_table;
    let report = index_report(index, config)?;

    let mut ks: Vec<usize> = SHARE_KS.iter().map(|&k| k.min(table.len())).collect();
    ks.dedup();
    let volume_shares = ks
        .into_iter()
        .map(|k| {
            Ok(ShareRow {
                k,
                share: volume_share(table, k)?,
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;

    let traded_value = match prepared.filtered.bond() {
        Some(bond) => {
            let mut values = Vec::with_capacity(table.len());
            for v in table {
                let s = prepared
                    .stats
                    .iter()
                    .find(|s| s.item_id == v.item_id())
                    .expect("retained items have stats");
                values.push(traded_value(s.mean_price, v.volume(), bond)?);
            }
            let sum = |vals: &[Fixed4]| {
                vals.iter()
                    .try_fold(Fixed4::ZERO, |acc, &x| acc.checked_add(x))
                    .ok_or(StatsError::Overflow)
            };
            let head = TRADED_VALUE_HEAD.min(values.len());
            Some(TradedValue {
                head_items: head,
                head_value: sum(&values[..head])?,
                all_items: values.len(),
                all_value: sum(&values)?,
            })
        }
        None => None,
    };

    Ok(TopReport {
        index: report,
        dropped_ids: prepared.dropped_volume_ids.clone(),
        volume_shares,
        traded_value,
    })
}

pub(crate) type HeatmapSpec = (
    &'static str,
    &'static str,
    &'static str,
    fn(&DescriptiveStats) -> (f64, f64),
);

pub(crate) const HEATMAPS: [HeatmapSpec; 2] = [
    (
        "mean_change_vs_log_price",
        "log mean price",
        "mean daily change",
        |s| (s.log_mean_price, s.mean_daily_pct_change),
    ),
    (
        "cov_vs_mean_change",
        "mean daily change",
        "coefficient of variation",
        |s| (s.mean_daily_pct_change, s.cov),
    ),
];

/// Runs every analysis step on an in-memory snapshot. No files are touched.
pub fn analyze(
    snapshot: &Snapshot,
    rejected: Vec<RejectedItem>,
    config: &Config,
) -> Result<Analysis, ReportError> {
    config.validate()?;
    let prepared = prepare(snapshot)?;
    let stats = &prepared.stats;

    let quartiles = prepared.indexes[..4]
        .iter()
        .map(|ix| index_report(ix, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mean_quartile_inflation_pct =
        quartiles.iter().map(|q| q.inflation_pct).sum::<f64>() / quartiles.len() as f64;

    let mut notes = vec![
        "Inflation is measured against the window's end value, not its start value.".to_string(),
        "ADF decisions use p < alpha; both the p-value and the decision are reported.".to_string(),
        "Quartiles are formed by mean price over the window.".to_string(),
    ];
    let top = match prepared.indexes.get(4) {
        Some(index) => {
            let top = top_section(&prepared, index, config)?;
            if top.traded_value.is_none() {
                notes.push("No bond quote configured: traded values are omitted.".to_string());
            }
            Some(top)
        }
        None => {
            notes.push("No volume table: the top-100 index is omitted.".to_string());
            None
        }
    };

    let points: Vec<Vec<(f64, f64)>> = HEATMAPS
        .iter()
        .map(|(_, _, _, f)| stats.iter().map(f).collect())
        .collect();
    let grids = points
        .par_iter()
        .map(|p| {
            let raw = histogram2d(p, config.heatmap_bins)?;
            gaussian_blur(&raw, config.heatmap_sigma)
        })
        .collect::<Result<Vec<_>, HeatmapError>>()?;
    let mut heatmaps = Vec::with_capacity(grids.len());
    let mut summaries = Vec::with_capacity(grids.len());
    for ((name, x_label, y_label, _), grid) in HEATMAPS.iter().zip(grids) {
        let rel = |ext: &str| format!("heatmaps/{name}.{ext}");
        summaries.push(HeatmapSummary {
            name,
            x_label,
            y_label,
            points: stats.len(),
            bins: grid.bins,
            sigma: grid.sigma,
            total_mass: grid.total(),
            files: HeatmapFiles {
                csv: rel("csv"),
                json: rel("json"),
                pgm: rel("pgm"),
            },
        });
        heatmaps.push(NamedGrid {
            name,
            x_label,
            y_label,
            grid,
        });
    }

    let report = HealthReport {
        schema: REPORT_SCHEMA,
        window: WindowInfo {
            start_day: prepared.filtered.window().start_day(),
            length_days: prepared.filtered.window().length_days(),
        },
        exclusion: prepared.exclusion,
        rejected,
        thresholds: Thresholds {
            inflation_warn_pct: config.inflation_warn_pct,
            inflation_critical_pct: config.inflation_critical_pct,
            adf_alpha: config.adf_alpha,
        },
        conventions: CONVENTIONS,
        quartile_scheme: QUARTILE_SCHEME,
        quartiles,
        mean_quartile_inflation_pct,
        top,
        heatmaps: summaries,
        notes,
    };
    Ok(Analysis {
        report,
        stats: prepared.stats,
        indexes: prepared.indexes,
        heatmaps,
    })
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<(), ReportError> {
    write_atomic(&path, bytes).map_err(|source| ReportError::Io { path, source })
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    label: &'a str,
    weighting: Weighting,
    members: &'a [ItemId],
    file: String,
}

/// Writes `report.json`, `report.md`, `stats.csv`, `adf.csv`,
/// `indexes/*.csv` with a manifest, and `heatmaps/*` under `out`.
pub fn write_outputs(analysis: &Analysis, out: &Path) -> Result<(), ReportError> {
    let report = &analysis.report;
    write(
        out.join("stats.csv"),
        stats_to_csv(&analysis.stats).as_bytes(),
    )?;

    let rows = report
        .indexes()
        .filter_map(|ix| ix.adf.as_ref().map(|a| (ix.label.as_str(), a)));
    write(out.join("adf.csv"), adf_rows_to_csv(rows).as_bytes())?;

    let mut manifest = Vec::with_capacity(analysis.indexes.len());
    for ix in &analysis.indexes {
        let file = format!("indexes/{}.csv", ix.label);
        write(out.join(&file), ix.to_csv().as_bytes())?;
        manifest.push(ManifestEntry {
            label: &ix.label,
            weighting: ix.weighting,
            members: &ix.membership,
            file,
        });
    }
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write(out.join("indexes/manifest.json"), json.as_bytes())?;

    for h in &analysis.heatmaps {
        let labels = AxisLabels {
            name: h.name,
            x: h.x_label,
            y: h.y_label,
        };
        export_grid(&h.grid, labels, &out.join("heatmaps").join(h.name))?;
    }

    write(out.join("report.md"), report.to_markdown().as_bytes())?;
    write(out.join("report.json"), report.to_json().as_bytes())?;
    Ok(())
}

/// Full pipeline: load or ingest, analyse, write everything under `out`.
pub fn run_report(config: &Config, input: &Input, out: &Path) -> Result<HealthReport, ReportError> {
    config.validate()?;
    let (snapshot, rejected) = load_input(input, config)?;
    let analysis = analyze(&snapshot, rejected, config)?;
    write_outputs(&analysis, out)?;
    Ok(analysis.report)
}
