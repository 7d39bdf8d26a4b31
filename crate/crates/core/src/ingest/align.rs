use serde::Serialize;

use super::IngestError;
use crate::model::{AnalysisWindow, ItemId, PriceSeries};

pub const DEFAULT_MIN_COVERAGE: f64 = 0.90;

/// Outcome of [`filter_static`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExclusionReport {
    pub input_count: usize,
    pub retained_count: usize,
    /// Items with zero movement over the whole window, ascending.
    pub excluded_ids: Vec<ItemId>,
}

/// Drops every series whose maximum equals its minimum.
pub fn filter_static(series: Vec<PriceSeries>) -> (Vec<PriceSeries>, ExclusionReport) {
    let input_count = series.len();
    let (retained, excluded): (Vec<_>, Vec<_>) = series.into_iter().partition(|s| {
        let p = s.prices();
        p.iter().any(|&v| v != p[0])
    });
    let mut excluded_ids: Vec<ItemId> = excluded.iter().map(PriceSeries::item_id).collect();
    excluded_ids.sort_unstable();
    let report = ExclusionReport {
        input_count,
        retained_count: retained.len(),
        excluded_ids,
    };
    (retained, report)
}

/// Maps a raw series (epoch-day indexes) onto the window's `0..T` ordinals.
///
/// Gaps take the most recent prior in-window price; days before the first
/// in-window observation take that first price.
pub fn align_series(
    series: &PriceSeries,
    window: &AnalysisWindow,
    min_coverage: f64,
) -> Result<PriceSeries, IngestError> {
    let start = window.start_epoch_day();
    let len = window.len();
    let mut slots: Vec<Option<i64>> = vec![None; len];
    let mut observed = 0usize;
    for (&day, &price) in series.days().iter().zip(series.prices()) {
        let offset = day - start;
        if (0..len as i64).contains(&offset) {
            slots[offset as usize] = Some(price as i64);
            observed += 1;
        }
    }
    let item = series.item_id();
    if observed == 0 {
        return Err(IngestError::NoOverlap(item));
    }
    let coverage = observed as f64 / len as f64;
    if coverage < min_coverage {
        return Err(IngestError::InsufficientCoverage {
            item,
            coverage,
            min_coverage,
        });
    }
    let first = slots
        .iter()
        .flatten()
        .next()
        .copied()
        .expect("observed > 0");
    let mut last = first;
    let prices: Vec<i64> = slots
        .into_iter()
        .map(|slot| {
            if let Some(p) = slot {
                last = p;
            }
            last
        })
        .collect();
    Ok(PriceSeries::from_daily(
        item,
        series.name().map(str::to_string),
        prices,
    )?)
}

/// Aligns every series, failing on the first one that cannot be aligned.
pub fn align_window(
    series: &[PriceSeries],
    window: &AnalysisWindow,
    min_coverage: f64,
) -> Result<Vec<PriceSeries>, IngestError> {
    series
        .iter()
        .map(|s| align_series(s, window, min_coverage))
        .collect()
}
