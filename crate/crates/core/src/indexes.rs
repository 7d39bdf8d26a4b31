//! Quartile partitioning, summed and volume-weighted price indexes, and
//! window inflation rates.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::descriptive::DescriptiveStats;
use crate::model::{ItemId, Snapshot, VolumeRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("need at least 4 items to form quartiles, got {0}")]
    TooFewItems(usize),
    #[error("index membership is empty")]
    EmptyMembership,
    #[error("item {0} is not in the snapshot")]
    UnknownMember(ItemId),
    #[error("item {0} has a non-positive volume")]
    NonPositiveVolume(ItemId),
    #[error("index needs at least 2 values, got {0}")]
    SeriesTooShort(usize),
    #[error("index end value is zero")]
    ZeroEndValue,
}

pub const QUARTILE_SCHEME: &str = "quartile-by-mean-price";
pub const QUARTILE_LABELS: [&str; 4] = ["lower", "lower-mid", "upper-mid", "upper"];

/// Four disjoint rank groups, lowest mean price first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub scheme: &'static str,
    pub groups: [Vec<ItemId>; 4],
}

impl Partition {
    pub fn labelled(&self) -> impl Iterator<Item = (&'static str, &[ItemId])> {
        QUARTILE_LABELS
            .iter()
            .zip(self.groups.iter())
            .map(|(l, g)| (*l, g.as_slice()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Unit,
    Volume,
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Unit => "unit",
            Weighting::Volume => "volume",
        }
    }
}

/// An aggregate daily price series. Values are exact integer sums of
/// (optionally volume-weighted) coin prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSeries {
    pub label: String,
    pub values: Vec<u128>,
    pub membership: Vec<ItemId>,
    pub weighting: Weighting,
}

impl IndexSeries {
    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("day_index,value\n");
        for (day, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{day},{v}\n"));
        }
        out
    }
}

/// Ranks items by mean price (ties by item id) and cuts them into four
/// contiguous groups; with `n = 4q + r` the lowest `r` groups get `q + 1`.
pub fn partition_quartiles(stats: &[DescriptiveStats]) -> Result<Partition, IndexError> {
    let n = stats.len();
    if n < 4 {
        return Err(IndexError::TooFewItems(n));
    }
    let mut ranked: Vec<(f64, ItemId)> = stats.iter().map(|s| (s.mean_price, s.item_id)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let (q, r) = (n / 4, n % 4);
    let mut groups: [Vec<ItemId>; 4] = Default::default();
    let mut iter = ranked.into_iter().map(|(_, id)| id);
    for (g, group) in groups.iter_mut().enumerate() {
        let size = q + usize::from(g < r);
        group.extend(iter.by_ref().take(size));
    }
    Ok(Partition {
        scheme: QUARTILE_SCHEME,
        groups,
    })
}

/// `values[t] = sum of member prices on day t`.
pub fn build_sum_index(
    snapshot: &Snapshot,
    membership: &[ItemId],
    label: &str,
) -> Result<IndexSeries, IndexError> {
    let weighted: Vec<(ItemId, u64)> = membership.iter().map(|&id| (id, 1)).collect();
    let mut index = weighted_sum(snapshot, &weighted, label)?;
    index.weighting = Weighting::Unit;
    Ok(index)
}

/// `values[t] = sum of volume_i * price_i[t]` over the volume table's items.
pub fn build_weighted_index(
    snapshot: &Snapshot,
    volumes: &[VolumeRecord],
    label: &str,
) -> Result<IndexSeries, IndexError> {
    let mut weighted = Vec::with_capacity(volumes.len());
    for v in volumes {
        if v.volume() == 0 {
            return Err(IndexError::NonPositiveVolume(v.item_id()));
        }
        weighted.push((v.item_id(), v.volume()));
    }
    let mut index = weighted_sum(snapshot, &weighted, label)?;
    index.weighting = Weighting::Volume;
    Ok(index)
}

fn weighted_sum(
    snapshot: &Snapshot,
    members: &[(ItemId, u64)],
    label: &str,
) -> Result<IndexSeries, IndexError> {
    if members.is_empty() {
        return Err(IndexError::EmptyMembership);
    }
    let mut values = vec![0u128; snapshot.window().len()];
    let mut membership = Vec::with_capacity(members.len());
    let mut seen = BTreeSet::new();
    for &(id, weight) in members {
        let series = snapshot.get(id).ok_or(IndexError::UnknownMember(id))?;
        if !seen.insert(id) {
            continue;
        }
        membership.push(id);
        let w = u128::from(weight);
        for (acc, &p) in values.iter_mut().zip(series.prices()) {
            *acc += w * u128::from(p);
        }
    }
    Ok(IndexSeries {
        label: label.to_string(),
        values,
        membership,
        weighting: Weighting::Unit,
    })
}

/// Window inflation in percent, measured against the END value:
/// `100 * (last - first) / last`.
pub fn inflation_rate(index: &IndexSeries) -> Result<f64, IndexError> {
    let n = index.values.len();
    if n < 2 {
        return Err(IndexError::SeriesTooShort(n));
    }
    let first = index.values[0];
    let last = index.values[n - 1];
    if last == 0 {
        return Err(IndexError::ZeroEndValue);
    }
    // exact integer difference before the single division
    let diff = if last >= first {
        (last - first) as f64
    } else {
        -((first - last) as f64)
    };
    Ok(100.0 * diff / last as f64)
}

/// [`inflation_rate`] for a real-valued series.
pub fn inflation_pct(values: &[f64]) -> Result<f64, IndexError> {
    let n = values.len();
    if n < 2 {
        return Err(IndexError::SeriesTooShort(n));
    }
    let (first, last) = (values[0], values[n - 1]);
    if last == 0.0 {
        return Err(IndexError::ZeroEndValue);
    }
    Ok(100.0 * (last - first) / last)
}
