//! Shared domain types: analysis window, price series, volume records, bond
//! quotes and the snapshot container.
//!
//! Every constructor validates its invariants and rejects violating input.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Fixed4;

/// Default analysis window length in days.
pub const DEFAULT_WINDOW_DAYS: u32 = 180;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("window length must be at least 2 days, got {0}")]
    WindowTooShort(u32),
    #[error("item id must be positive")]
    ZeroItemId,
    #[error("item {item}: day indexes must be strictly increasing")]
    NonIncreasingDays { item: ItemId },
    #[error("item {item}: prices must be positive (got {price} at day {day})")]
    NonPositivePrice { item: ItemId, day: i64, price: i64 },
    #[error("item {item}: {days} day indexes but {prices} prices")]
    LengthMismatch {
        item: ItemId,
        days: usize,
        prices: usize,
    },
    #[error("item {item}: volume must be at least 1")]
    NonPositiveVolume { item: ItemId },
    #[error("bond quote fields must be strictly positive")]
    NonPositiveBond,
    #[error("duplicate item {0}")]
    DuplicateItem(ItemId),
    #[error("item {item} is not aligned to the {length_days}-day window")]
    Misaligned { item: ItemId, length_days: u32 },
}

/// Positive integer identifier of a tradeable item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ItemId(u32);

impl ItemId {
    pub fn new(id: u32) -> Result<Self, ModelError> {
        if id == 0 {
            Err(ModelError::ZeroItemId)
        } else {
            Ok(ItemId(id))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for ItemId {
    type Error = ModelError;
    fn try_from(v: u32) -> Result<Self, Self::Error> {
        ItemId::new(v)
    }
}

impl From<ItemId> for u32 {
    fn from(id: ItemId) -> u32 {
        id.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A run of consecutive calendar days; day ordinals run `0..length_days`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    start_day: NaiveDate,
    length_days: u32,
}

impl AnalysisWindow {
    pub fn new(start_day: NaiveDate, length_days: u32) -> Result<Self, ModelError> {
        if length_days < 2 {
            return Err(ModelError::WindowTooShort(length_days));
        }
        Ok(AnalysisWindow {
            start_day,
            length_days,
        })
    }

    /// Window of `length_days` ending on (and including) `last_day`.
    pub fn ending_on(last_day: NaiveDate, length_days: u32) -> Result<Self, ModelError> {
        if length_days < 2 {
            return Err(ModelError::WindowTooShort(length_days));
        }
        let start = last_day
            .checked_sub_days(Days::new(u64::from(length_days - 1)))
            .unwrap_or(NaiveDate::MIN);
        Self::new(start, length_days)
    }

    pub fn start_day(&self) -> NaiveDate {
        self.start_day
    }

    pub fn length_days(&self) -> u32 {
        self.length_days
    }

    pub fn len(&self) -> usize {
        self.length_days as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Days since 1970-01-01 of the first window day.
    pub fn start_epoch_day(&self) -> i64 {
        epoch_day(self.start_day)
    }
}

pub fn epoch_day(date: NaiveDate) -> i64 {
    (date - NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")).num_days()
}

/// One item's daily price history.
///
/// Day indexes are ordinals: epoch days for raw (unaligned) series, window
/// ordinals `0..T` once aligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceSeries {
    item_id: ItemId,
    name: Option<String>,
    days: Vec<i64>,
    prices: Vec<u64>,
}

impl PriceSeries {
    pub fn new(
        item_id: ItemId,
        name: Option<String>,
        days: Vec<i64>,
        prices: Vec<i64>,
    ) -> Result<Self, ModelError> {
        if days.len() != prices.len() {
            return Err(ModelError::LengthMismatch {
                item: item_id,
                days: days.len(),
                prices: prices.len(),
            });
        }
        if days.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::NonIncreasingDays { item: item_id });
        }
        let mut out = Vec::with_capacity(prices.len());
        for (&day, &price) in days.iter().zip(&prices) {
            if price <= 0 {
                return Err(ModelError::NonPositivePrice {
                    item: item_id,
                    day,
                    price,
                });
            }
            out.push(price as u64);
        }
        Ok(PriceSeries {
            item_id,
            name,
            days,
            prices: out,
        })
    }

    /// Series whose day ordinals are `0..prices.len()`.
    pub fn from_daily(
        item_id: ItemId,
        name: Option<String>,
        prices: Vec<i64>,
    ) -> Result<Self, ModelError> {
        let days = (0..prices.len() as i64).collect();
        Self::new(item_id, name, days, prices)
    }

    pub fn item_id(&self) -> ItemId {
        self.item_id
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn days(&self) -> &[i64] {
        &self.days
    }

    pub fn prices(&self) -> &[u64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn prices_f64(&self) -> Vec<f64> {
        self.prices.iter().map(|&p| p as f64).collect()
    }

    pub fn is_aligned_to(&self, window: &AnalysisWindow) -> bool {
        self.days.len() == window.len() && self.days.iter().enumerate().all(|(i, &d)| d == i as i64)
    }
}

/// Total units of one item traded over the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VolumeRecord {
    item_id: ItemId,
    volume: u64,
}

impl VolumeRecord {
    pub fn new(item_id: ItemId, volume: i64) -> Result<Self, ModelError> {
        if volume < 1 {
            return Err(ModelError::NonPositiveVolume { item: item_id });
        }
        Ok(VolumeRecord {
            item_id,
            volume: volume as u64,
        })
    }

    pub fn item_id(&self) -> ItemId {
        self.item_id
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }
}

/// Canonical volume order: volume descending, ties by item id ascending.
pub fn sort_volumes(records: &mut [VolumeRecord]) {
    records.sort_by(|a, b| b.volume.cmp(&a.volume).then(a.item_id.cmp(&b.item_id)));
}

/// Official real-currency and in-game prices of a developer-sold token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBondQuote", into = "RawBondQuote")]
pub struct BondQuote {
    real_price: Fixed4,
    virtual_price: u64,
}

#[derive(Serialize, Deserialize)]
struct RawBondQuote {
    real_price: Fixed4,
    virtual_price: u64,
}

impl TryFrom<RawBondQuote> for BondQuote {
    type Error = ModelError;
    fn try_from(raw: RawBondQuote) -> Result<Self, Self::Error> {
        BondQuote::new(raw.real_price, raw.virtual_price)
    }
}

impl From<BondQuote> for RawBondQuote {
    fn from(q: BondQuote) -> Self {
        RawBondQuote {
            real_price: q.real_price,
            virtual_price: q.virtual_price,
        }
    }
}

impl BondQuote {
    pub fn new(real_price: Fixed4, virtual_price: u64) -> Result<Self, ModelError> {
        if !real_price.is_positive() || virtual_price == 0 {
            return Err(ModelError::NonPositiveBond);
        }
        Ok(BondQuote {
            real_price,
            virtual_price,
        })
    }

    /// Real currency per bond.
    pub fn real_price(&self) -> Fixed4 {
        self.real_price
    }

    /// Virtual coins per bond.
    pub fn virtual_price(&self) -> u64 {
        self.virtual_price
    }
}

/// The aligned dataset: one window, aligned series keyed by item, optional
/// volume table and bond quote.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    window: AnalysisWindow,
    series: BTreeMap<ItemId, PriceSeries>,
    volumes: Option<Vec<VolumeRecord>>,
    bond: Option<BondQuote>,
}

impl Snapshot {
    pub fn new(
        window: AnalysisWindow,
        series: Vec<PriceSeries>,
        volumes: Option<Vec<VolumeRecord>>,
        bond: Option<BondQuote>,
    ) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for s in series {
            if !s.is_aligned_to(&window) {
                return Err(ModelError::Misaligned {
                    item: s.item_id(),
                    length_days: window.length_days(),
                });
            }
            let id = s.item_id();
            if map.insert(id, s).is_some() {
                return Err(ModelError::DuplicateItem(id));
            }
        }
        let mut volumes = volumes;
        if let Some(vols) = &mut volumes {
            sort_volumes(vols);
            let mut seen = std::collections::BTreeSet::new();
            for v in vols {
                if !seen.insert(v.item_id()) {
                    return Err(ModelError::DuplicateItem(v.item_id()));
                }
            }
        }
        Ok(Snapshot {
            window,
            series: map,
            volumes,
            bond,
        })
    }

    pub fn window(&self) -> &AnalysisWindow {
        &self.window
    }

    pub fn series(&self) -> &BTreeMap<ItemId, PriceSeries> {
        &self.series
    }

    pub fn get(&self, id: ItemId) -> Option<&PriceSeries> {
        self.series.get(&id)
    }

    pub fn volumes(&self) -> Option<&[VolumeRecord]> {
        self.volumes.as_deref()
    }

    pub fn bond(&self) -> Option<&BondQuote> {
        self.bond.as_ref()
    }

    pub fn item_count(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Same window, volumes and bond, restricted to `series`.
    pub fn with_series(&self, series: Vec<PriceSeries>) -> Result<Self, ModelError> {
        Snapshot::new(self.window, series, self.volumes.clone(), self.bond)
    }

    pub fn into_parts(
        self,
    ) -> (
        AnalysisWindow,
        Vec<PriceSeries>,
        Option<Vec<VolumeRecord>>,
        Option<BondQuote>,
    ) {
        (
            self.window,
            self.series.into_values().collect(),
            self.volumes,
            self.bond,
        )
    }
}
