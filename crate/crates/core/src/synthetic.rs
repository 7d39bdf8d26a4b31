//! Seeded synthetic economies for tests, benchmarks and demos.
//!
//! Moving items are split into four price bands whose sizes follow the
//! quartile remainder rule, with a 2.5x gap between bands, so the quartile
//! partition recovers each band exactly. A band can carry a linear drift
//! sized so its summed index shows a chosen end-denominator inflation.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto};

use crate::model::{AnalysisWindow, BondQuote, ItemId, PriceSeries, Snapshot, VolumeRecord};

/// Log10 of the lowest price in band 0, band width and spacing.
const BAND_FLOOR: f64 = 3.0;
const BAND_WIDTH: f64 = 0.8;
const BAND_STEP: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuartileDrift {
    /// 0 = lower .. 3 = upper.
    pub quartile: usize,
    /// Target `100 * (last - first) / last` for the band's summed index.
    pub inflation_pct: f64,
}

#[derive(Debug, Clone)]
pub struct EconomySpec {
    pub items: usize,
    /// Items whose price never moves.
    pub constant_items: usize,
    pub days: u32,
    pub seed: u64,
    /// Half-width of the uniform multiplicative daily noise.
    pub noise: f64,
    pub drift: Option<QuartileDrift>,
    /// Size of the volume table (0 for none).
    pub volume_items: usize,
    pub bond: Option<BondQuote>,
    pub start: NaiveDate,
}

impl Default for EconomySpec {
    fn default() -> Self {
        EconomySpec {
            items: 400,
            constant_items: 0,
            days: 180,
            seed: 42,
            noise: 0.01,
            drift: None,
            volume_items: 100,
            bond: None,
            start: NaiveDate::from_ymd_opt(2018, 6, 13).expect("valid date"),
        }
    }
}

/// Quartile group sizes for `n` items: the lowest `n % 4` groups get one extra.
pub fn quartile_sizes(n: usize) -> [usize; 4] {
    let (q, r) = (n / 4, n % 4);
    [0, 1, 2, 3].map(|g| q + usize::from(g < r))
}

pub fn generate_economy(spec: &EconomySpec) -> Snapshot {
    assert!(
        spec.constant_items <= spec.items,
        "more constant items than items"
    );
    assert!(spec.days >= 2, "need at least two days");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let days = spec.days as usize;

    let mut ids: Vec<ItemId> = (1..=spec.items as u32)
        .map(|i| ItemId::new(i).expect("positive"))
        .collect();
    ids.shuffle(&mut rng);
    let (constant_ids, moving_ids) = ids.split_at(spec.constant_items);

    let mut series = Vec::with_capacity(spec.items);
    for &id in constant_ids {
        let price = 10f64.powf(rng.random_range(1.0..7.0)).round() as i64;
        series.push(PriceSeries::from_daily(id, None, vec![price.max(1); days]).expect("valid"));
    }

    let sizes = quartile_sizes(moving_ids.len());
    let mut offset = 0;
    for (band, &size) in sizes.iter().enumerate() {
        let growth = match spec.drift {
            Some(d) if d.quartile == band => 1.0 / (1.0 - d.inflation_pct / 100.0),
            _ => 1.0,
        };
        for &id in &moving_ids[offset..offset + size] {
            let lo = BAND_FLOOR + BAND_STEP * band as f64;
            let base = 10f64.powf(rng.random_range(lo..lo + BAND_WIDTH));
            let mut prices: Vec<i64> = (0..days)
                .map(|t| {
                    let trend = 1.0 + (growth - 1.0) * t as f64 / (days - 1) as f64;
                    let shock = 1.0 + spec.noise * rng.random_range(-1.0..1.0);
                    ((base * trend * shock).round() as i64).max(1)
                })
                .collect();
            if prices.iter().all(|&p| p == prices[0]) {
                prices[days - 1] += 1;
            }
            series.push(PriceSeries::from_daily(id, None, prices).expect("valid"));
        }
        offset += size;
    }

    let volumes = (spec.volume_items > 0).then(|| {
        let mut pool = moving_ids.to_vec();
        pool.shuffle(&mut rng);
        let pareto = Pareto::new(10_000.0, 1.16).expect("valid pareto");
        pool.into_iter()
            .take(spec.volume_items)
            .map(|id| {
                let v: f64 = pareto.sample(&mut rng);
                VolumeRecord::new(id, v.min(1e12) as i64).expect("volume >= 1")
            })
            .collect()
    });

    let window = AnalysisWindow::new(spec.start, spec.days).expect("valid window");
    Snapshot::new(window, series, volumes, spec.bond).expect("generated snapshot is valid")
}
