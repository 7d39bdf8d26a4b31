//! Per-item summary statistics, top-k volume shares and traded value.

use serde::Serialize;
use thiserror::Error;

use crate::fmt::format_sig;
use crate::model::{BondQuote, ItemId, PriceSeries, VolumeRecord};
use crate::money::Fixed4;
use crate::transforms::{pct_returns, to_real_value_fixed, TransformError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series needs at least 2 observations, got {0}")]
    SeriesTooShort(usize),
    #[error("k = {k} outside 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("traded value overflowed")]
    Overflow,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub item_id: ItemId,
    pub mean_price: f64,
    /// Population standard deviation (divisor n).
    pub std_price: f64,
    /// Coefficient of variation, `std_price / mean_price`.
    pub cov: f64,
    pub mean_daily_pct_change: f64,
    pub log_mean_price: f64,
}

pub fn describe(series: &PriceSeries) -> Result<DescriptiveStats, StatsError> {
    let prices = series.prices();
    let n = prices.len();
    if n < 2 {
        return Err(StatsError::SeriesTooShort(n));
    }
    let values = series.prices_f64();
    let (mean, std, cov) = match integer_moments(prices) {
        Some(m) => m,
        None => {
            let s = summarize(&values)?;
            (s.mean, s.std, s.cov)
        }
    };
    let returns = pct_returns(&values)?;
    Ok(DescriptiveStats {
        item_id: series.item_id(),
        mean_price: mean,
        std_price: std,
        cov,
        mean_daily_pct_change: returns.iter().sum::<f64>() / returns.len() as f64,
        log_mean_price: mean.ln(),
    })
}

/// Mean, population sigma and cov from exact integer sums:
/// `n^2 var = n * sum(p^2) - sum(p)^2`. `None` on u128 overflow.
fn integer_moments(prices: &[u64]) -> Option<(f64, f64, f64)> {
    let n = prices.len() as u128;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    for &p in prices {
        let p = u128::from(p);
        sum = sum.checked_add(p)?;
        sum_sq = sum_sq.checked_add(p.checked_mul(p)?)?;
    }
    let scaled_var = n.checked_mul(sum_sq)?.checked_sub(sum.checked_mul(sum)?)?;
    let root = (scaled_var as f64).sqrt();
    let nf = n as f64;
    let mean = sum as f64 / nf;
    Some((mean, root / nf, root / sum as f64))
}

/// The numeric part of [`describe`] for an arbitrary positive series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub cov: f64,
    pub mean_daily_pct_change: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::SeriesTooShort(n));
    }
    let returns = pct_returns(values)?;
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let std = var.sqrt();
    let mean_daily_pct_change = returns.iter().sum::<f64>() / returns.len() as f64;
    Ok(Summary {
        mean,
        std,
        cov: std / mean,
        mean_daily_pct_change,
    })
}

/// Share of total volume held by the `k` most traded items.
pub fn volume_share(volumes: &[VolumeRecord], k: usize) -> Result<f64, StatsError> {
    if k == 0 || k > volumes.len() {
        return Err(StatsError::KOutOfRange {
            k,
            len: volumes.len(),
        });
    }
    let mut sorted: Vec<u64> = volumes.iter().map(|v| v.volume()).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: u128 = sorted.iter().map(|&v| u128::from(v)).sum();
    let top: u128 = sorted[..k].iter().map(|&v| u128::from(v)).sum();
    if top == total {
        return Ok(1.0);
    }
    Ok(top as f64 / total as f64)
}

/// Real value of `volume` units at `mean_price` coins each:
/// `to_real_value(mean_price) * volume`.
pub fn traded_value(mean_price: f64, volume: u64, quote: &BondQuote) -> Result<Fixed4, StatsError> {
    let coins = Fixed4::from_f64(mean_price).ok_or(StatsError::Overflow)?;
    to_real_value_fixed(coins, quote)
        .checked_mul_int(i128::from(volume))
        .ok_or(StatsError::Overflow)
}

/// Header of the stats CSV export.
pub const STATS_CSV_HEADER: &str =
    "item_id,mean_price,std_price,cov,mean_daily_pct_change,log_mean_price";

/// Renders stats as CSV with 12 significant digits.
pub fn stats_to_csv(stats: &[DescriptiveStats]) -> String {
    let mut out = String::with_capacity(64 * (stats.len() + 1));
    out.push_str(STATS_CSV_HEADER);
    out.push('\n');
    for s in stats {
        let cols = [
            s.mean_price,
            s.std_price,
            s.cov,
            s.mean_daily_pct_change,
            s.log_mean_price,
        ];
        out.push_str(&s.item_id.to_string());
        for c in cols {
            out.push(',');
            out.push_str(&format_sig(c, 12));
        }
        out.push('\n');
    }
    out
}
