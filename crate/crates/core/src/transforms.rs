//! Pure series transforms: real-value mapping, logarithm, first differences
//! and simple returns.

use std::ops::Sub;

use thiserror::Error;

use crate::model::{BondQuote, ItemId, PriceSeries};
use crate::money::{div_round_half_even, Fixed4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("series needs at least 2 values, got {0}")]
    SeriesTooShort(usize),
    #[error("value at position {index} must be strictly positive (got {value})")]
    NonPositiveValue { index: usize, value: f64 },
}

/// An item's prices expressed in real currency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealValueSeries {
    pub item_id: ItemId,
    pub values: Vec<Fixed4>,
}

/// Real-currency value of `price` coins: `B_r / B_v * price`, rounded half
/// to even at four fractional digits.
pub fn to_real_value(price: u64, quote: &BondQuote) -> Fixed4 {
    to_real_value_fixed(Fixed4::from_int(i128::from(price)), quote)
}

/// As [`to_real_value`] for a fractional coin amount (e.g. a mean price).
pub fn to_real_value_fixed(coins: Fixed4, quote: &BondQuote) -> Fixed4 {
    // raw(result) = raw(B_r) * raw(coins) / (B_v * 10^4)
    let num = quote.real_price().raw() * coins.raw();
    let den = i128::from(quote.virtual_price()) * 10_000;
    Fixed4::from_raw(div_round_half_even(num, den))
}

pub fn real_value_series(series: &PriceSeries, quote: &BondQuote) -> RealValueSeries {
    RealValueSeries {
        item_id: series.item_id(),
        values: series
            .prices()
            .iter()
            .map(|&p| to_real_value(p, quote))
            .collect(),
    }
}

/// Elementwise natural logarithm.
pub fn log_series(values: &[f64]) -> Result<Vec<f64>, TransformError> {
    check_positive(values)?;
    Ok(values.iter().map(|v| v.ln()).collect())
}

/// `out[t] = values[t + 1] - values[t]`.
pub fn first_difference<T>(values: &[T]) -> Result<Vec<T>, TransformError>
where
    T: Copy + Sub<Output = T>,
{
    if values.len() < 2 {
        return Err(TransformError::SeriesTooShort(values.len()));
    }
    Ok(values.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Simple (arithmetic) returns `(v[t+1] - v[t]) / v[t]`.
pub fn pct_returns(values: &[f64]) -> Result<Vec<f64>, TransformError> {
    if values.len() < 2 {
        return Err(TransformError::SeriesTooShort(values.len()));
    }
    check_positive(values)?;
    Ok(values.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect())
}

fn check_positive(values: &[f64]) -> Result<(), TransformError> {
    match values.iter().position(|v| v.is_nan() || *v <= 0.0) {
        Some(index) => Err(TransformError::NonPositiveValue {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
