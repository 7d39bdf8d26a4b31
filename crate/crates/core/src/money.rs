//! Fixed-point decimal with four fractional digits, used for real-currency
//! amounts and bond quotes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fractional digits carried by [`Fixed4`].
pub const SCALE_DIGITS: u32 = 4;
const SCALE: i128 = 10_000;

/// A signed decimal stored as an integer count of 1/10000 units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed4(i128);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid decimal {0:?}: expected digits with at most 4 fractional places")]
pub struct ParseFixedError(pub String);

impl Fixed4 {
    pub const ZERO: Fixed4 = Fixed4(0);

    pub const fn from_raw(raw: i128) -> Self {
        Fixed4(raw)
    }

    /// Raw value in units of 1/10000.
    pub const fn raw(self) -> i128 {
        self.0
    }

    pub fn from_int(v: i128) -> Self {
        Fixed4(v * SCALE)
    }

    /// Rounds `v` half-to-even at the fourth fractional digit.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let scaled = (v * SCALE as f64).round_ties_even();
        if scaled.abs() >= 1e37 {
            return None;
        }
        Some(Fixed4(scaled as i128))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn checked_add(self, other: Fixed4) -> Option<Fixed4> {
        self.0.checked_add(other.0).map(Fixed4)
    }

    pub fn checked_mul_int(self, k: i128) -> Option<Fixed4> {
        self.0.checked_mul(k).map(Fixed4)
    }
}

/// Integer division rounding half to even. `den` must be positive.
pub(crate) fn div_round_half_even(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    // r in [0, den): compare 2r with den
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q % 2 == 0 {
                q
            } else {
                q + 1
            }
        }
    }
}

impl fmt::Display for Fixed4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let scale = SCALE as u128;
        write!(f, "{sign}{}.{:04}", abs / scale, abs % scale)
    }
}

impl FromStr for Fixed4 {
    type Err = ParseFixedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFixedError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if frac_part.len() > SCALE_DIGITS as usize
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        let int_val: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let mut frac_val: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| err())?
        };
        for _ in frac_part.len()..SCALE_DIGITS as usize {
            frac_val *= 10;
        }
        let raw = int_val
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(err)?;
        Ok(Fixed4(if neg { -raw } else { raw }))
    }
}

impl Serialize for Fixed4 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fixed4 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
