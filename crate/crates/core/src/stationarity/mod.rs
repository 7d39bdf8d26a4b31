//! Augmented Dickey-Fuller unit-root testing.
//!
//! The test regression is
//!
//! ```text
//! dy[t] = mu + gamma * y[t-1] + sum_{j=1..k} delta_j * dy[t-j] + e[t]
//! ```
//!
//! (constant, no trend). The lag order `k` minimises AIC over a common
//! sample trimmed to the maximum lag; the chosen model is then refit on
//! the longest sample available for that `k`, and the reported statistic
//! is `gamma_hat / se(gamma_hat)` from the refit.

mod mackinnon;
mod ols;

use serde::Serialize;
use thiserror::Error;

use crate::fmt::format_sig;

pub use mackinnon::{critical_values, mackinnon_pvalue, LEVELS};
pub use ols::{ols, Design, OlsFit};

/// Smallest series length accepted by [`adf_max_lag`] and [`adf_test`].
pub const MIN_OBSERVATIONS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdfError {
    #[error("too few observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("series is degenerate (constant or perfectly collinear)")]
    DegenerateSeries,
    #[error("series contains a non-finite value at position {0}")]
    NonFinite(usize),
    #[error("max lag {max_lag} exceeds the limit {limit} for this sample")]
    MaxLagTooLarge { max_lag: usize, limit: usize },
}

/// Values keyed by significance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ByLevel<T> {
    #[serde(rename = "1%")]
    pub pct1: T,
    #[serde(rename = "5%")]
    pub pct5: T,
    #[serde(rename = "10%")]
    pub pct10: T,
}

impl<T: Copy> ByLevel<T> {
    fn from_array(a: [T; 3]) -> Self {
        ByLevel {
            pct1: a[0],
            pct5: a[1],
            pct10: a[2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub t_stat: f64,
    pub p_value: f64,
    pub lags_used: usize,
    pub max_lag: usize,
    /// Observations in the final regression.
    pub n_obs: usize,
    pub critical_values: ByLevel<f64>,
    /// `p_value < level`.
    pub reject_at: ByLevel<bool>,
}

impl AdfResult {
    /// Whether the unit-root null is rejected at an arbitrary level.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Schwert's rule `floor(12 * (n / 100)^(1/4))`.
pub fn adf_max_lag(n_obs: usize) -> Result<usize, AdfError> {
    if n_obs < MIN_OBSERVATIONS {
        return Err(AdfError::TooFewObservations {
            needed: MIN_OBSERVATIONS,
            got: n_obs,
        });
    }
    Ok((12.0 * (n_obs as f64 / 100.0).powf(0.25)).floor() as usize)
}

pub fn adf_test(series: &[f64], max_lag: Option<usize>) -> Result<AdfResult, AdfError> {
    let n = series.len();
    if n < MIN_OBSERVATIONS {
        return Err(AdfError::TooFewObservations {
            needed: MIN_OBSERVATIONS,
            got: n,
        });
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(AdfError::NonFinite(i));
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(AdfError::DegenerateSeries);
    }
    let max_lag = match max_lag {
        Some(k) => k,
        None => adf_max_lag(n)?,
    };
    // constant + level + lags must leave at least as many rows as columns
    let limit = n / 2 - 2;
    if max_lag > limit {
        return Err(AdfError::MaxLagTooLarge { max_lag, limit });
    }

    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();

    let (full, response) = lagged_design(series, &diff, max_lag);
    let mut best: Option<(f64, usize)> = None;
    for k in 0..=max_lag {
        let fit = ols(&full.leading_columns(2 + k), &response).map_err(degenerate)?;
        let aic = fit.aic();
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, k));
        }
    }
    let (_, lags_used) = best.expect("at least one lag order evaluated");

    let (design, response) = lagged_design(series, &diff, lags_used);
    let fit = ols(&design, &response).map_err(degenerate)?;
    let t_stat = fit.t_value(1);
    if !t_stat.is_finite() {
        return Err(AdfError::DegenerateSeries);
    }
    let n_obs = fit.n_obs;
    let p_value = mackinnon_pvalue(t_stat, n_obs);
    Ok(AdfResult {
        t_stat,
        p_value,
        lags_used,
        max_lag,
        n_obs,
        critical_values: ByLevel::from_array(critical_values(n_obs)),
        reject_at: ByLevel::from_array(LEVELS.map(|a| p_value < a)),
    })
}

fn degenerate(e: AdfError) -> AdfError {
    match e {
        AdfError::RankDeficient => AdfError::DegenerateSeries,
        other => other,
    }
}

/// Columns `[1, y[t-1], dy[t-1], .., dy[t-lags]]` against `dy[t]`, using
/// every row for which all lags exist.
fn lagged_design(levels: &[f64], diff: &[f64], lags: usize) -> (Design, Vec<f64>) {
    let rows = diff.len() - lags;
    let mut design = Design::new(rows, 2 + lags);
    let mut response = Vec::with_capacity(rows);
    for (r, t) in (lags..diff.len()).enumerate() {
        design.set(r, 0, 1.0);
        design.set(r, 1, levels[t]);
        for j in 1..=lags {
            design.set(r, 1 + j, diff[t - j]);
        }
        response.push(diff[t]);
    }
    (design, response)
}

pub const ADF_CSV_HEADER: &str =
    "label,t_stat,p_value,lags_used,n_obs,reject_1pct,reject_5pct,reject_10pct";

pub fn adf_rows_to_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a AdfResult)>) -> String {
    let mut out = format!("{ADF_CSV_HEADER}\n");
    for (label, r) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            label,
            format_sig(r.t_stat, 12),
            format_sig(r.p_value, 12),
            r.lags_used,
            r.n_obs,
            r.reject_at.pct1,
            r.reject_at.pct5,
            r.reject_at.pct10
        ));
    }
    out
}
