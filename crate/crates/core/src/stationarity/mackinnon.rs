//! Dickey-Fuller p-values and critical values for the constant-only,
//! single-series case.
//!
//! P-values use MacKinnon's (1994) asymptotic response-surface
//! approximation; finite-sample critical values use MacKinnon's (2010)
//! response surfaces. The coefficients are the published ones, in the same
//! form statsmodels ships them.

use statrs::distribution::{ContinuousCDF, Normal};

const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;

/// Lower-tail polynomial in t (ascending powers).
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
/// Upper-tail polynomial in t (ascending powers).
const LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];

/// Critical value surfaces `c0 + c1/n + c2/n^2 + c3/n^3` at 1%, 5%, 10%.
const CRIT_2010: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

/// Significance levels matching the rows of the critical-value table.
pub const LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Approximate p-value of a Dickey-Fuller tau statistic.
///
/// `_n_obs` is accepted for interface symmetry; the approximation is
/// asymptotic.
pub fn mackinnon_pvalue(t_stat: f64, _n_obs: usize) -> f64 {
    if t_stat.is_nan() {
        return f64::NAN;
    }
    if t_stat > TAU_MAX {
        return 1.0;
    }
    if t_stat < TAU_MIN {
        return 0.0;
    }
    let z = if t_stat <= TAU_STAR {
        poly(&SMALL_P, t_stat)
    } else {
        poly(&LARGE_P, t_stat)
    };
    let normal = Normal::standard();
    normal.cdf(z).clamp(0.0, 1.0)
}

/// Critical values at the 1%, 5% and 10% levels for a regression with
/// `n_obs` observations.
pub fn critical_values(n_obs: usize) -> [f64; 3] {
    let inv = 1.0 / n_obs as f64;
    CRIT_2010.map(|c| poly(&c, inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_percent_asymptotic_value() {
        let p = mackinnon_pvalue(-2.86, 1000);
        assert!((p - 0.05).abs() < 0.005, "p = {p}");
    }

    #[test]
    fn tails() {
        assert!(mackinnon_pvalue(-10.0, 180) < 1e-4);
        assert!(mackinnon_pvalue(1.0, 180) > 0.9);
        assert_eq!(mackinnon_pvalue(-30.0, 180), 0.0);
        assert_eq!(mackinnon_pvalue(3.0, 180), 1.0);
    }

    #[test]
    fn monotone_on_grid() {
        let mut prev = 0.0;
        for i in 0..1000 {
            let t = -20.0 + 24.0 * f64::from(i) / 999.0;
            let p = mackinnon_pvalue(t, 180);
            assert!((0.0..=1.0).contains(&p));
            assert!(p >= prev, "p({t}) = {p} < {prev}");
            prev = p;
        }
    }

    #[test]
    fn critical_values_match_reference() {
        // statsmodels mackinnoncrit(N=1, regression="c", nobs=179)
        let cv = critical_values(179);
        assert!((cv[0] - -3.4674201432469816).abs() < 1e-12);
        assert!((cv[1] - -2.877826051844538).abs() < 1e-12);
        assert!((cv[2] - -2.575452082332012).abs() < 1e-12);
    }
}
