//! Ordinary least squares via Householder QR.

use super::AdfError;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub n_obs: usize,
    pub n_params: usize,
}

impl OlsFit {
    pub fn t_value(&self, j: usize) -> f64 {
        self.coefficients[j] / self.standard_errors[j]
    }

    /// Gaussian log-likelihood at the ML variance `rss / n`.
    pub fn log_likelihood(&self) -> f64 {
        let n = self.n_obs as f64;
        -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (self.rss / n).ln() + 1.0)
    }

    pub fn aic(&self) -> f64 {
        -2.0 * self.log_likelihood() + 2.0 * self.n_params as f64
    }
}

/// Row-major design matrix.
#[derive(Debug, Clone)]
pub struct Design {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Design {
    pub fn new(rows: usize, cols: usize) -> Self {
        Design {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut d = Design::new(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged design matrix");
            d.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Copy restricted to the first `cols` columns.
    pub fn leading_columns(&self, cols: usize) -> Design {
        assert!(cols <= self.cols);
        let mut d = Design::new(self.rows, cols);
        for i in 0..self.rows {
            d.data[i * cols..(i + 1) * cols]
                .copy_from_slice(&self.data[i * self.cols..i * self.cols + cols]);
        }
        d
    }
}

/// Least squares fit of `response` on `design`.
///
/// Standard errors use the unbiased variance `rss / (n - p)`.
#[allow(clippy::needless_range_loop)]
pub fn ols(design: &Design, response: &[f64]) -> Result<OlsFit, AdfError> {
    let (n, p) = (design.rows(), design.cols());
    assert_eq!(response.len(), n, "response length must match design rows");
    if p == 0 || n <= p {
        return Err(AdfError::TooFewObservations {
            needed: p + 1,
            got: n,
        });
    }

    // column-major working copy; becomes R above the diagonal plus reflectors
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| design.get(i, j)).collect())
        .collect();
    let mut qty = response.to_vec();
    let mut diag = vec![0.0; p];
    let col_norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        diag[k] = alpha;
        if norm == 0.0 {
            continue;
        }
        // v = x - alpha e1, stored in place
        a[k][k] -= alpha;
        let vnorm2: f64 = a[k][k..].iter().map(|v| v * v).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col[k..].iter_mut().zip(v) {
                *c -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&qty[k..]).map(|(x, y)| x * y).sum();
        let f = 2.0 * dot / vnorm2;
        for (c, vi) in qty[k..].iter_mut().zip(v) {
            *c -= f * vi;
        }
    }

    // a column is dependent when almost none of its norm survives projection
    let rel_tol = 16.0 * n as f64 * f64::EPSILON;
    if diag
        .iter()
        .zip(&col_norms)
        .any(|(d, norm)| *norm == 0.0 || d.abs() <= rel_tol * norm)
    {
        return Err(AdfError::RankDeficient);
    }

    // R: strictly upper part in a[j][i] (i < j), diagonal in diag
    let r = |i: usize, j: usize| if i == j { diag[i] } else { a[j][i] };

    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for j in i + 1..p {
            s -= r(i, j) * beta[j];
        }
        beta[i] = s / diag[i];
    }

    // R^-1, upper triangular
    let mut rinv = vec![vec![0.0; p]; p];
    for j in 0..p {
        rinv[j][j] = 1.0 / diag[j];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += r(i, k) * rinv[k][j];
            }
            rinv[i][j] = -s / diag[i];
        }
    }

    let residuals: Vec<f64> = (0..n)
        .map(|i| response[i] - (0..p).map(|j| design.get(i, j) * beta[j]).sum::<f64>())
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n - p) as f64;
    // diag((X'X)^-1) = row norms of R^-1
    let standard_errors = (0..p)
        .map(|i| (sigma2 * rinv[i][i..].iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();

    Ok(OlsFit {
        coefficients: beta,
        standard_errors,
        residuals,
        rss,
        n_obs: n,
        n_params: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_intercept(x: &[f64]) -> Design {
        Design::from_rows(&x.iter().map(|&v| vec![1.0, v]).collect::<Vec<_>>())
    }

    #[test]
    fn exact_linear_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = ols(&with_intercept(&x), &y).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.rss < 1e-24);
    }

    #[test]
    fn normal_equation_example() {
        // x'x = [[4,6],[6,14]], x'y = [8,15] -> beta = (1.1, 0.6)
        let fit = ols(
            &with_intercept(&[0.0, 1.0, 2.0, 3.0]),
            &[1.0, 2.0, 2.0, 3.0],
        )
        .unwrap();
        assert!((fit.coefficients[0] - 1.1).abs() < 1e-12);
        assert!((fit.coefficients[1] - 0.6).abs() < 1e-12);
        // residuals (-0.1, 0.3, -0.3, 0.1): rss 0.2, s^2 0.1, se(slope) = sqrt(0.1 * 4/20)
        assert!((fit.rss - 0.2).abs() < 1e-12);
        assert!((fit.standard_errors[1] - 0.02f64.sqrt()).abs() < 1e-12);
        assert!((fit.standard_errors[0] - (0.1f64 * 14.0 / 20.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let d = Design::from_rows(&[
            vec![1.0, 2.0, 2.0],
            vec![1.0, 3.0, 3.0],
            vec![1.0, 5.0, 5.0],
            vec![1.0, 7.0, 7.0],
        ]);
        assert_eq!(ols(&d, &[1.0, 2.0, 3.0, 4.0]), Err(AdfError::RankDeficient));
    }

    #[test]
    fn too_few_observations() {
        let d = with_intercept(&[1.0, 2.0]);
        assert!(matches!(
            ols(&d, &[1.0, 2.0]),
            Err(AdfError::TooFewObservations { .. })
        ));
    }

    #[test]
    fn recovers_known_coefficients() {
        // noiseless three-regressor problem
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![1.0, (t * 0.37).sin(), (t * 0.11).cos() * t / 10.0]
            })
            .collect();
        let truth = [0.5, -1.25, 3.0];
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&truth).map(|(a, b)| a * b).sum())
            .collect();
        let fit = ols(&Design::from_rows(&rows), &y).unwrap();
        for (c, t) in fit.coefficients.iter().zip(truth) {
            assert!((c - t).abs() < 1e-10);
        }
    }
}
