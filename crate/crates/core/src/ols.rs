//! Ordinary least squares with an intercept.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative tolerance on the diagonal of R below which a column is treated
/// as linearly dependent on the ones before it.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OlsError {
    #[error("rank-deficient design: {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("{rows} rows are too few for {params} parameters")]
    TooFewRows { rows: usize, params: usize },
}

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residual variance with `n - p - 1` degrees of freedom.
    pub sigma2: f64,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.coefficients[i], self.std_errors[i]))
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }
}

/// Regress `y` on the named columns `xs` plus an intercept.
///
/// Columns are centred and scaled to unit norm before a Householder QR, so
/// the rank test is insensitive to units.
pub fn ols<S: AsRef<str>>(y: &[f64], xs: &[(S, &[f64])]) -> Result<OlsFit, OlsError> {
    let n = y.len();
    let p = xs.len();
    if n < p + 2 {
        return Err(OlsError::TooFewRows { rows: n, params: p + 1 });
    }
    let names: Vec<String> = xs.iter().map(|(s, _)| s.as_ref().to_string()).collect();
    let means: Vec<f64> = xs.iter().map(|(_, c)| c.iter().sum::<f64>() / n as f64).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;

    let mut scales = Vec::with_capacity(p);
    let mut x = DMatrix::<f64>::zeros(n, p);
    let mut constant = Vec::new();
    for (j, (_, col)) in xs.iter().enumerate() {
        assert_eq!(col.len(), n, "regressor length differs from response");
        let norm = col.iter().map(|v| (v - means[j]).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            constant.push(names[j].clone());
            scales.push(1.0);
            continue;
        }
        for (i, v) in col.iter().enumerate() {
            x[(i, j)] = (v - means[j]) / norm;
        }
        scales.push(norm);
    }
    if !constant.is_empty() {
        return Err(OlsError::RankDeficient { columns: constant });
    }

    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
    let (beta_s, rinv) = if p == 0 {
        (DVector::zeros(0), DMatrix::zeros(0, 0))
    } else {
        let qr = x.clone().qr();
        let r = qr.r();
        let rmax = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
        let bad: Vec<String> = (0..p)
            .filter(|&j| r[(j, j)].abs() <= RANK_TOL * rmax.max(1.0))
            .map(|j| names[j].clone())
            .collect();
        if !bad.is_empty() {
            return Err(OlsError::RankDeficient { columns: bad });
        }
        let qty = qr.q().transpose() * &yc;
        let beta = r.solve_upper_triangular(&qty).expect("full-rank R is invertible");
        let rinv = r
            .solve_upper_triangular(&DMatrix::identity(p, p))
            .expect("full-rank R is invertible");
        (beta, rinv)
    };

    let fitted = &x * &beta_s;
    let residuals: Vec<f64> = (0..n).map(|i| yc[i] - fitted[i]).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let sigma2 = rss / (n - p - 1) as f64;

    // (R^T R)^-1 = R^-1 R^-T; only the diagonal is needed.
    let coefficients: Vec<f64> = (0..p).map(|j| beta_s[j] / scales[j]).collect();
    let std_errors: Vec<f64> = (0..p)
        .map(|j| (sigma2 * rinv.row(j).norm_squared()).sqrt() / scales[j])
        .collect();
    let intercept = ybar - coefficients.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();

    Ok(OlsFit {
        names,
        intercept,
        coefficients,
        std_errors,
        residuals,
        sigma2,
    })
}
