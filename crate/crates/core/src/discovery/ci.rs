use nalgebra::{DMatrix, DVector};

use super::DiscoveryError;
use crate::data::DataTable;
use crate::stats::{mean, two_sided_p};

/// Fisher-z test of `x ⟂ y | cond` on the partial correlation.
///
/// Returns `(independent, p_value)` with `independent` iff `p_value >= alpha`.
pub fn ci_test_partial_correlation<S: AsRef<str>>(
    data: &DataTable,
    x: &str,
    y: &str,
    cond: &[S],
    alpha: f64,
) -> Result<(bool, f64), DiscoveryError> {
    let mut cols = vec![data.column(x)?, data.column(y)?];
    for c in cond {
        cols.push(data.column(c.as_ref())?);
    }
    let corr = correlation_matrix(&cols);
    let idx: Vec<usize> = (2..cols.len()).collect();
    let p = fisher_z_p(&corr, data.n_rows(), 0, 1, &idx).map_err(|e| {
        e.named(|i| {
            if i == 0 {
                x.to_string()
            } else if i == 1 {
                y.to_string()
            } else {
                cond[i - 2].as_ref().to_string()
            }
        })
    })?;
    Ok((p >= alpha, p))
}

/// Pearson correlation matrix of equal-length columns. Constant columns get
/// zero off-diagonal entries.
pub(crate) fn correlation_matrix(cols: &[&[f64]]) -> DMatrix<f64> {
    let k = cols.len();
    let centred: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let norms: Vec<f64> = centred
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut r = DMatrix::identity(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let d = norms[i] * norms[j];
            let v = if d > 0.0 {
                centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum::<f64>() / d
            } else {
                0.0
            };
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

pub(crate) enum CiFailure {
    TooFewRows { rows: usize, needed: usize },
    Singular(Vec<usize>),
}

impl CiFailure {
    fn named(self, name: impl Fn(usize) -> String) -> DiscoveryError {
        match self {
            CiFailure::TooFewRows { rows, needed } => DiscoveryError::TooFewRows { rows, needed },
            CiFailure::Singular(cond) => DiscoveryError::SingularConditioning {
                columns: cond.into_iter().map(name).collect(),
            },
        }
    }
}

/// Two-sided Fisher-z p-value for the partial correlation of `x` and `y`
/// given `cond`, all indices into the correlation matrix `corr`.
pub(crate) fn fisher_z_p(corr: &DMatrix<f64>, n: usize, x: usize, y: usize, cond: &[usize]) -> Result<f64, CiFailure> {
    let k = cond.len();
    if n < k + 4 {
        return Err(CiFailure::TooFewRows { rows: n, needed: k + 4 });
    }
    let r = partial_correlation(corr, x, y, cond).ok_or_else(|| CiFailure::Singular(cond.to_vec()))?;
    let r = r.clamp(-1.0, 1.0);
    let z = r.atanh() * ((n - k - 3) as f64).sqrt();
    Ok(two_sided_p(z))
}

fn partial_correlation(corr: &DMatrix<f64>, x: usize, y: usize, cond: &[usize]) -> Option<f64> {
    if cond.is_empty() {
        return Some(corr[(x, y)]);
    }
    let k = cond.len();
    let scc = DMatrix::from_fn(k, k, |i, j| corr[(cond[i], cond[j])]);
    let chol = scc.cholesky()?;
    let l = chol.l_dirty();
    if (0..k).any(|i| l[(i, i)] * l[(i, i)] < 1e-12) {
        return None;
    }
    let sxc = DVector::from_fn(k, |i, _| corr[(x, cond[i])]);
    let syc = DVector::from_fn(k, |i, _| corr[(y, cond[i])]);
    let wx = chol.solve(&sxc);
    let wy = chol.solve(&syc);
    let pxy = corr[(x, y)] - sxc.dot(&wy);
    let pxx = 1.0 - sxc.dot(&wx);
    let pyy = 1.0 - syc.dot(&wy);
    if pxx <= 1e-12 || pyy <= 1e-12 {
        return None;
    }
    Some(pxy / (pxx * pyy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns_are_dependent() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let t = DataTable::new(vec![("x".into(), x.clone()), ("y".into(), x)]).unwrap();
        let (ind, p) = ci_test_partial_correlation::<&str>(&t, "x", "y", &[], 0.05).unwrap();
        assert!(!ind);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn singular_conditioning_set_is_reported() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 1.91).cos()).collect();
        let t = DataTable::new(vec![
            ("x".into(), a.clone()),
            ("y".into(), b),
            ("c".into(), a.clone()),
            ("d".into(), a.iter().map(|v| 2.0 * v).collect()),
        ])
        .unwrap();
        let err = ci_test_partial_correlation(&t, "x", "y", &["c", "d"], 0.05).unwrap_err();
        assert!(matches!(err, DiscoveryError::SingularConditioning { .. }));
    }
}
