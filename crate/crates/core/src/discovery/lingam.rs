use super::DiscoveryError;
use crate::dag::Dag;
use crate::data::DataTable;
use crate::ols::ols;
use crate::stats::{mean, standardize};

/// Edges whose standardized weight is at most this are dropped.
pub const PRUNE_THRESHOLD: f64 = 0.01;

/// Negentropy approximation from the third and fourth moments of a
/// standardized sample.
fn negentropy(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let m3 = u.iter().map(|v| v.powi(3)).sum::<f64>() / n;
    let k = u.iter().map(|v| v.powi(4)).sum::<f64>() / n - 3.0;
    m3 * m3 / 12.0 + k * k / 48.0
}

/// Standardized residual of `y` regressed on `x` (both standardized), or
/// `None` when `y` is a deterministic function of `x`.
fn residual(y: &[f64], x: &[f64], rho: f64) -> Option<Vec<f64>> {
    let s2 = 1.0 - rho * rho;
    if s2 <= 1e-12 {
        return None;
    }
    let s = s2.sqrt();
    Some(y.iter().zip(x).map(|(a, b)| (a - rho * b) / s).collect())
}

/// Log-likelihood-ratio proxy: positive when `xi -> xj` fits better than
/// `xj -> xi`.
fn pairwise_measure(xi: &[f64], xj: &[f64], ji: f64, jj: f64) -> f64 {
    let n = xi.len() as f64;
    let rho = xi.iter().zip(xj).map(|(a, b)| a * b).sum::<f64>() / n;
    match (residual(xj, xi, rho), residual(xi, xj, rho)) {
        (Some(rj), Some(ri)) => ji + negentropy(&rj) - jj - negentropy(&ri),
        _ => 0.0,
    }
}

/// Causal order by direct iterative search: each round picks the variable
/// that looks most exogenous against every other remaining one, then
/// regresses it out of the rest.
pub fn causal_order(data: &DataTable) -> Result<Vec<String>, DiscoveryError> {
    let mut names: Vec<String> = data.names().to_vec();
    names.sort();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(names.len());
    for n in &names {
        let c = data.column(n)?;
        if c.iter().all(|v| *v == c[0]) {
            return Err(DiscoveryError::ConstantColumn(n.clone()));
        }
        cols.push(standardize(c));
    }
    let mut remaining: Vec<usize> = (0..names.len()).collect();
    let mut order = Vec::with_capacity(names.len());
    while remaining.len() > 1 {
        let j: Vec<f64> = remaining.iter().map(|&i| negentropy(&cols[i])).collect();
        let mut best: Option<(usize, f64)> = None;
        for (a, &i) in remaining.iter().enumerate() {
            let mut score = 0.0;
            for (b, &k) in remaining.iter().enumerate() {
                if i != k {
                    score += pairwise_measure(&cols[i], &cols[k], j[a], j[b]).min(0.0).powi(2);
                }
            }
            if !score.is_finite() {
                return Err(DiscoveryError::NoCausalOrder(names[i].clone()));
            }
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((a, score));
            }
        }
        let (pos, _) = best.expect("at least two candidates");
        let root = remaining.remove(pos);
        order.push(root);
        let x = cols[root].clone();
        for &k in &remaining {
            let n = x.len() as f64;
            let rho = x.iter().zip(&cols[k]).map(|(a, b)| a * b).sum::<f64>() / n;
            let r: Vec<f64> = cols[k].iter().zip(&x).map(|(a, b)| a - rho * b).collect();
            cols[k] = standardize(&r);
        }
    }
    order.extend(remaining);
    Ok(order.into_iter().map(|i| names[i].clone()).collect())
}

/// DirectLiNGAM-style discovery. Each variable is regressed on all of its
/// predecessors in the estimated causal order; edges whose standardized
/// weight exceeds [`PRUNE_THRESHOLD`] are kept, carrying the
/// least-squares coefficient in the data's own units.
pub fn run_lingam(data: &DataTable) -> Result<Dag, DiscoveryError> {
    let order = causal_order(data)?;
    let mut g = Dag::new();
    for n in &order {
        g.add_node(n);
    }
    let sd = |c: &[f64]| {
        let m = mean(c);
        (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / c.len() as f64).sqrt()
    };
    for (k, target) in order.iter().enumerate().skip(1) {
        let y = data.column(target)?;
        let preds: Vec<(&str, &[f64])> = order[..k]
            .iter()
            .map(|p| Ok((p.as_str(), data.column(p)?)))
            .collect::<Result<_, DiscoveryError>>()?;
        let fit = ols(y, &preds)?;
        let sy = sd(y);
        for ((name, col), b) in preds.iter().zip(&fit.coefficients) {
            if (b * sd(col) / sy).abs() > PRUNE_THRESHOLD {
                g.add_weighted_edge(name, target, *b)?;
            }
        }
    }
    Ok(g)
}
