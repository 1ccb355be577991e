//! Linear structural causal models for simulation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dag::Dag;
use crate::data::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    /// Standard normal.
    Gaussian,
    /// Uniform on `[-√3, √3]` (unit variance).
    Uniform,
}

impl Noise {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Noise::Gaussian => rng.sample(StandardNormal),
            Noise::Uniform => rng.random_range(-3f64.sqrt()..3f64.sqrt()),
        }
    }
}

/// Each node is the weighted sum of its parents plus independent noise.
/// Unweighted edges count as weight 1. Columns follow `g.nodes()`.
pub fn simulate_linear<R: Rng + ?Sized>(g: &Dag, n: usize, noise: Noise, rng: &mut R) -> DataTable {
    let names: Vec<String> = g.nodes().to_vec();
    let order = g.topological_order();
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); names.len()];
    let pos = |name: &str| names.iter().position(|x| x == name).expect("node of g");
    let parents: Vec<Vec<(usize, f64)>> = names
        .iter()
        .map(|v| {
            g.parents(v)
                .expect("node of g")
                .into_iter()
                .map(|p| (pos(p), g.edge_weight(p, v).unwrap_or(1.0)))
                .collect()
        })
        .collect();
    let order: Vec<usize> = order.iter().map(|v| pos(v)).collect();
    for _ in 0..n {
        for &v in &order {
            let mean: f64 = parents[v]
                .iter()
                .map(|&(p, w)| w * cols[p].last().expect("parent drawn first"))
                .sum();
            let x = mean + noise.draw(rng);
            cols[v].push(x);
        }
    }
    DataTable::new(names.into_iter().zip(cols).collect()).expect("consistent columns")
}
