#![allow(dead_code)]

use causeway::Dag;
use proptest::prelude::*;

pub fn node_name(i: usize) -> String {
    format!("v{i}")
}

/// DAG over `v0..v{n-1}` with edges `i -> j` (i < j) for every set bit of
/// `mask`, bits enumerated in row-major order over the upper triangle.
pub fn dag_from_mask(n: usize, mask: u64) -> Dag {
    let mut g = Dag::new();
    for i in 0..n {
        g.add_node(&node_name(i));
    }
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(&node_name(i), &node_name(j)).unwrap();
            }
            bit += 1;
        }
    }
    g
}

pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Random DAG with a shuffled node declaration order, so that the index
/// order is not a topological order.
pub fn arb_dag(max_nodes: usize) -> impl Strategy<Value = Dag> {
    (2..=max_nodes)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), pair_count(n)),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, bits, perm)| {
            let mut g = Dag::new();
            for &p in &perm {
                g.add_node(&node_name(p));
            }
            let mut bit = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[bit] {
                        g.add_edge(&node_name(i), &node_name(j)).unwrap();
                    }
                    bit += 1;
                }
            }
            g
        })
}

/// Adjacency of a small DAG as bit masks: `parents[v]`, `children[v]`.
pub struct Small {
    pub n: usize,
    pub parents: Vec<u32>,
    pub children: Vec<u32>,
    pub descendants: Vec<u32>,
}

impl Small {
    pub fn from_dag(g: &Dag) -> Small {
        let names = g.nodes();
        let n = names.len();
        let pos = |s: &str| names.iter().position(|x| x == s).unwrap();
        let mut parents = vec![0u32; n];
        let mut children = vec![0u32; n];
        for e in g.edges() {
            let (a, b) = (pos(&e.from), pos(&e.to));
            children[a] |= 1 << b;
            parents[b] |= 1 << a;
        }
        let mut descendants = vec![0u32; n];
        for (v, d) in descendants.iter_mut().enumerate() {
            let mut stack = vec![v];
            let mut seen = 1u32 << v;
            while let Some(u) = stack.pop() {
                for w in 0..n {
                    if children[u] >> w & 1 == 1 && seen >> w & 1 == 0 {
                        seen |= 1 << w;
                        stack.push(w);
                    }
                }
            }
            *d = seen;
        }
        Small {
            n,
            parents,
            children,
            descendants,
        }
    }

    /// Every simple path from `x` to `y`; `fwd[k]` is true when the k-th
    /// edge points along the walk.
    pub fn paths(&self, x: usize, y: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
        let mut out = Vec::new();
        let mut nodes = vec![x];
        let mut fwd = Vec::new();
        self.extend(y, 1 << x, &mut nodes, &mut fwd, &mut out);
        out
    }

    fn extend(
        &self,
        y: usize,
        used: u32,
        nodes: &mut Vec<usize>,
        fwd: &mut Vec<bool>,
        out: &mut Vec<(Vec<usize>, Vec<bool>)>,
    ) {
        let v = *nodes.last().unwrap();
        if v == y {
            out.push((nodes.clone(), fwd.clone()));
            return;
        }
        for w in 0..self.n {
            if used >> w & 1 == 1 {
                continue;
            }
            for (mask, forward) in [(self.children[v], true), (self.parents[v], false)] {
                if mask >> w & 1 == 1 {
                    nodes.push(w);
                    fwd.push(forward);
                    self.extend(y, used | 1 << w, nodes, fwd, out);
                    fwd.pop();
                    nodes.pop();
                }
            }
        }
    }

    /// Path blocked by `z`: some non-collider in `z`, or some collider with
    /// neither itself nor a descendant in `z`.
    pub fn blocked(&self, nodes: &[usize], fwd: &[bool], z: u32) -> bool {
        (1..nodes.len() - 1).any(|k| {
            let m = nodes[k];
            if fwd[k - 1] && !fwd[k] {
                self.descendants[m] & z == 0
            } else {
                z >> m & 1 == 1
            }
        })
    }

    pub fn d_separated(&self, x: usize, y: usize, z: u32) -> bool {
        self.paths(x, y).iter().all(|(p, f)| self.blocked(p, f, z))
    }
}

/// Names of the nodes of `g` at the set positions of `mask`.
pub fn names_in(g: &Dag, mask: u32) -> Vec<String> {
    g.nodes()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.clone())
        .collect()
}

pub mod linear_scm {
    //! The three linear models used to check the estimators, each with an
    //! optional intervention on `X`.

    use causeway::DataTable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn table(cols: Vec<(&str, Vec<f64>)>) -> DataTable {
        DataTable::new(cols.into_iter().map(|(n, v)| (n.to_string(), v)).collect()).unwrap()
    }

    /// Sample size, seed and optional `do(X = x)`.
    pub type Model = fn(usize, u64, Option<f64>) -> DataTable;

    /// `Z = e, X = Z + e, Y = 2X + 3Z + e`.
    pub fn backdoor(n: usize, seed: u64, do_x: Option<f64>) -> DataTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut z, mut x, mut y) = (vec![], vec![], vec![]);
        for _ in 0..n {
            let e: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let zi = e[0];
            let xi = do_x.unwrap_or(zi + e[1]);
            z.push(zi);
            x.push(xi);
            y.push(2.0 * xi + 3.0 * zi + e[2]);
        }
        table(vec![("Z", z), ("X", x), ("Y", y)])
    }

    /// `W = e, U = e, X = W + U + e, Y = 2X + U`.
    pub fn iv(n: usize, seed: u64, do_x: Option<f64>) -> DataTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut w, mut u, mut x, mut y) = (vec![], vec![], vec![], vec![]);
        for _ in 0..n {
            let e: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let xi = do_x.unwrap_or(e[0] + e[1] + e[2]);
            w.push(e[0]);
            u.push(e[1]);
            x.push(xi);
            y.push(2.0 * xi + e[1]);
        }
        table(vec![("W", w), ("U", u), ("X", x), ("Y", y)])
    }

    /// `U = e, X = U + e, M = 1.5X + e, Y = 2M + U`.
    pub fn frontdoor(n: usize, seed: u64, do_x: Option<f64>) -> DataTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut u, mut x, mut m, mut y) = (vec![], vec![], vec![], vec![]);
        for _ in 0..n {
            let e: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let xi = do_x.unwrap_or(e[0] + e[1]);
            let mi = 1.5 * xi + e[2];
            u.push(e[0]);
            x.push(xi);
            m.push(mi);
            y.push(2.0 * mi + e[0]);
        }
        table(vec![("U", u), ("X", x), ("M", m), ("Y", y)])
    }

    /// Brute-force `E[Y | do(X=1)] - E[Y | do(X=0)]` by simulating both
    /// interventions on `n` units.
    pub fn interventional_effect(model: Model, n: usize, seed: u64) -> f64 {
        let mean = |t: DataTable| {
            let y = t.column("Y").unwrap();
            y.iter().sum::<f64>() / y.len() as f64
        };
        mean(model(n, seed, Some(1.0))) - mean(model(n, seed, Some(0.0)))
    }
}
