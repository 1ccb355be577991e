use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use super::ci::{correlation_matrix, fisher_z_p, CiFailure};
use crate::dag::{quote_id, Dag, GraphError};
use crate::data::DataTable;

/// Output of [`run_pc`]: a CPDAG plus the separating sets that justified
/// each removed edge. Pairs are stored with the names in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdagResult {
    pub nodes: Vec<String>,
    pub skeleton: BTreeSet<(String, String)>,
    pub directed: BTreeSet<(String, String)>,
    pub undirected: BTreeSet<(String, String)>,
    pub sepsets: BTreeMap<(String, String), BTreeSet<String>>,
    pub alpha: f64,
}

fn pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CpdagResult {
    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.skeleton.contains(&pair(a, b))
    }

    pub fn sepset(&self, a: &str, b: &str) -> Option<&BTreeSet<String>> {
        self.sepsets.get(&pair(a, b))
    }

    /// DOT rendering. Undirected edges carry `dir=none`, which is standard
    /// DOT but outside the subset [`crate::dag::parse_dot`] accepts.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph {\n");
        for n in &self.nodes {
            let _ = writeln!(s, "    {};", quote_id(n));
        }
        for (a, b) in &self.directed {
            let _ = writeln!(s, "    {} -> {};", quote_id(a), quote_id(b));
        }
        for (a, b) in &self.undirected {
            let _ = writeln!(s, "    {} -> {} [dir=none];", quote_id(a), quote_id(b));
        }
        s.push_str("}\n");
        s
    }

    /// A DAG in the equivalence class: undirected edges are oriented by
    /// repeatedly removing a sink whose undirected neighbours form a clique
    /// with its other neighbours. Ties go to the smallest name.
    pub fn to_dag(&self) -> Result<Dag, GraphError> {
        let mut directed: BTreeSet<(String, String)> = self.directed.clone();
        let mut undirected: BTreeSet<(String, String)> = self.undirected.clone();
        let mut alive: BTreeSet<String> = self.nodes.iter().cloned().collect();
        let mut out: Vec<(String, String)> = directed.iter().cloned().collect();
        while !alive.is_empty() {
            let neighbours = |x: &str, und: &BTreeSet<(String, String)>, dir: &BTreeSet<(String, String)>| {
                let mut adj = BTreeSet::new();
                for (a, b) in und.iter().chain(dir.iter()) {
                    if a == x {
                        adj.insert(b.clone());
                    } else if b == x {
                        adj.insert(a.clone());
                    }
                }
                adj
            };
            let is_sink = |x: &str| !directed.iter().any(|(a, _)| a == x);
            let strict = alive.iter().find(|x| {
                if !is_sink(x) {
                    return false;
                }
                let adj = neighbours(x, &undirected, &directed);
                undirected
                    .iter()
                    .filter_map(|(a, b)| {
                        if a == *x {
                            Some(b)
                        } else if b == *x {
                            Some(a)
                        } else {
                            None
                        }
                    })
                    .all(|y| {
                        adj.iter().filter(|w| *w != y).all(|w| {
                            let p = pair(y, w);
                            undirected.contains(&p)
                                || directed.contains(&(y.clone(), w.clone()))
                                || directed.contains(&(w.clone(), y.clone()))
                        })
                    })
            });
            let x = match strict.or_else(|| alive.iter().find(|x| is_sink(x))) {
                Some(x) => x.clone(),
                None => {
                    // Conflicting orientations left a directed cycle.
                    let (a, b) = directed.iter().next().cloned().expect("no sink implies an edge");
                    return Err(GraphError::Cycle {
                        from: a.clone(),
                        to: b.clone(),
                        cycle: vec![a, b],
                    });
                }
            };
            for (a, b) in undirected.clone() {
                if a == x || b == x {
                    let other = if a == x { b.clone() } else { a.clone() };
                    out.push((other, x.clone()));
                    undirected.remove(&(a, b));
                }
            }
            directed.retain(|(a, b)| a != &x && b != &x);
            alive.remove(&x);
        }
        let mut g = Dag::new();
        for n in &self.nodes {
            g.add_node(n);
        }
        out.sort();
        for (a, b) in &out {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }
}

/// PC-stable with Fisher-z partial-correlation tests, followed by
/// v-structure orientation and Meek rules 1 to 3.
///
/// Variables are processed in sorted-name order, so the result does not
/// depend on the column order of `data`. A test that fails (singular
/// conditioning set) counts as dependence.
pub fn run_pc(data: &DataTable, alpha: f64) -> CpdagResult {
    let mut names: Vec<String> = data.names().to_vec();
    names.sort();
    let cols: Vec<&[f64]> = names
        .iter()
        .map(|n| data.column(n).expect("name taken from the table"))
        .collect();
    let p = names.len();
    let n = data.n_rows();
    let corr = correlation_matrix(&cols);

    let mut adj = vec![vec![true; p]; p];
    for (i, row) in adj.iter_mut().enumerate() {
        row[i] = false;
    }
    let mut sepsets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    let mut level = 0;
    loop {
        let snapshot: Vec<Vec<usize>> = (0..p).map(|i| (0..p).filter(|&j| adj[i][j]).collect()).collect();
        let pairs: Vec<(usize, usize)> = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .filter(|&(i, j)| adj[i][j])
            .collect();
        if !pairs
            .iter()
            .any(|&(i, j)| snapshot[i].len() > level || snapshot[j].len() > level)
        {
            break;
        }
        let removals: Vec<((usize, usize), Vec<usize>)> = pairs
            .par_iter()
            .filter_map(|&(i, j)| {
                for (a, b) in [(i, j), (j, i)] {
                    let others: Vec<usize> = snapshot[a].iter().copied().filter(|&v| v != b).collect();
                    if others.len() < level {
                        continue;
                    }
                    for s in combinations(&others, level) {
                        match fisher_z_p(&corr, n, i, j, &s) {
                            Ok(pv) if pv >= alpha => return Some(((i, j), s)),
                            Ok(_) | Err(CiFailure::Singular(_)) => {}
                            Err(CiFailure::TooFewRows { .. }) => return None,
                        }
                    }
                }
                None
            })
            .collect();
        for ((i, j), s) in removals {
            adj[i][j] = false;
            adj[j][i] = false;
            sepsets.insert((i, j), s);
        }
        level += 1;
    }

    // dir[a][b]: edge a - b is oriented a -> b.
    let mut dir = vec![vec![false; p]; p];
    let undirected =
        |adj: &Vec<Vec<bool>>, dir: &Vec<Vec<bool>>, a: usize, b: usize| adj[a][b] && !dir[a][b] && !dir[b][a];
    for z in 0..p {
        for x in 0..p {
            for y in x + 1..p {
                if !adj[x][z] || !adj[y][z] || adj[x][y] {
                    continue;
                }
                let in_sep = sepsets.get(&(x, y)).is_some_and(|s| s.contains(&z));
                if in_sep {
                    continue;
                }
                for a in [x, y] {
                    if !dir[z][a] {
                        dir[a][z] = true;
                    }
                }
            }
        }
    }

    loop {
        let mut changed = false;
        for a in 0..p {
            for b in 0..p {
                if !undirected(&adj, &dir, a, b) {
                    continue;
                }
                // R1: c -> a - b, c and b non-adjacent.
                let r1 = (0..p).any(|c| dir[c][a] && !adj[c][b] && c != b);
                // R2: a -> c -> b with a - b.
                let r2 = (0..p).any(|c| dir[a][c] && dir[c][b]);
                // R3: a - c -> b, a - d -> b, c and d non-adjacent.
                let r3 = (0..p).any(|c| {
                    undirected(&adj, &dir, a, c)
                        && dir[c][b]
                        && (c + 1..p).any(|d| undirected(&adj, &dir, a, d) && dir[d][b] && !adj[c][d])
                });
                if r1 || r2 || r3 {
                    dir[a][b] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut result = CpdagResult {
        nodes: names.clone(),
        skeleton: BTreeSet::new(),
        directed: BTreeSet::new(),
        undirected: BTreeSet::new(),
        sepsets: BTreeMap::new(),
        alpha,
    };
    for a in 0..p {
        for b in a + 1..p {
            if adj[a][b] {
                result.skeleton.insert((names[a].clone(), names[b].clone()));
                if dir[a][b] {
                    result.directed.insert((names[a].clone(), names[b].clone()));
                } else if dir[b][a] {
                    result.directed.insert((names[b].clone(), names[a].clone()));
                } else {
                    result.undirected.insert((names[a].clone(), names[b].clone()));
                }
            }
        }
    }
    for ((a, b), s) in sepsets {
        result.sepsets.insert(
            (names[a].clone(), names[b].clone()),
            s.into_iter().map(|v| names[v].clone()).collect(),
        );
    }
    result
}

/// All `k`-subsets of `items`, in lexicographic order of positions.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}
