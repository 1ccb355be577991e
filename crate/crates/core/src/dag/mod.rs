//! Directed acyclic graphs over named variables.
//!
//! A [`Dag`] is the substrate for every causal model in the crate: it is
//! parsed from DOT text, emitted by discovery, and queried by identification.
//! The usual modelling assumptions (Markov property, causal sufficiency,
//! faithfulness) are assumptions of the analyses built on top of it; the graph
//! itself only enforces acyclicity.

mod dot;
mod dsep;
mod paths;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub(crate) use dot::quote_id;
pub use dot::{parse_dot, serialize_dot, DotError};
pub use dsep::{d_separated, d_separated_by_paths};
pub use paths::{all_paths, backdoor_paths, Direction, Hop, Path};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("edge {from} -> {to} closes the cycle {}", .cycle.join(" -> "))]
    Cycle {
        from: String,
        to: String,
        cycle: Vec<String>,
    },
    #[error("node `{0}` appears in more than one of the query sets")]
    OverlappingSets(String),
    #[error("source and target are both `{0}`")]
    SameEndpoints(String),
}

/// A directed edge between two declared nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub weight: Option<f64>,
}

/// Directed acyclic graph of named variables with optional edge weights and
/// display labels.
///
/// Node order is declaration order. Edges are kept in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    labels: Vec<Option<String>>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, Option<f64>)>,
}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from an edge list, declaring nodes in first-seen order.
    pub fn from_edges(edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Dag::new();
        for &(a, b) in edges {
            g.add_node(a);
            g.add_node(b);
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Declares `name` if absent and returns its index.
    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.labels.push(None);
        self.children.push(Vec::new());
        self.parents.push(Vec::new());
        i
    }

    pub fn set_label(&mut self, name: &str, label: impl Into<String>) -> Result<(), GraphError> {
        let i = self.idx(name)?;
        self.labels[i] = Some(label.into());
        Ok(())
    }

    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        self.insert_edge(from, to, None)
    }

    pub fn add_weighted_edge(&mut self, from: &str, to: &str, weight: f64) -> Result<(), GraphError> {
        self.insert_edge(from, to, Some(weight))
    }

    fn insert_edge(&mut self, from: &str, to: &str, weight: Option<f64>) -> Result<(), GraphError> {
        let a = self.idx(from)?;
        let b = self.idx(to)?;
        if a == b {
            return Err(GraphError::SelfLoop(from.to_string()));
        }
        if self.children[a].contains(&b) {
            return Err(GraphError::DuplicateEdge(from.to_string(), to.to_string()));
        }
        if let Some(mut back) = self.directed_path(b, a) {
            back.push(b);
            return Err(GraphError::Cycle {
                from: from.to_string(),
                to: to.to_string(),
                cycle: back.into_iter().map(|i| self.names[i].clone()).collect(),
            });
        }
        self.children[a].push(b);
        self.parents[b].push(a);
        self.edges.push((a, b, weight));
        Ok(())
    }

    /// Some directed path `src ~> dst` as node indices, if one exists.
    fn directed_path(&self, src: usize, dst: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.names.len()];
        let mut queue = VecDeque::from([src]);
        prev[src] = src;
        while let Some(v) = queue.pop_front() {
            if v == dst {
                let mut path = vec![v];
                let mut cur = v;
                while cur != src {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &c in &self.children[v] {
                if prev[c] == usize::MAX {
                    prev[c] = v;
                    queue.push_back(c);
                }
            }
        }
        None
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn label(&self, name: &str) -> Option<&str> {
        self.index.get(name).and_then(|&i| self.labels[i].as_deref())
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|&(a, b, w)| Edge {
            from: self.names[a].clone(),
            to: self.names[b].clone(),
            weight: w,
        })
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index.get(from), self.index.get(to)) {
            (Some(&a), Some(&b)) => self.children[a].contains(&b),
            _ => false,
        }
    }

    pub fn edge_weight(&self, from: &str, to: &str) -> Option<f64> {
        let (a, b) = (*self.index.get(from)?, *self.index.get(to)?);
        self.edges
            .iter()
            .find(|&&(x, y, _)| x == a && y == b)
            .and_then(|&(_, _, w)| w)
    }

    pub fn parents(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.idx(name)?;
        Ok(self.parents[i].iter().map(|&p| self.names[p].as_str()).collect())
    }

    pub fn children(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.idx(name)?;
        Ok(self.children[i].iter().map(|&c| self.names[c].as_str()).collect())
    }

    /// Strict ancestors of `name`.
    pub fn ancestors(&self, name: &str) -> Result<BTreeSet<String>, GraphError> {
        let i = self.idx(name)?;
        let mask = self.reach(&[i], &self.parents);
        Ok(self.names_in(&mask, Some(i)))
    }

    /// Strict descendants of `name`.
    pub fn descendants(&self, name: &str) -> Result<BTreeSet<String>, GraphError> {
        let i = self.idx(name)?;
        let mask = self.reach(&[i], &self.children);
        Ok(self.names_in(&mask, Some(i)))
    }

    /// Node names in a topological order (ties broken by declaration order).
    pub fn topological_order(&self) -> Vec<&str> {
        self.topo_indices()
            .into_iter()
            .map(|i| self.names[i].as_str())
            .collect()
    }

    /// Copy of the graph with every edge leaving `name` removed.
    pub fn without_outgoing(&self, name: &str) -> Result<Dag, GraphError> {
        let i = self.idx(name)?;
        let mut g = self.clone();
        g.edges.retain(|&(a, _, _)| a != i);
        for c in std::mem::take(&mut g.children[i]) {
            g.parents[c].retain(|&p| p != i);
        }
        Ok(g)
    }

    /// Copy with nodes renamed through `mapping`; unmapped names are kept.
    pub fn renamed(&self, mapping: &HashMap<String, String>) -> Dag {
        let mut g = self.clone();
        g.names = self
            .names
            .iter()
            .map(|n| mapping.get(n).cloned().unwrap_or_else(|| n.clone()))
            .collect();
        g.index = g.names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        g
    }

    pub(crate) fn idx(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub(crate) fn idx_set<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, GraphError> {
        names.iter().map(|n| self.idx(n.as_ref())).collect()
    }

    pub(crate) fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub(crate) fn parent_ids(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub(crate) fn child_ids(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Mask of nodes reachable from `seeds` (inclusive) along `adj`.
    pub(crate) fn reach(&self, seeds: &[usize], adj: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut stack: Vec<usize> = seeds.to_vec();
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(adj[v].iter().copied().filter(|&u| !seen[u]));
        }
        seen
    }

    pub(crate) fn ancestor_mask(&self, seeds: &[usize]) -> Vec<bool> {
        self.reach(seeds, &self.parents)
    }

    fn names_in(&self, mask: &[bool], skip: Option<usize>) -> BTreeSet<String> {
        mask.iter()
            .enumerate()
            .filter(|&(i, &m)| m && Some(i) != skip)
            .map(|(i, _)| self.names[i].clone())
            .collect()
    }

    pub(crate) fn topo_indices(&self) -> Vec<usize> {
        let n = self.names.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }
}

/// Two graphs are equal when they have the same node set, labels and
/// weighted edge set, regardless of declaration order.
impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        if self.names.len() != other.names.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        let nodes = |g: &Dag| -> Vec<(String, Option<String>)> {
            let mut v: Vec<_> = g.names.iter().cloned().zip(g.labels.iter().cloned()).collect();
            v.sort();
            v
        };
        let edges = |g: &Dag| -> Vec<(String, String, Option<u64>)> {
            let mut v: Vec<_> = g
                .edges
                .iter()
                .map(|&(a, b, w)| (g.names[a].clone(), g.names[b].clone(), w.map(f64::to_bits)))
                .collect();
            v.sort();
            v
        };
        nodes(self) == nodes(other) && edges(self) == edges(other)
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_dot(self))
    }
}
