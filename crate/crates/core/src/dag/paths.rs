use std::fmt;

use super::{Dag, GraphError};

/// Orientation of the edge traversed by a [`Hop`], relative to the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The edge points along the walk: `prev -> node`.
    Forward,
    /// The edge points against the walk: `prev <- node`.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hop {
    pub direction: Direction,
    pub node: String,
}

/// A simple path between two nodes, ignoring edge orientation for
/// connectivity but recording it on every hop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: String,
    pub hops: Vec<Hop>,
}

impl Path {
    pub fn end(&self) -> &str {
        self.hops.last().map_or(&self.start, |h| &h.node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.start.as_str()).chain(self.hops.iter().map(|h| h.node.as_str()))
    }

    /// True when the first edge points into the start node.
    pub fn enters_start(&self) -> bool {
        self.hops.first().is_some_and(|h| h.direction == Direction::Backward)
    }

    pub fn is_directed(&self) -> bool {
        self.hops.iter().all(|h| h.direction == Direction::Forward)
    }

    /// Interior nodes where both adjacent edges point in.
    pub fn colliders(&self) -> Vec<&str> {
        self.hops
            .windows(2)
            .filter(|w| w[0].direction == Direction::Forward && w[1].direction == Direction::Backward)
            .map(|w| w[0].node.as_str())
            .collect()
    }

    /// Whether conditioning on `given` blocks this path in `g`.
    ///
    /// A non-collider blocks when it is conditioned on. A collider blocks
    /// unless it or one of its descendants is conditioned on.
    pub fn is_blocked(&self, g: &Dag, given: &[&str]) -> Result<bool, GraphError> {
        let given = g.idx_set(given)?;
        let mut z = vec![false; g.node_count()];
        for &i in &given {
            z[i] = true;
        }
        let anc_z = g.ancestor_mask(&given);
        let ids: Vec<usize> = self.nodes().map(|n| g.idx(n)).collect::<Result<_, _>>()?;
        let fwd: Vec<bool> = self.hops.iter().map(|h| h.direction == Direction::Forward).collect();
        Ok(blocked_ids(&ids, &fwd, &z, &anc_z))
    }
}

/// `ids` are the path's nodes, `fwd[i]` the orientation of the edge between
/// `ids[i]` and `ids[i+1]`.
/// `anc_z[v]` is true when `v` is an ancestor of (or in) the conditioning set,
/// i.e. when some descendant of `v` is conditioned on.
pub(crate) fn blocked_ids(ids: &[usize], fwd: &[bool], z: &[bool], anc_z: &[bool]) -> bool {
    (1..ids.len().saturating_sub(1)).any(|k| {
        let m = ids[k];
        let collider = fwd[k - 1] && !fwd[k];
        if collider {
            !anc_z[m]
        } else {
            z[m]
        }
    })
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.start)?;
        for h in &self.hops {
            let arrow = match h.direction {
                Direction::Forward => "→",
                Direction::Backward => "←",
            };
            write!(f, "{arrow}{}", h.node)?;
        }
        Ok(())
    }
}

/// Index form of every simple path between `x` and `y`: (nodes, orientations).
pub(crate) fn path_ids(g: &Dag, x: usize, y: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
    let mut out = Vec::new();
    let mut on_path = vec![false; g.node_count()];
    let mut nodes = vec![x];
    let mut fwd = Vec::new();
    on_path[x] = true;
    walk(g, y, &mut on_path, &mut nodes, &mut fwd, &mut out);
    out
}

fn walk(
    g: &Dag,
    target: usize,
    on_path: &mut [bool],
    nodes: &mut Vec<usize>,
    fwd: &mut Vec<bool>,
    out: &mut Vec<(Vec<usize>, Vec<bool>)>,
) {
    let v = *nodes.last().expect("path is never empty");
    if v == target {
        out.push((nodes.clone(), fwd.clone()));
        return;
    }
    let steps = g
        .child_ids(v)
        .iter()
        .map(|&c| (c, true))
        .chain(g.parent_ids(v).iter().map(|&p| (p, false)));
    for (u, forward) in steps {
        if on_path[u] {
            continue;
        }
        on_path[u] = true;
        nodes.push(u);
        fwd.push(forward);
        walk(g, target, on_path, nodes, fwd, out);
        fwd.pop();
        nodes.pop();
        on_path[u] = false;
    }
}

fn to_path(g: &Dag, ids: &[usize], fwd: &[bool]) -> Path {
    Path {
        start: g.name(ids[0]).to_string(),
        hops: ids[1..]
            .iter()
            .zip(fwd)
            .map(|(&n, &f)| Hop {
                direction: if f { Direction::Forward } else { Direction::Backward },
                node: g.name(n).to_string(),
            })
            .collect(),
    }
}

/// Every simple path between `x` and `y`, regardless of edge orientation.
pub fn all_paths(g: &Dag, x: &str, y: &str) -> Result<Vec<Path>, GraphError> {
    let (xi, yi) = (g.idx(x)?, g.idx(y)?);
    if xi == yi {
        return Err(GraphError::SameEndpoints(x.to_string()));
    }
    Ok(path_ids(g, xi, yi)
        .iter()
        .map(|(ids, fwd)| to_path(g, ids, fwd))
        .collect())
}

/// Paths from `treatment` to `outcome` whose first edge points into the
/// treatment.
pub fn backdoor_paths(g: &Dag, treatment: &str, outcome: &str) -> Result<Vec<Path>, GraphError> {
    Ok(all_paths(g, treatment, outcome)?
        .into_iter()
        .filter(Path::enters_start)
        .collect())
}
