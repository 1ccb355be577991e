//! d-separation, two ways: a linear-time reachability search used everywhere,
//! and an explicit path-enumeration check kept as a cross-check for small
//! graphs.

use std::collections::VecDeque;

use super::paths::{blocked_ids, path_ids};
use super::{Dag, GraphError};

fn check_disjoint(g: &Dag, xs: &[usize], ys: &[usize], zs: &[usize]) -> Result<(), GraphError> {
    let mut seen = vec![0u8; g.node_count()];
    for (tag, set) in [(1u8, xs), (2, ys), (4, zs)] {
        for &v in set {
            if seen[v] & !tag != 0 {
                return Err(GraphError::OverlappingSets(g.name(v).to_string()));
            }
            seen[v] |= tag;
        }
    }
    Ok(())
}

/// True iff every path between any `x ∈ xs` and any `y ∈ ys` is blocked by
/// `zs`.
///
/// Uses the active-trail reachability search: a walk may continue through a
/// non-collider outside `zs`, and through a collider that is in `zs` or has a
/// descendant in `zs`.
pub fn d_separated<A, B, C>(g: &Dag, xs: &[A], ys: &[B], zs: &[C]) -> Result<bool, GraphError>
where
    A: AsRef<str>,
    B: AsRef<str>,
    C: AsRef<str>,
{
    let (xs, ys, zs) = (g.idx_set(xs)?, g.idx_set(ys)?, g.idx_set(zs)?);
    check_disjoint(g, &xs, &ys, &zs)?;
    Ok(d_separated_ids(g, &xs, &ys, &zs))
}

pub(crate) fn d_separated_ids(g: &Dag, xs: &[usize], ys: &[usize], zs: &[usize]) -> bool {
    let n = g.node_count();
    let mut in_z = vec![false; n];
    for &z in zs {
        in_z[z] = true;
    }
    let anc_z = g.ancestor_mask(zs);
    let mut target = vec![false; n];
    for &y in ys {
        target[y] = true;
    }

    // Direction of arrival: `up` = reached from a child (moving against an
    // edge), `down` = reached from a parent.
    let mut visited = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, bool)> = xs.iter().map(|&x| (x, true)).collect();
    while let Some((v, up)) = queue.pop_front() {
        let slot = usize::from(up);
        if visited[v][slot] {
            continue;
        }
        visited[v][slot] = true;
        if target[v] {
            return false;
        }
        if up {
            if !in_z[v] {
                queue.extend(g.parent_ids(v).iter().map(|&p| (p, true)));
                queue.extend(g.child_ids(v).iter().map(|&c| (c, false)));
            }
        } else {
            if !in_z[v] {
                queue.extend(g.child_ids(v).iter().map(|&c| (c, false)));
            }
            if anc_z[v] {
                queue.extend(g.parent_ids(v).iter().map(|&p| (p, true)));
            }
        }
    }
    true
}

/// Reference implementation: enumerate every simple path between each pair
/// and apply the chain/fork/collider blocking rules. Exponential; meant for
/// small graphs and for checking [`d_separated`].
pub fn d_separated_by_paths<S: AsRef<str>>(g: &Dag, xs: &[S], ys: &[S], zs: &[S]) -> Result<bool, GraphError> {
    let (xs, ys, zs) = (g.idx_set(xs)?, g.idx_set(ys)?, g.idx_set(zs)?);
    check_disjoint(g, &xs, &ys, &zs)?;
    let mut in_z = vec![false; g.node_count()];
    for &z in &zs {
        in_z[z] = true;
    }
    let anc_z = g.ancestor_mask(&zs);
    for &x in &xs {
        for &y in &ys {
            if path_ids(g, x, y)
                .iter()
                .any(|(ids, fwd)| !blocked_ids(ids, fwd, &in_z, &anc_z))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONE: [&str; 0] = [];

    fn fig3() -> Dag {
        Dag::from_edges(&[("Z", "X"), ("Z", "Y"), ("X", "W"), ("W", "Y")]).unwrap()
    }

    #[test]
    fn fork_and_chain_blocking() {
        let g = fig3();
        assert!(d_separated(&g, &["X"], &["Y"], &["Z", "W"]).unwrap());
        assert!(!d_separated(&g, &["X"], &["Y"], &NONE).unwrap());
        assert!(!d_separated(&g, &["X"], &["Y"], &["Z"]).unwrap());
        assert!(d_separated_by_paths(&g, &["X"], &["Y"], &["Z", "W"]).unwrap());
        assert!(!d_separated_by_paths(&g, &["X"], &["Y"], &NONE).unwrap());
    }

    #[test]
    fn collider_semantics() {
        let g = Dag::from_edges(&[("A", "C"), ("B", "C"), ("C", "D")]).unwrap();
        for f in [d_separated::<&str, &str, &str>, d_separated_by_paths::<&str>] {
            assert!(f(&g, &["A"], &["B"], &[]).unwrap());
            assert!(!f(&g, &["A"], &["B"], &["C"]).unwrap());
            assert!(!f(&g, &["A"], &["B"], &["D"]).unwrap());
        }
    }

    #[test]
    fn invalid_queries() {
        let g = fig3();
        assert_eq!(
            d_separated(&g, &["X"], &["X"], &NONE),
            Err(GraphError::OverlappingSets("X".into()))
        );
        assert_eq!(
            d_separated(&g, &["X"], &["Y"], &["Y"]),
            Err(GraphError::OverlappingSets("Y".into()))
        );
        assert_eq!(
            d_separated(&g, &["X"], &["Q"], &NONE),
            Err(GraphError::UnknownNode("Q".into()))
        );
    }
}
