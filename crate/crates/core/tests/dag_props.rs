mod common;

use causeway::dag::{all_paths, backdoor_paths, d_separated, d_separated_by_paths, parse_dot, serialize_dot};
use causeway::Dag;
use common::{arb_dag, dag_from_mask, names_in, pair_count, Small};
use proptest::prelude::*;

fn queries(n: usize) -> impl Iterator<Item = (usize, usize, u32)> {
    (0..n).flat_map(move |x| {
        (x + 1..n).flat_map(move |y| {
            (0u32..1 << n)
                .filter(move |z| z >> x & 1 == 0 && z >> y & 1 == 0)
                .map(move |z| (x, y, z))
        })
    })
}

#[test]
fn reachability_matches_path_oracle_on_all_four_node_dags() {
    let n = 4;
    for mask in 0..1u64 << pair_count(n) {
        let g = dag_from_mask(n, mask);
        let s = Small::from_dag(&g);
        for (x, y, z) in queries(n) {
            let (xs, ys, zs) = (names_in(&g, 1 << x), names_in(&g, 1 << y), names_in(&g, z));
            let expected = s.d_separated(x, y, z);
            assert_eq!(
                d_separated(&g, &xs, &ys, &zs).unwrap(),
                expected,
                "mask {mask} x {x} y {y} z {z:b}"
            );
            assert_eq!(d_separated_by_paths(&g, &xs, &ys, &zs).unwrap(), expected);
        }
    }
}

#[test]
fn set_queries_reduce_to_pairwise() {
    // xs and ys are separated iff every pair across them is.
    let n = 5;
    for mask in (0..1u64 << pair_count(n)).step_by(7) {
        let g = dag_from_mask(n, mask);
        let s = Small::from_dag(&g);
        let xs = names_in(&g, 0b00011);
        let ys = names_in(&g, 0b01000);
        let zs = names_in(&g, 0b00100);
        let expected = [0, 1].iter().all(|&x| s.d_separated(x, 3, 0b00100));
        assert_eq!(d_separated(&g, &xs, &ys, &zs).unwrap(), expected, "mask {mask}");
    }
}

#[test]
fn confounded_mediation_examples() {
    let g = parse_dot("digraph { Z -> X; Z -> Y; X -> W; W -> Y; }").unwrap();
    assert!(d_separated(&g, &["X"], &["Y"], &["Z", "W"]).unwrap());
    assert!(!d_separated::<&str, &str, &str>(&g, &["X"], &["Y"], &[]).unwrap());
    assert_eq!(all_paths(&g, "X", "Y").unwrap().len(), 2);
    let bd = backdoor_paths(&g, "X", "Y").unwrap();
    assert_eq!(bd.len(), 1);
    assert_eq!(bd[0].to_string(), "X←Z→Y");
}

#[test]
fn empty_graph_round_trips() {
    let g = parse_dot("digraph { }").unwrap();
    assert!(g.is_empty());
    assert_eq!(parse_dot(&serialize_dot(&g)).unwrap(), g);
}

fn path_invariants(g: &Dag, x: &str, y: &str) {
    for p in all_paths(g, x, y).unwrap() {
        let nodes: Vec<&str> = p.nodes().collect();
        let mut uniq = nodes.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), nodes.len(), "repeated node in {p}");
        assert_eq!(nodes[0], x);
        assert_eq!(p.end(), y);
        let mut prev = x;
        for h in &p.hops {
            let edge = match h.direction {
                causeway::dag::Direction::Forward => g.has_edge(prev, &h.node),
                causeway::dag::Direction::Backward => g.has_edge(&h.node, prev),
            };
            assert!(edge, "hop {prev} -> {} is not an edge", h.node);
            prev = &h.node;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn d_separation_is_symmetric(g in arb_dag(8), x in 0usize..8, y in 0usize..8, z in any::<u32>()) {
        let n = g.node_count();
        let (x, y) = (x % n, y % n);
        prop_assume!(x != y);
        let z = z & ((1 << n) - 1) & !(1 << x) & !(1 << y);
        let (xs, ys, zs) = (names_in(&g, 1 << x), names_in(&g, 1 << y), names_in(&g, z));
        prop_assert_eq!(d_separated(&g, &xs, &ys, &zs).unwrap(), d_separated(&g, &ys, &xs, &zs).unwrap());
    }

    #[test]
    fn d_separation_matches_oracle_on_shuffled_dags(g in arb_dag(7), x in 0usize..7, y in 0usize..7, z in any::<u32>()) {
        let n = g.node_count();
        let (x, y) = (x % n, y % n);
        prop_assume!(x != y);
        let z = z & ((1 << n) - 1) & !(1 << x) & !(1 << y);
        let s = Small::from_dag(&g);
        let (xs, ys, zs) = (names_in(&g, 1 << x), names_in(&g, 1 << y), names_in(&g, z));
        prop_assert_eq!(d_separated(&g, &xs, &ys, &zs).unwrap(), s.d_separated(x, y, z));
    }

    #[test]
    fn dot_round_trip(g in arb_dag(8), labelled in any::<u8>(), weights in proptest::collection::vec(-5.0f64..5.0, 0..28)) {
        let mut g2 = Dag::new();
        for (i, v) in g.nodes().iter().enumerate() {
            g2.add_node(v);
            if labelled >> (i % 8) & 1 == 1 {
                g2.set_label(v, format!("label of {v}")).unwrap();
            }
        }
        for (i, e) in g.edges().enumerate() {
            match weights.get(i) {
                Some(&w) => g2.add_weighted_edge(&e.from, &e.to, w).unwrap(),
                None => g2.add_edge(&e.from, &e.to).unwrap(),
            }
        }
        let text = serialize_dot(&g2);
        prop_assert_eq!(parse_dot(&text).unwrap(), g2);
    }

    #[test]
    fn paths_are_simple_walks_over_edges(g in arb_dag(6), x in 0usize..6, y in 0usize..6) {
        let n = g.node_count();
        let (x, y) = (x % n, y % n);
        prop_assume!(x != y);
        let names = g.nodes().to_vec();
        path_invariants(&g, &names[x], &names[y]);
        let s = Small::from_dag(&g);
        prop_assert_eq!(all_paths(&g, &names[x], &names[y]).unwrap().len(), s.paths(x, y).len());
    }
}
