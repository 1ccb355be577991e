mod common;

use std::collections::{BTreeSet, HashMap};

use causeway::dag::parse_dot;
use causeway::identify::{
    check_backdoor, check_frontdoor, find_instruments, identify_effect, identify_effect_with, identify_mediation,
    minimal_backdoor_set, IdentifyError, IdentifyOptions, Strategy,
};
use causeway::Dag;
use common::{arb_dag, names_in, Small};
use proptest::prelude::*;

fn pos(g: &Dag, name: &str) -> usize {
    g.nodes().iter().position(|n| n == name).unwrap()
}

fn mask_of(g: &Dag, names: &[String]) -> u32 {
    names.iter().fold(0, |m, n| m | 1 << pos(g, n))
}

/// Backdoor oracle: every path from `t` to `o` entering `t` is blocked by `z`.
fn oracle_backdoor(s: &Small, t: usize, o: usize, z: u32) -> bool {
    s.paths(t, o)
        .iter()
        .filter(|(_, f)| !f[0])
        .all(|(p, f)| s.blocked(p, f, z))
}

/// Smallest size of a valid backdoor set among all sets of non-descendants
/// of `t` excluding `o`.
fn oracle_min_size(s: &Small, t: usize, o: usize) -> Option<u32> {
    let allowed = !(s.descendants[t] | 1 << o) & ((1 << s.n) - 1);
    (0u32..1 << s.n)
        .filter(|z| z & !allowed == 0)
        .filter(|&z| oracle_backdoor(s, t, o, z))
        .map(u32::count_ones)
        .min()
}

fn pick(g: &Dag, a: usize, b: usize) -> Option<(String, String)> {
    let n = g.node_count();
    let (a, b) = (a % n, b % n);
    (a != b).then(|| (g.nodes()[a].clone(), g.nodes()[b].clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn minimal_backdoor_set_is_valid_minimal_and_smallest(g in arb_dag(8), a in 0usize..8, b in 0usize..8) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        let s = Small::from_dag(&g);
        let (ti, oi) = (pos(&g, &t), pos(&g, &o));
        let found = minimal_backdoor_set(&g, &t, &o, &BTreeSet::new()).unwrap();
        let expected = oracle_min_size(&s, ti, oi);
        prop_assert_eq!(found.as_ref().map(|z| z.len() as u32), expected);
        if let Some(z) = found {
            prop_assert!(check_backdoor(&g, &t, &o, &z).unwrap());
            let zm = mask_of(&g, &z);
            prop_assert!(oracle_backdoor(&s, ti, oi, zm));
            // No strict subset passes.
            let mut sub = zm;
            while sub != 0 {
                sub = (sub - 1) & zm;
                prop_assert!(!check_backdoor(&g, &t, &o, &names_in(&g, sub)).unwrap());
            }
            let mut sorted = z.clone();
            sorted.sort();
            prop_assert_eq!(sorted, z);
        }
    }

    #[test]
    fn check_backdoor_matches_oracle(g in arb_dag(7), a in 0usize..7, b in 0usize..7, z in any::<u32>()) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        let s = Small::from_dag(&g);
        let (ti, oi) = (pos(&g, &t), pos(&g, &o));
        let z = z & ((1 << s.n) - 1) & !s.descendants[ti] & !(1 << oi);
        prop_assert_eq!(check_backdoor(&g, &t, &o, &names_in(&g, z)).unwrap(), oracle_backdoor(&s, ti, oi, z));
    }

    #[test]
    fn no_backdoor_paths_gives_empty_adjustment(g in arb_dag(8), a in 0usize..8, b in 0usize..8) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        let s = Small::from_dag(&g);
        let (ti, oi) = (pos(&g, &t), pos(&g, &o));
        prop_assume!(s.paths(ti, oi).iter().all(|(_, f)| f[0]));
        let id = identify_effect(&g, &t, &o).unwrap();
        let e = id.get(Strategy::Backdoor).unwrap();
        prop_assert!(e.adjustment.is_empty());
        prop_assert_eq!(&id.estimands[0], e);
    }

    #[test]
    fn instruments_meet_the_three_conditions(g in arb_dag(7), a in 0usize..7, b in 0usize..7) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        let (ti, oi) = (pos(&g, &t), pos(&g, &o));
        let g_t = g.without_outgoing(&t).unwrap();
        let s_t = Small::from_dag(&g_t);
        let s = Small::from_dag(&g);
        let expected: Vec<String> = (0..s.n)
            .filter(|&z| z != ti && z != oi)
            .filter(|&z| s.children[z] >> ti & 1 == 1)
            .filter(|&z| s_t.d_separated(z, oi, 0))
            .map(|z| g.nodes()[z].clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assert_eq!(find_instruments(&g, &t, &o).unwrap(), expected);
    }

    #[test]
    fn frontdoor_sets_meet_the_three_conditions(g in arb_dag(7), a in 0usize..7, b in 0usize..7) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        let id = identify_effect(&g, &t, &o).unwrap();
        let Some(e) = id.get(Strategy::Frontdoor) else { return Ok(()) };
        let s = Small::from_dag(&g);
        let (ti, oi) = (pos(&g, &t), pos(&g, &o));
        let w = mask_of(&g, &e.mediators);
        for (p, f) in s.paths(ti, oi) {
            if f.iter().all(|&x| x) {
                prop_assert!(p.iter().any(|&v| w >> v & 1 == 1), "directed path avoids mediators");
            }
        }
        for wi in (0..s.n).filter(|v| w >> v & 1 == 1) {
            prop_assert!(s.paths(ti, wi).iter().filter(|(_, f)| !f[0]).all(|(p, f)| s.blocked(p, f, 0)));
            prop_assert!(s.paths(wi, oi).iter().filter(|(_, f)| !f[0]).all(|(p, f)| s.blocked(p, f, 1 << ti)));
        }
        prop_assert!(check_frontdoor(&g, &t, &o, &e.mediators).unwrap());
    }

    #[test]
    fn identification_survives_order_preserving_relabeling(g in arb_dag(7), a in 0usize..7, b in 0usize..7) {
        let Some((t, o)) = pick(&g, a, b) else { return Ok(()) };
        // v3 -> node_v3 keeps the alphabetical order of names.
        let map: HashMap<String, String> = g.nodes().iter().map(|v| (v.clone(), format!("node_{v}"))).collect();
        let h = g.renamed(&map);
        let before = identify_effect(&g, &t, &o).unwrap();
        let after = identify_effect(&h, &map[&t], &map[&o]).unwrap();
        let rename = |v: &[String]| v.iter().map(|x| map[x].clone()).collect::<Vec<_>>();
        prop_assert_eq!(before.estimands.len(), after.estimands.len());
        for (x, y) in before.estimands.iter().zip(&after.estimands) {
            prop_assert_eq!(x.strategy, y.strategy);
            prop_assert_eq!(rename(&x.adjustment), y.adjustment.clone());
            prop_assert_eq!(rename(&x.mediators), y.mediators.clone());
            prop_assert_eq!(rename(&x.instruments), y.instruments.clone());
        }
    }
}

fn fig4() -> Dag {
    parse_dot("digraph { W -> X; Z -> X; Z -> Y; X -> Y; }").unwrap()
}

#[test]
fn unobserved_confounder_leaves_only_the_instrument() {
    let opts = IdentifyOptions {
        unobserved: BTreeSet::from(["Z".to_string()]),
        include_mediation: false,
    };
    let id = identify_effect_with(&fig4(), "X", "Y", &opts).unwrap();
    assert!(id.get(Strategy::Backdoor).is_none());
    assert_eq!(id.get(Strategy::Iv).unwrap().instruments, ["W"]);
    assert_eq!(id.estimands[0].strategy, Strategy::Iv);
}

#[test]
fn tides_graph_report() {
    let g = parse_dot("digraph { ESd -> EMd -> h; ESd -> h; }").unwrap();
    let id = identify_effect(&g, "EMd", "h").unwrap();
    assert_eq!(id.estimands.len(), 1);
    assert_eq!(id.estimands[0].adjustment, ["ESd"]);
    let text = id.to_string();
    assert!(text.contains("Estimand name: backdoor"));
    assert_eq!(text.matches("No such variable found!").count(), 2);
}

#[test]
fn frontdoor_with_hidden_confounder() {
    let g = parse_dot("digraph { X -> W -> Y; U -> X; U -> Y; }").unwrap();
    assert!(check_frontdoor(&g, "X", "Y", &["W"]).unwrap());
    let opts = IdentifyOptions {
        unobserved: BTreeSet::from(["U".to_string()]),
        include_mediation: false,
    };
    let id = identify_effect_with(&g, "X", "Y", &opts).unwrap();
    assert_eq!(id.estimands.len(), 1);
    assert_eq!(id.estimands[0].strategy, Strategy::Frontdoor);
    assert_eq!(id.estimands[0].mediators, ["W"]);
}

#[test]
fn mediation_split_reported_when_both_routes_exist() {
    let g = parse_dot("digraph { X -> Y; X -> W -> Y; }").unwrap();
    assert_eq!(identify_mediation(&g, "X", "Y").unwrap(), (true, vec!["W".to_string()]));
    let id = identify_effect(&g, "X", "Y").unwrap();
    assert_eq!(id.get(Strategy::Mediation).unwrap().mediators, ["W"]);
    let chain = parse_dot("digraph { A -> B -> C; }").unwrap();
    assert!(identify_effect(&chain, "A", "C")
        .unwrap()
        .get(Strategy::Mediation)
        .is_none());
}

#[test]
fn invalid_queries() {
    let g = fig4();
    assert!(matches!(identify_effect(&g, "X", "X"), Err(IdentifyError::SameNode(_))));
    assert!(matches!(identify_effect(&g, "X", "nope"), Err(IdentifyError::Graph(_))));
    assert!(matches!(
        check_backdoor(&g, "W", "Y", &["X"]),
        Err(IdentifyError::DescendantOfTreatment { .. })
    ));
}
