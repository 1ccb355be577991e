//! Graphical identification: backdoor, frontdoor, instrumental variables
//! and mediation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::dag::{d_separated, Dag, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Backdoor,
    Iv,
    Frontdoor,
    Mediation,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Backdoor => "backdoor",
            Strategy::Iv => "iv",
            Strategy::Frontdoor => "frontdoor",
            Strategy::Mediation => "mediation",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "backdoor" => Ok(Strategy::Backdoor),
            "iv" => Ok(Strategy::Iv),
            "frontdoor" => Ok(Strategy::Frontdoor),
            "mediation" => Ok(Strategy::Mediation),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum IdentifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("treatment and outcome are both `{0}`")]
    SameNode(String),
    #[error("`{node}` is a descendant of the treatment `{treatment}`")]
    DescendantOfTreatment { node: String, treatment: String },
    #[error("adjustment set contains the treatment or outcome `{0}`")]
    EndpointInSet(String),
}

/// An identified effect of `treatment` on `outcome`. Node sets are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimand {
    pub strategy: Strategy,
    pub treatment: String,
    pub outcome: String,
    pub adjustment: Vec<String>,
    pub mediators: Vec<String>,
    pub instruments: Vec<String>,
    pub expression: String,
}

impl Estimand {
    /// Backdoor estimand with a caller-chosen adjustment set.
    pub fn backdoor(treatment: &str, outcome: &str, adjustment: &[&str]) -> Estimand {
        let mut adjustment: Vec<String> = adjustment.iter().map(|s| s.to_string()).collect();
        adjustment.sort();
        adjustment.dedup();
        let expression = backdoor_expression(treatment, outcome, &adjustment);
        Estimand {
            strategy: Strategy::Backdoor,
            treatment: treatment.into(),
            outcome: outcome.into(),
            adjustment,
            mediators: Vec::new(),
            instruments: Vec::new(),
            expression,
        }
    }

    pub fn iv(treatment: &str, outcome: &str, instruments: &[&str]) -> Estimand {
        let mut instruments: Vec<String> = instruments.iter().map(|s| s.to_string()).collect();
        instruments.sort();
        instruments.dedup();
        let expression = iv_expression(treatment, outcome, &instruments);
        Estimand {
            strategy: Strategy::Iv,
            treatment: treatment.into(),
            outcome: outcome.into(),
            adjustment: Vec::new(),
            mediators: Vec::new(),
            instruments,
            expression,
        }
    }

    pub fn frontdoor(treatment: &str, outcome: &str, mediators: &[&str]) -> Estimand {
        let mut mediators: Vec<String> = mediators.iter().map(|s| s.to_string()).collect();
        mediators.sort();
        mediators.dedup();
        let expression = frontdoor_expression(treatment, outcome, &mediators);
        Estimand {
            strategy: Strategy::Frontdoor,
            treatment: treatment.into(),
            outcome: outcome.into(),
            adjustment: Vec::new(),
            mediators,
            instruments: Vec::new(),
            expression,
        }
    }

    pub fn mediation(treatment: &str, outcome: &str, mediators: &[&str], adjustment: &[&str]) -> Estimand {
        let mut e = Estimand::backdoor(treatment, outcome, adjustment);
        let mut mediators: Vec<String> = mediators.iter().map(|s| s.to_string()).collect();
        mediators.sort();
        mediators.dedup();
        let mut with_m = e.adjustment.clone();
        with_m.extend(mediators.iter().cloned());
        e.expression = format!(
            "direct: {}; indirect: total - direct",
            backdoor_expression(treatment, outcome, &with_m)
        );
        e.strategy = Strategy::Mediation;
        e.mediators = mediators;
        e
    }

    /// The estimand block body (without the `### Estimand` header).
    pub fn describe(&self) -> String {
        let mut s = format!(
            "Estimand name: {}\nEstimand expression: {}\n",
            self.strategy, self.expression
        );
        let set = |v: &[String]| format!("{{{}}}", v.join(", "));
        match self.strategy {
            Strategy::Backdoor => s += &format!("Adjustment set: {}\n", set(&self.adjustment)),
            Strategy::Iv => s += &format!("Instruments: {}\n", set(&self.instruments)),
            Strategy::Frontdoor => s += &format!("Mediators: {}\n", set(&self.mediators)),
            Strategy::Mediation => {
                s += &format!("Mediators: {}\n", set(&self.mediators));
                s += &format!("Adjustment set: {}\n", set(&self.adjustment));
            }
        }
        s
    }
}

fn backdoor_expression(t: &str, o: &str, zs: &[String]) -> String {
    let mut given = vec![t.to_string()];
    given.extend(zs.iter().cloned());
    format!("d/d[{t}] E[{o}|{}]", given.join(","))
}

fn iv_expression(t: &str, o: &str, zs: &[String]) -> String {
    let z = zs.first().map_or("", String::as_str);
    format!("Cov({o},{z}) / Cov({t},{z})")
}

fn frontdoor_expression(t: &str, o: &str, ws: &[String]) -> String {
    let w = ws.join(",");
    format!("sum_{{{w}}} P({w}|{t}) sum_{{{t}'}} P({o}|{t}',{w}) P({t}')")
}

fn check_pair(g: &Dag, t: &str, o: &str) -> Result<(), IdentifyError> {
    g.idx(t)?;
    g.idx(o)?;
    if t == o {
        return Err(IdentifyError::SameNode(t.to_string()));
    }
    Ok(())
}

/// Whether `zs` blocks every backdoor path from `t` to `o`.
///
/// Fails if `zs` holds `t`, `o` or any descendant of `t`.
pub fn check_backdoor<S: AsRef<str>>(g: &Dag, t: &str, o: &str, zs: &[S]) -> Result<bool, IdentifyError> {
    check_pair(g, t, o)?;
    g.idx_set(zs)?;
    let de = g.descendants(t)?;
    for z in zs {
        let z = z.as_ref();
        if z == t || z == o {
            return Err(IdentifyError::EndpointInSet(z.to_string()));
        }
        if de.contains(z) {
            return Err(IdentifyError::DescendantOfTreatment {
                node: z.to_string(),
                treatment: t.to_string(),
            });
        }
    }
    Ok(d_separated(&g.without_outgoing(t)?, &[t], &[o], zs)?)
}

/// The three frontdoor conditions for mediator set `ws`:
/// every directed `t -> o` path passes through `ws`; no open backdoor path
/// from `t` to any `w`; every backdoor path from each `w` to `o` is blocked
/// by `t`.
pub fn check_frontdoor<S: AsRef<str>>(g: &Dag, t: &str, o: &str, ws: &[S]) -> Result<bool, IdentifyError> {
    check_pair(g, t, o)?;
    let w_ids = g.idx_set(ws)?;
    let ti = g.idx(t)?;
    let oi = g.idx(o)?;
    if w_ids.contains(&ti) || w_ids.contains(&oi) {
        return Ok(false);
    }
    // Condition 1: o unreachable from t along directed edges avoiding ws.
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![ti];
    seen[ti] = true;
    while let Some(v) = stack.pop() {
        for &c in g.child_ids(v) {
            if c == oi {
                return Ok(false);
            }
            if !seen[c] && !w_ids.contains(&c) {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    let g_t = g.without_outgoing(t)?;
    for w in ws {
        let w = w.as_ref();
        if !d_separated(&g_t, &[t], &[w], &[] as &[&str])? {
            return Ok(false);
        }
        if !d_separated(&g.without_outgoing(w)?, &[w], &[o], &[t])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nodes that are parents of `t`, and are d-separated from `o` once the
/// edges out of `t` are removed (no direct effect on `o`, no common cause
/// with it).
pub fn find_instruments(g: &Dag, t: &str, o: &str) -> Result<Vec<String>, IdentifyError> {
    check_pair(g, t, o)?;
    let g_t = g.without_outgoing(t)?;
    let mut out = Vec::new();
    for z in g.parents(t)? {
        if z == o {
            continue;
        }
        if d_separated(&g_t, &[z], &[o], &[] as &[&str])? {
            out.push(z.to_string());
        }
    }
    out.sort();
    Ok(out)
}

/// `(direct, mediators)`: whether the edge `t -> o` exists, and the nodes
/// strictly between `t` and `o` on directed paths.
pub fn identify_mediation(g: &Dag, t: &str, o: &str) -> Result<(bool, Vec<String>), IdentifyError> {
    check_pair(g, t, o)?;
    let de = g.descendants(t)?;
    let an = g.ancestors(o)?;
    let mediators = de.intersection(&an).cloned().collect();
    Ok((g.has_edge(t, o), mediators))
}

#[derive(Debug, Clone, Default)]
pub struct IdentifyOptions {
    /// Variables without data; never used in adjustment, mediator or
    /// instrument sets.
    pub unobserved: BTreeSet<String>,
    /// Report mediation even without a coexisting direct edge and mediated
    /// path.
    pub include_mediation: bool,
}

/// Every applicable estimand, in the order backdoor, iv, frontdoor,
/// mediation, plus a reason for each strategy that does not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub treatment: String,
    pub outcome: String,
    pub estimands: Vec<Estimand>,
    pub unavailable: Vec<(Strategy, String)>,
}

pub const NO_SUCH_VARIABLE: &str = "No such variable found!";

impl Identification {
    pub fn get(&self, strategy: Strategy) -> Option<&Estimand> {
        self.estimands.iter().find(|e| e.strategy == strategy)
    }

    fn mediation_listed(&self) -> bool {
        self.get(Strategy::Mediation).is_some() || self.unavailable.iter().any(|(s, _)| *s == Strategy::Mediation)
    }
}

impl fmt::Display for Identification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Estimand type: nonparametric-ate")?;
        let mut strategies = vec![Strategy::Backdoor, Strategy::Iv, Strategy::Frontdoor];
        if self.mediation_listed() {
            strategies.push(Strategy::Mediation);
        }
        for (i, s) in strategies.into_iter().enumerate() {
            writeln!(f, "\n### Estimand : {}", i + 1)?;
            if let Some(e) = self.get(s) {
                write!(f, "{}", e.describe())?;
            } else {
                writeln!(f, "Estimand name: {s}")?;
                let reason = self
                    .unavailable
                    .iter()
                    .find(|(u, _)| *u == s)
                    .map_or(NO_SUCH_VARIABLE, |(_, r)| r.as_str());
                writeln!(f, "{reason}")?;
            }
        }
        Ok(())
    }
}

pub fn identify_effect(g: &Dag, t: &str, o: &str) -> Result<Identification, IdentifyError> {
    identify_effect_with(g, t, o, &IdentifyOptions::default())
}

/// Subsets of `items` in order of size, then lexicographically.
fn subsets_by_size(items: &[String], min: usize) -> impl Iterator<Item = Vec<&str>> {
    (min..=items.len()).flat_map(move |k| {
        let mut out: Vec<Vec<&str>> = Vec::new();
        let mut cur = Vec::new();
        fn rec<'a>(items: &'a [String], k: usize, start: usize, cur: &mut Vec<&'a str>, out: &mut Vec<Vec<&'a str>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..items.len() {
                cur.push(&items[i]);
                rec(items, k, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(items, k, 0, &mut cur, &mut out);
        out
    })
}

/// Smallest valid backdoor set (alphabetical tie-break) drawn from observed
/// ancestors of `t` or `o` that are not descendants of `t`.
pub fn minimal_backdoor_set(
    g: &Dag,
    t: &str,
    o: &str,
    unobserved: &BTreeSet<String>,
) -> Result<Option<Vec<String>>, IdentifyError> {
    check_pair(g, t, o)?;
    let g_t = g.without_outgoing(t)?;
    let de = g.descendants(t)?;
    let mut candidates: BTreeSet<String> = g_t.ancestors(t)?;
    candidates.extend(g_t.ancestors(o)?);
    let candidates: Vec<String> = candidates
        .into_iter()
        .filter(|c| c != t && c != o && !de.contains(c) && !unobserved.contains(c))
        .collect();
    for zs in subsets_by_size(&candidates, 0) {
        if d_separated(&g_t, &[t], &[o], &zs)? {
            return Ok(Some(zs.into_iter().map(String::from).collect()));
        }
    }
    Ok(None)
}

pub fn identify_effect_with(
    g: &Dag,
    t: &str,
    o: &str,
    opts: &IdentifyOptions,
) -> Result<Identification, IdentifyError> {
    check_pair(g, t, o)?;
    let mut estimands = Vec::new();
    let mut unavailable = Vec::new();

    let backdoor = minimal_backdoor_set(g, t, o, &opts.unobserved)?;
    match &backdoor {
        Some(zs) => {
            let zs: Vec<&str> = zs.iter().map(String::as_str).collect();
            estimands.push(Estimand::backdoor(t, o, &zs));
        }
        None => unavailable.push((
            Strategy::Backdoor,
            "No observed adjustment set blocks every backdoor path.".to_string(),
        )),
    }

    let instruments: Vec<String> = find_instruments(g, t, o)?
        .into_iter()
        .filter(|z| !opts.unobserved.contains(z))
        .collect();
    if instruments.is_empty() {
        unavailable.push((Strategy::Iv, NO_SUCH_VARIABLE.to_string()));
    } else {
        let zs: Vec<&str> = instruments.iter().map(String::as_str).collect();
        estimands.push(Estimand::iv(t, o, &zs));
    }

    let (direct, mediators) = identify_mediation(g, t, o)?;
    let observed: Vec<String> = mediators
        .iter()
        .filter(|m| !opts.unobserved.contains(*m))
        .cloned()
        .collect();
    let mut frontdoor = None;
    for ws in subsets_by_size(&observed, 1) {
        if check_frontdoor(g, t, o, &ws)? {
            frontdoor = Some(ws);
            break;
        }
    }
    match frontdoor {
        Some(ws) => estimands.push(Estimand::frontdoor(t, o, &ws)),
        None => unavailable.push((Strategy::Frontdoor, NO_SUCH_VARIABLE.to_string())),
    }

    if opts.include_mediation || (direct && !mediators.is_empty()) {
        let all_observed = observed.len() == mediators.len();
        match (&backdoor, all_observed && !mediators.is_empty()) {
            (Some(zs), true) => {
                let ms: Vec<&str> = mediators.iter().map(String::as_str).collect();
                let zs: Vec<&str> = zs.iter().map(String::as_str).collect();
                estimands.push(Estimand::mediation(t, o, &ms, &zs));
            }
            (None, _) => unavailable.push((
                Strategy::Mediation,
                "No observed adjustment set blocks every backdoor path.".to_string(),
            )),
            (Some(_), false) => unavailable.push((Strategy::Mediation, NO_SUCH_VARIABLE.to_string())),
        }
    }

    Ok(Identification {
        treatment: t.to_string(),
        outcome: o.to_string(),
        estimands,
        unavailable,
    })
}
