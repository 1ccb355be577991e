//! Robustness checks: random common cause, placebo treatment, data subset.

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::data::{DataError, DataTable};
use crate::estimate::{estimate_effect, Estimate, EstimateError};
use crate::identify::{Estimand, Strategy};
use crate::stats::two_sided_p;

pub const DEFAULT_REPLICATES: usize = 100;
/// Fewer replicates than this make the normal fit unreliable; results are
/// flagged.
pub const MIN_STABLE_REPLICATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefuteMethod {
    RandomCommonCause,
    PlaceboTreatment,
    DataSubset,
}

impl RefuteMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RefuteMethod::RandomCommonCause => "random_common_cause",
            RefuteMethod::PlaceboTreatment => "placebo_treatment",
            RefuteMethod::DataSubset => "data_subset",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            RefuteMethod::RandomCommonCause => "Add a Random Common Cause",
            RefuteMethod::PlaceboTreatment => "Use a Placebo Treatment",
            RefuteMethod::DataSubset => "Use a subset of data",
        }
    }

    /// Stream id for the per-replicate generators, so methods sharing a
    /// base seed draw independent noise.
    fn stream(self) -> u64 {
        match self {
            RefuteMethod::RandomCommonCause => 1,
            RefuteMethod::PlaceboTreatment => 2,
            RefuteMethod::DataSubset => 3,
        }
    }
}

impl fmt::Display for RefuteMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RefuteMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random_common_cause" => Ok(RefuteMethod::RandomCommonCause),
            "placebo_treatment" | "placebo" => Ok(RefuteMethod::PlaceboTreatment),
            "data_subset" | "subset" => Ok(RefuteMethod::DataSubset),
            other => Err(format!("unknown refuter `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum RefuteError {
    #[error("at least one replicate is required")]
    NoReplicates,
    #[error("subset fraction {0} is outside (0, 1]")]
    BadFraction(f64),
    #[error("subset of {rows} rows is too small for the estimator: {source}")]
    SubsetTooSmall {
        rows: usize,
        #[source]
        source: EstimateError,
    },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefutationResult {
    pub method: RefuteMethod,
    pub original_effect: f64,
    /// Mean of the replicate effects.
    pub new_effect: f64,
    pub new_effect_sd: f64,
    pub p_value: f64,
    pub replicates: usize,
    /// Set when there are too few replicates for the normal fit to mean much.
    pub wide_variance: bool,
}

impl fmt::Display for RefutationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Refute: {}", self.method.title())?;
        writeln!(f, "Estimated effect:{:?}", self.original_effect)?;
        writeln!(f, "New effect:{:?}", self.new_effect)?;
        writeln!(f, "p value:{:?}", self.p_value)
    }
}

/// Fits a normal to `effects` and returns `(mean, sd, p)`, with `p` the
/// two-sided tail probability of `reference`.
///
/// With no spread (one replicate, or identical effects) `p` is 1 when the
/// mean equals the reference and 0 otherwise.
pub fn replicate_p_value(effects: &[f64], reference: f64) -> (f64, f64, f64) {
    let k = effects.len();
    let all_equal = effects.iter().all(|e| *e == effects[0]);
    let mean = if all_equal {
        effects[0]
    } else {
        effects.iter().sum::<f64>() / k as f64
    };
    let sd = if k < 2 || all_equal {
        0.0
    } else {
        (effects.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    };
    let p = if sd > 0.0 && sd.is_finite() {
        two_sided_p((reference - mean) / sd)
    } else {
        let tol = 1e-12 * reference.abs().max(1.0);
        if (mean - reference).abs() <= tol {
            1.0
        } else {
            0.0
        }
    };
    (mean, sd, p)
}

fn replicate_rng(seed: u64, i: usize, method: RefuteMethod) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
    rng.set_stream(method.stream());
    rng
}

fn normal_column<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn unique_name(data: &DataTable, base: &str) -> String {
    let mut name = base.to_string();
    while data.has_column(&name) {
        name.push('_');
    }
    name
}

fn run<F>(
    method: RefuteMethod,
    estimate: &Estimate,
    reference: f64,
    k: usize,
    seed: u64,
    replicate: F,
) -> Result<RefutationResult, RefuteError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64, RefuteError> + Sync,
{
    if k == 0 {
        return Err(RefuteError::NoReplicates);
    }
    let effects: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|i| replicate(&mut replicate_rng(seed, i, method)))
        .collect::<Result<_, _>>()?;
    let (new_effect, new_effect_sd, p_value) = replicate_p_value(&effects, reference);
    Ok(RefutationResult {
        method,
        original_effect: estimate.ate,
        new_effect,
        new_effect_sd,
        p_value,
        replicates: k,
        wide_variance: k < MIN_STABLE_REPLICATES,
    })
}

/// Adds an independent standard-normal column to the adjustment set and
/// re-estimates, `k` times. Strategies without an adjustment set (iv,
/// frontdoor) ignore the extra column.
pub fn refute_random_common_cause(
    data: &DataTable,
    estimand: &Estimand,
    estimate: &Estimate,
    k: usize,
    seed: u64,
) -> Result<RefutationResult, RefuteError> {
    let name = unique_name(data, "random_common_cause");
    let mut e = estimand.clone();
    if matches!(e.strategy, Strategy::Backdoor | Strategy::Mediation) {
        e.adjustment.push(name.clone());
    }
    run(
        RefuteMethod::RandomCommonCause,
        estimate,
        estimate.ate,
        k,
        seed,
        |rng| {
            let mut d = data.clone();
            d.push_column(name.clone(), normal_column(rng, data.n_rows()))?;
            Ok(estimate_effect(&d, &e)?.ate)
        },
    )
}

/// Replaces the treatment with independent standard-normal noise and
/// re-estimates, `k` times; the reference value is 0. An iv estimand is
/// re-estimated by plain regression on the placebo, since an independent
/// placebo is never a usable instrument target.
pub fn refute_placebo(
    data: &DataTable,
    estimand: &Estimand,
    estimate: &Estimate,
    k: usize,
    seed: u64,
) -> Result<RefutationResult, RefuteError> {
    let e = match estimand.strategy {
        Strategy::Iv => Estimand::backdoor(&estimand.treatment, &estimand.outcome, &[]),
        _ => estimand.clone(),
    };
    data.column(&e.treatment)?;
    run(RefuteMethod::PlaceboTreatment, estimate, 0.0, k, seed, |rng| {
        let mut d = data.clone();
        d.replace_column(&e.treatment, normal_column(rng, data.n_rows()))?;
        Ok(estimate_effect(&d, &e)?.ate)
    })
}

/// Re-estimates on `k` random subsets of `round(fraction * n)` rows, kept in
/// their original order.
pub fn refute_data_subset(
    data: &DataTable,
    estimand: &Estimand,
    estimate: &Estimate,
    fraction: f64,
    k: usize,
    seed: u64,
) -> Result<RefutationResult, RefuteError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(RefuteError::BadFraction(fraction));
    }
    let n = data.n_rows();
    let m = ((fraction * n as f64).round() as usize).min(n);
    run(RefuteMethod::DataSubset, estimate, estimate.ate, k, seed, |rng| {
        let mut rows = sample(rng, n, m).into_vec();
        rows.sort_unstable();
        let d = data.select_rows(&rows);
        estimate_effect(&d, estimand)
            .map(|e| e.ate)
            .map_err(|source| RefuteError::SubsetTooSmall { rows: m, source })
    })
}

/// Mean of the p-values, or `None` for an empty list.
pub fn aggregate_confidence(results: &[RefutationResult]) -> Option<f64> {
    if results.is_empty() {
        return None;
    }
    Some(results.iter().map(|r| r.p_value).sum::<f64>() / results.len() as f64)
}
