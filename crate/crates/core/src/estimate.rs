//! Effect estimators for identified estimands.

use rand::Rng;
use thiserror::Error;

use crate::data::{DataError, DataTable};
use crate::identify::{Estimand, Strategy};
use crate::ols::{ols, OlsError, OlsFit};
use crate::stats::{correlation, covariance, mean, two_sided_p, Z_975};

/// `|corr(treatment, instrument)|` below this is a weak instrument.
pub const WEAK_INSTRUMENT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Regression(#[from] OlsError),
    #[error("{estimator} estimator needs a {expected} estimand, got {got}")]
    WrongStrategy {
        estimator: &'static str,
        expected: Strategy,
        got: Strategy,
    },
    #[error("weak instrument `{instrument}`: correlation with treatment {correlation:e}")]
    WeakInstrument { instrument: String, correlation: f64 },
    #[error("{0} estimand has an empty {1} set")]
    EmptySet(Strategy, &'static str),
}

/// Average treatment effect with a normal-approximation 95% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub ate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub strategy: Strategy,
    pub n: usize,
}

impl Estimate {
    pub fn normal(ate: f64, se: f64, strategy: Strategy, n: usize) -> Estimate {
        let p_value = if se > 0.0 {
            two_sided_p(ate / se)
        } else if ate == 0.0 {
            1.0
        } else {
            0.0
        };
        Estimate {
            ate,
            se,
            ci_low: ate - Z_975 * se,
            ci_high: ate + Z_975 * se,
            p_value,
            strategy,
            n,
        }
    }
}

fn expect(e: &Estimand, estimator: &'static str, expected: Strategy) -> Result<(), EstimateError> {
    if e.strategy != expected {
        return Err(EstimateError::WrongStrategy {
            estimator,
            expected,
            got: e.strategy,
        });
    }
    Ok(())
}

/// OLS of `y` on the named columns, in order.
pub fn regress<S: AsRef<str>>(data: &DataTable, y: &str, xs: &[S]) -> Result<OlsFit, EstimateError> {
    let cols: Vec<(&str, &[f64])> = xs
        .iter()
        .map(|x| Ok((x.as_ref(), data.column(x.as_ref())?)))
        .collect::<Result<_, DataError>>()?;
    Ok(ols(data.column(y)?, &cols)?)
}

fn treatment_coef(fit: &OlsFit) -> (f64, f64) {
    (fit.coefficients[0], fit.std_errors[0])
}

fn with_treatment(e: &Estimand, extra: &[String]) -> Vec<String> {
    let mut v = vec![e.treatment.clone()];
    v.extend(extra.iter().cloned());
    v
}

/// Coefficient on the treatment in the regression of the outcome on the
/// treatment and the adjustment set.
pub fn estimate_backdoor_linear(data: &DataTable, e: &Estimand) -> Result<Estimate, EstimateError> {
    expect(e, "backdoor", Strategy::Backdoor)?;
    backdoor_fit(data, e).map(|(est, _)| est)
}

fn backdoor_fit(data: &DataTable, e: &Estimand) -> Result<(Estimate, OlsFit), EstimateError> {
    let fit = regress(data, &e.outcome, &with_treatment(e, &e.adjustment))?;
    let (b, se) = treatment_coef(&fit);
    Ok((Estimate::normal(b, se, e.strategy, data.n_rows()), fit))
}

/// Wald ratio `cov(y, z) / cov(x, z)` with the first instrument, and the
/// usual homoskedastic instrumental-variable standard error.
pub fn estimate_iv_wald(data: &DataTable, e: &Estimand) -> Result<Estimate, EstimateError> {
    expect(e, "iv", Strategy::Iv)?;
    let z_name = e
        .instruments
        .first()
        .ok_or(EstimateError::EmptySet(Strategy::Iv, "instrument"))?;
    let z = data.column(z_name)?;
    let x = data.column(&e.treatment)?;
    let y = data.column(&e.outcome)?;
    let n = data.n_rows();
    if n < 3 {
        return Err(OlsError::TooFewRows { rows: n, params: 2 }.into());
    }
    let r = correlation(x, z);
    if r.is_nan() || r.abs() < WEAK_INSTRUMENT_TOL {
        return Err(EstimateError::WeakInstrument {
            instrument: z_name.clone(),
            correlation: if r.is_nan() { 0.0 } else { r },
        });
    }
    let cxz = covariance(x, z);
    let beta = covariance(y, z) / cxz;
    let alpha = mean(y) - beta * mean(x);
    let rss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - alpha - beta * xi).powi(2)).sum();
    let sigma2 = rss / (n - 2) as f64;
    let zbar = mean(z);
    let szz: f64 = z.iter().map(|v| (v - zbar).powi(2)).sum();
    let sxz = cxz * (n - 1) as f64;
    let se = (sigma2 * szz / (sxz * sxz)).sqrt();
    Ok(Estimate::normal(beta, se, Strategy::Iv, n))
}

/// Product of the treatment-to-mediator slope and the mediator-to-outcome
/// slope (adjusting for the treatment), summed over mediators. The standard
/// error is first-order delta method, treating the two stages as
/// independent.
pub fn estimate_frontdoor_two_stage(data: &DataTable, e: &Estimand) -> Result<Estimate, EstimateError> {
    expect(e, "frontdoor", Strategy::Frontdoor)?;
    if e.mediators.is_empty() {
        return Err(EstimateError::EmptySet(Strategy::Frontdoor, "mediator"));
    }
    let second = regress(data, &e.outcome, &with_treatment(e, &e.mediators))?;
    let mut ate = 0.0;
    let mut var = 0.0;
    for (k, m) in e.mediators.iter().enumerate() {
        let first = regress(data, m, &[&e.treatment])?;
        let (a, sa) = treatment_coef(&first);
        let (b, sb) = (second.coefficients[k + 1], second.std_errors[k + 1]);
        ate += a * b;
        var += b * b * sa * sa + a * a * sb * sb;
    }
    Ok(Estimate::normal(ate, var.sqrt(), Strategy::Frontdoor, data.n_rows()))
}

/// Linear decomposition into `(direct, indirect)`. Direct is the treatment
/// coefficient controlling for mediators and the adjustment set; indirect is
/// the total effect minus direct, which in least squares equals the sum of
/// path products used for its delta-method standard error.
pub fn estimate_mediation(data: &DataTable, e: &Estimand) -> Result<(Estimate, Estimate), EstimateError> {
    expect(e, "mediation", Strategy::Mediation)?;
    if e.mediators.is_empty() {
        return Err(EstimateError::EmptySet(Strategy::Mediation, "mediator"));
    }
    let n = data.n_rows();
    let total = regress(data, &e.outcome, &with_treatment(e, &e.adjustment))?;
    let mut controls = e.mediators.clone();
    controls.extend(e.adjustment.iter().cloned());
    let full = regress(data, &e.outcome, &with_treatment(e, &controls))?;
    let (d, sd) = treatment_coef(&full);
    let mut var = 0.0;
    for (k, m) in e.mediators.iter().enumerate() {
        let path = regress(data, m, &with_treatment(e, &e.adjustment))?;
        let (a, sa) = treatment_coef(&path);
        let (b, sb) = (full.coefficients[k + 1], full.std_errors[k + 1]);
        var += b * b * sa * sa + a * a * sb * sb;
    }
    let indirect = total.coefficients[0] - d;
    Ok((
        Estimate::normal(d, sd, Strategy::Mediation, n),
        Estimate::normal(indirect, var.sqrt(), Strategy::Mediation, n),
    ))
}

/// Dispatch on the estimand's strategy. Mediation yields the total effect.
pub fn estimate_effect(data: &DataTable, e: &Estimand) -> Result<Estimate, EstimateError> {
    match e.strategy {
        Strategy::Backdoor => estimate_backdoor_linear(data, e),
        Strategy::Iv => estimate_iv_wald(data, e),
        Strategy::Frontdoor => estimate_frontdoor_two_stage(data, e),
        Strategy::Mediation => {
            let fit = regress(data, &e.outcome, &with_treatment(e, &e.adjustment))?;
            let (b, se) = treatment_coef(&fit);
            Ok(Estimate::normal(b, se, Strategy::Mediation, data.n_rows()))
        }
    }
}

/// Draws from `P(outcome | do(treatment = x_value))`: resample an
/// adjustment row, predict from the backdoor fit, add a resampled residual.
pub fn do_sample<R: Rng + ?Sized>(
    data: &DataTable,
    e: &Estimand,
    x_value: f64,
    n_draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>, EstimateError> {
    expect(e, "do-sampler", Strategy::Backdoor)?;
    let (_, fit) = backdoor_fit(data, e)?;
    let adj: Vec<&[f64]> = e.adjustment.iter().map(|z| data.column(z)).collect::<Result<_, _>>()?;
    let n = data.n_rows();
    let mut row = vec![x_value; 1 + adj.len()];
    Ok((0..n_draws)
        .map(|_| {
            let r = rng.random_range(0..n);
            for (k, col) in adj.iter().enumerate() {
                row[k + 1] = col[r];
            }
            let resid = fit.residuals[rng.random_range(0..n)];
            fit.predict(&row) + resid
        })
        .collect())
}
