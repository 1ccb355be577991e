//! Config-driven model, identify, estimate, refute runs and their reports.

mod config;
mod report;

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{
    fixtures_dir, resolve_path, DatasetSpec, DiscoverAlgo, EffectSpec, ModelSpec, PipelineConfig, RefuteSpec,
    FIXTURES_ENV,
};
pub use report::{read_summary_csv, render_summary_table, write_summary_csv, SummaryRow};

use crate::dag::{parse_dot, serialize_dot, Dag};
use crate::data::DataTable;
use crate::discovery::{run_lingam, run_pc, DEFAULT_ALPHA};
use crate::estimate::{do_sample, estimate_effect, estimate_mediation, Estimate};
use crate::identify::{identify_effect_with, Estimand, IdentifyOptions, Strategy};
use crate::phenomena::ldr::load_ldr_dataset;
use crate::phenomena::ohm::{generate_ohm_dataset, OhmConstants, OhmRanges};
use crate::phenomena::quantum::build_entanglement_dataset;
use crate::phenomena::tides::load_tide_dataset;
use crate::refute::{
    aggregate_confidence, refute_data_subset, refute_placebo, refute_random_common_cause, RefuteMethod,
};
use crate::stats::mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Data,
    Model,
    Identify,
    Estimate,
    Refute,
}

impl Stage {
    pub fn number(self) -> usize {
        match self {
            Stage::Config | Stage::Data => 0,
            Stage::Model => 1,
            Stage::Identify => 2,
            Stage::Estimate => 3,
            Stage::Refute => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Data => "data",
            Stage::Model => "model",
            Stage::Identify => "identify",
            Stage::Estimate => "estimate",
            Stage::Refute => "refute",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, message: impl Into<String>) -> Self {
        PipelineError {
            stage,
            message: message.into(),
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {} ({}): {}",
            self.stage.number(),
            self.stage.name(),
            self.message
        )
    }
}

impl std::error::Error for PipelineError {}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: fmt::Display> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e.to_string()))
    }
}

/// Text report, its CSV twin, and the first failure if a stage failed.
/// Stages after a failure do not run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub summary: Option<SummaryRow>,
    pub failure: Option<PipelineError>,
}

impl Report {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    pub fn csv(&self) -> String {
        write_summary_csv(self.summary.as_slice())
    }
}

pub fn load_dataset(cfg: &PipelineConfig) -> Result<DataTable, PipelineError> {
    match &cfg.dataset {
        DatasetSpec::Csv { path } => DataTable::from_csv_path(cfg.resolve(path)).at(Stage::Data),
        DatasetSpec::Ldr { path } => load_ldr_dataset(cfg.resolve(path)).at(Stage::Data),
        DatasetSpec::Tides {
            earth_sun,
            earth_moon,
            tide,
        } => load_tide_dataset(cfg.resolve(earth_sun), cfg.resolve(earth_moon), cfg.resolve(tide))
            .map(|d| d.table)
            .at(Stage::Data),
        DatasetSpec::Ohm { rows, v, l, a, dt } => {
            let d = OhmRanges::default();
            let ranges = OhmRanges {
                v: v.unwrap_or(d.v),
                l: l.unwrap_or(d.l),
                a: a.unwrap_or(d.a),
                dt: dt.unwrap_or(d.dt),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.expect("validated"));
            generate_ohm_dataset(*rows, &ranges, &OhmConstants::default(), &mut rng).at(Stage::Data)
        }
        DatasetSpec::Quantum { states, shots } => Ok(build_entanglement_dataset(
            *states,
            *shots,
            cfg.seed.expect("validated"),
        )),
    }
}

pub fn build_model(cfg: &PipelineConfig, data: &DataTable) -> Result<Dag, PipelineError> {
    let err = |msg: String| PipelineError::new(Stage::Model, msg);
    let m = &cfg.model;
    if let Some(path) = &m.graph {
        let p = cfg.resolve(path);
        let text = std::fs::read_to_string(&p).map_err(|e| err(format!("{}: {e}", p.display())))?;
        return parse_dot(&text).map_err(|e| err(format!("{}: {e}", p.display())));
    }
    if let Some(text) = &m.dot {
        return parse_dot(text).at(Stage::Model);
    }
    let table = match &m.columns {
        Some(cols) => data.select_columns(cols).at(Stage::Model)?,
        None => data.clone(),
    };
    match m.discover.as_ref().expect("validated") {
        DiscoverAlgo::Pc => run_pc(&table, m.alpha.unwrap_or(DEFAULT_ALPHA))
            .to_dag()
            .at(Stage::Model),
        DiscoverAlgo::Lingam => run_lingam(&table).at(Stage::Model),
    }
}

fn fmt_set(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

/// Runs every configured stage and renders the report.
pub fn run_pipeline(cfg: &PipelineConfig) -> Report {
    let mut text = String::new();
    let mut summary = None;
    let failure = run_stages(cfg, &mut text, &mut summary).err();
    if let Some(f) = &failure {
        let _ = writeln!(text, "\nFAILED at {f}");
    }
    Report { text, summary, failure }
}

fn run_stages(cfg: &PipelineConfig, out: &mut String, summary: &mut Option<SummaryRow>) -> Result<(), PipelineError> {
    let (t, o) = (cfg.effect.treatment.as_str(), cfg.effect.outcome.as_str());
    let label = cfg.name.clone().unwrap_or_default();
    let _ = writeln!(
        out,
        "Causal analysis{}: {t} -> {o}",
        if label.is_empty() {
            String::new()
        } else {
            format!(" [{label}]")
        }
    );
    if let Some(seed) = cfg.seed {
        let _ = writeln!(out, "Seed: {seed}");
    }

    let data = load_dataset(cfg)?;
    log::info!("loaded {} rows x {} columns", data.n_rows(), data.n_cols());
    let _ = writeln!(out, "Data: {} rows; columns {}", data.n_rows(), data.names().join(", "));

    let g = build_model(cfg, &data)?;
    let model_err = |msg: String| PipelineError::new(Stage::Model, msg);
    for v in [t, o] {
        if !g.contains(v) {
            return Err(model_err(format!("unknown variable `{v}`: not a node of the model")));
        }
    }
    let unobserved: BTreeSet<String> = cfg.model.unobserved.iter().cloned().collect();
    for v in g.nodes() {
        if !unobserved.contains(v) && !data.has_column(v) {
            return Err(model_err(format!("model variable `{v}` has no data column")));
        }
    }
    let _ = writeln!(out, "\n## Model\n{}", serialize_dot(&g));

    let opts = IdentifyOptions {
        unobserved,
        include_mediation: cfg.effect.mediation,
    };
    let id = identify_effect_with(&g, t, o, &opts).at(Stage::Identify)?;
    let _ = writeln!(out, "## Identify\n{id}");
    let estimand: Estimand =
        match cfg.strategy()? {
            Some(s) => id
                .get(s)
                .cloned()
                .ok_or_else(|| PipelineError::new(Stage::Identify, format!("no {s} estimand for {t} -> {o}")))?,
            None => id.estimands.first().cloned().ok_or_else(|| {
                PipelineError::new(Stage::Identify, format!("effect of {t} on {o} is not identified"))
            })?,
        };

    log::info!("estimating {} effect of {t} on {o}", estimand.strategy);
    let est = estimate_effect(&data, &estimand).at(Stage::Estimate)?;
    let _ = writeln!(out, "## Estimate");
    write_estimate(out, &estimand, &est);
    if estimand.strategy == Strategy::Mediation {
        let (direct, indirect) = estimate_mediation(&data, &estimand).at(Stage::Estimate)?;
        let _ = writeln!(out, "Direct effect: {:?} (std. error {:?})", direct.ate, direct.se);
        let _ = writeln!(
            out,
            "Indirect effect: {:?} (std. error {:?})",
            indirect.ate, indirect.se
        );
    }
    let seed = cfg.seed;
    if let (Some(draws), Strategy::Backdoor) = (cfg.effect.do_draws, estimand.strategy) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.expect("validated"));
        let y0 = do_sample(&data, &estimand, 0.0, draws, &mut rng).at(Stage::Estimate)?;
        let y1 = do_sample(&data, &estimand, 1.0, draws, &mut rng).at(Stage::Estimate)?;
        let _ = writeln!(
            out,
            "do-sampler ({draws} draws): E[{o}|do({t}=0)] = {:?}, E[{o}|do({t}=1)] = {:?}",
            mean(&y0),
            mean(&y1)
        );
    }

    let mut row = SummaryRow {
        label,
        treatment: t.into(),
        outcome: o.into(),
        strategy: estimand.strategy.to_string(),
        ate: est.ate,
        se: est.se,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        p_value: est.p_value,
        n: est.n,
        random_common_cause_effect: None,
        random_common_cause_p: None,
        placebo_treatment_effect: None,
        placebo_treatment_p: None,
        data_subset_effect: None,
        data_subset_p: None,
        aggregate_confidence: None,
    };

    let methods = cfg.refuters()?;
    if !methods.is_empty() {
        let spec = cfg.refute.as_ref().expect("methods imply a section");
        let seed = seed.expect("validated");
        let _ = writeln!(out, "\n## Refute");
        let mut results = Vec::new();
        for m in methods {
            log::info!("refuter {m}: k = {}", spec.k);
            let r = match m {
                RefuteMethod::RandomCommonCause => refute_random_common_cause(&data, &estimand, &est, spec.k, seed),
                RefuteMethod::PlaceboTreatment => refute_placebo(&data, &estimand, &est, spec.k, seed),
                RefuteMethod::DataSubset => refute_data_subset(&data, &estimand, &est, spec.fraction, spec.k, seed),
            };
            let r = match r {
                Ok(r) => r,
                Err(e) => {
                    *summary = Some(row);
                    return Err(PipelineError::new(Stage::Refute, format!("{m}: {e}")));
                }
            };
            let _ = writeln!(out, "{r}");
            row.set_refutation(&r);
            results.push(r);
        }
        row.aggregate_confidence = aggregate_confidence(&results);
    }

    let _ = writeln!(out, "## Summary");
    out.push_str(&render_summary_table(std::slice::from_ref(&row)));
    *summary = Some(row);
    Ok(())
}

fn write_estimate(out: &mut String, e: &Estimand, est: &Estimate) {
    let method = match e.strategy {
        Strategy::Backdoor => "backdoor.linear_regression",
        Strategy::Iv => "iv.wald_estimator",
        Strategy::Frontdoor => "frontdoor.two_stage_regression",
        Strategy::Mediation => "mediation.linear_regression",
    };
    let _ = writeln!(out, "Estimator: {method}");
    let _ = writeln!(out, "Estimand: {}", e.expression);
    match e.strategy {
        Strategy::Backdoor | Strategy::Mediation => {
            let _ = writeln!(out, "Adjustment set: {}", fmt_set(&e.adjustment));
        }
        Strategy::Iv => {
            let _ = writeln!(out, "Instrument: {}", e.instruments[0]);
        }
        Strategy::Frontdoor => {
            let _ = writeln!(out, "Mediators: {}", fmt_set(&e.mediators));
        }
    }
    let _ = writeln!(out, "Mean value: {:?}", est.ate);
    let _ = writeln!(out, "Std. error: {:?}", est.se);
    let _ = writeln!(out, "95% CI: [{:?}, {:?}]", est.ci_low, est.ci_high);
    let _ = writeln!(out, "p value: {:?}", est.p_value);
    let _ = writeln!(out, "Rows: {}", est.n);
}
