use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{PipelineError, Stage};
use crate::identify::Strategy;
use crate::refute::{RefuteMethod, DEFAULT_REPLICATES};

/// Overrides the directory that `fixtures:` paths resolve against.
pub const FIXTURES_ENV: &str = "CAUSEWAY_FIXTURES";

/// Bundled fixture directory, or `$CAUSEWAY_FIXTURES` when set.
pub fn fixtures_dir() -> PathBuf {
    std::env::var_os(FIXTURES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

/// Resolves `fixtures:<rel>` against [`fixtures_dir`] and other relative
/// paths against `base`.
pub fn resolve_path(raw: &str, base: &Path) -> PathBuf {
    if let Some(rel) = raw.strip_prefix("fixtures:") {
        fixtures_dir().join(rel)
    } else {
        let p = Path::new(raw);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Label carried into summary tables.
    #[serde(default)]
    pub name: Option<String>,
    /// Required by every stochastic stage.
    #[serde(default)]
    pub seed: Option<u64>,
    pub dataset: DatasetSpec,
    pub model: ModelSpec,
    pub effect: EffectSpec,
    #[serde(default)]
    pub refute: Option<RefuteSpec>,
    /// Directory relative paths are resolved against; set by
    /// [`PipelineConfig::from_path`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    Csv {
        path: String,
    },
    Ldr {
        path: String,
    },
    Tides {
        earth_sun: String,
        earth_moon: String,
        tide: String,
    },
    Ohm {
        rows: usize,
        #[serde(default)]
        v: Option<(f64, f64)>,
        #[serde(default)]
        l: Option<(f64, f64)>,
        #[serde(default)]
        a: Option<(f64, f64)>,
        #[serde(default)]
        dt: Option<(f64, f64)>,
    },
    Quantum {
        states: usize,
        shots: usize,
    },
}

impl DatasetSpec {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, DatasetSpec::Ohm { .. } | DatasetSpec::Quantum { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscoverAlgo {
    Pc,
    Lingam,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Path to a DOT file.
    #[serde(default)]
    pub graph: Option<String>,
    /// Inline DOT text.
    #[serde(default)]
    pub dot: Option<String>,
    #[serde(default)]
    pub discover: Option<DiscoverAlgo>,
    /// Significance level for PC.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Columns given to discovery; all columns when absent.
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    #[serde(default)]
    pub unobserved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectSpec {
    pub treatment: String,
    pub outcome: String,
    /// Strategy to estimate; the first identified one when absent.
    #[serde(default)]
    pub estimator: Option<String>,
    /// Also report the mediation split when a mediated path exists.
    #[serde(default)]
    pub mediation: bool,
    /// Draws per arm for the do-sampler; skipped when absent.
    #[serde(default)]
    pub do_draws: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefuteSpec {
    pub methods: Vec<String>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
}

fn default_k() -> usize {
    DEFAULT_REPLICATES
}

fn default_fraction() -> f64 {
    0.8
}

fn config_error(message: impl Into<String>) -> PipelineError {
    PipelineError::new(Stage::Config, message)
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
    }

    pub fn resolve(&self, raw: &str) -> PathBuf {
        resolve_path(raw, &self.base_dir)
    }

    pub fn strategy(&self) -> Result<Option<Strategy>, PipelineError> {
        self.effect
            .estimator
            .as_deref()
            .map(|s| s.parse().map_err(config_error))
            .transpose()
    }

    pub fn refuters(&self) -> Result<Vec<RefuteMethod>, PipelineError> {
        match &self.refute {
            None => Ok(Vec::new()),
            Some(r) => r.methods.iter().map(|m| m.parse().map_err(config_error)).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.effect.treatment == self.effect.outcome {
            return Err(config_error(format!(
                "treatment and outcome are both `{}`",
                self.effect.treatment
            )));
        }
        let sources = [
            self.model.graph.is_some(),
            self.model.dot.is_some(),
            self.model.discover.is_some(),
        ];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(config_error("[model] needs exactly one of `graph`, `dot`, `discover`"));
        }
        self.strategy()?;
        let refuters = self.refuters()?;
        if let Some(r) = &self.refute {
            if r.k == 0 {
                return Err(config_error("[refute] k must be at least 1"));
            }
            if !(r.fraction > 0.0 && r.fraction <= 1.0) {
                return Err(config_error(format!(
                    "[refute] fraction {} is outside (0, 1]",
                    r.fraction
                )));
            }
        }
        let stochastic = self.dataset.is_stochastic() || !refuters.is_empty() || self.effect.do_draws.is_some();
        if stochastic && self.seed.is_none() {
            return Err(config_error(
                "a `seed` is required for generated data, refuters and the do-sampler",
            ));
        }
        let mut files: Vec<&str> = Vec::new();
        match &self.dataset {
            DatasetSpec::Csv { path } | DatasetSpec::Ldr { path } => files.push(path),
            DatasetSpec::Tides {
                earth_sun,
                earth_moon,
                tide,
            } => files.extend([earth_sun.as_str(), earth_moon, tide]),
            _ => {}
        }
        if let Some(g) = &self.model.graph {
            files.push(g);
        }
        for f in files {
            let p = self.resolve(f);
            if !p.is_file() {
                return Err(config_error(format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }
}
