//! Structure learning: conditional-independence tests, PC and LiNGAM.

mod ci;
mod lingam;
mod pc;

use thiserror::Error;

pub use ci::ci_test_partial_correlation;
pub use lingam::{causal_order, run_lingam, PRUNE_THRESHOLD};
pub use pc::{run_pc, CpdagResult};

use crate::dag::GraphError;
use crate::data::DataError;
use crate::ols::OlsError;

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{rows} rows, need at least {needed} for this test")]
    TooFewRows { rows: usize, needed: usize },
    #[error("singular conditioning set {{{}}}", .columns.join(", "))]
    SingularConditioning { columns: Vec<String> },
    #[error("column `{0}` is constant")]
    ConstantColumn(String),
    #[error("no causal order: degenerate residuals for `{0}`")]
    NoCausalOrder(String),
    #[error(transparent)]
    Regression(#[from] OlsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Default significance level for the independence tests.
pub const DEFAULT_ALPHA: f64 = 0.05;
