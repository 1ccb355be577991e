//! Causal discovery, identification, estimation and refutation, with
//! generators and loaders for four physical case studies.

pub mod dag;
pub mod data;
pub mod discovery;
pub mod estimate;
pub mod identify;
pub mod ols;
pub mod phenomena;
pub mod pipeline;
pub mod refute;
pub mod scm;
pub mod stats;

pub use dag::{Dag, GraphError};
pub use data::{DataError, DataTable};
