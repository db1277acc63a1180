//! Experiment harness, file formats and parallel drivers around
//! [`fpchain_core`].

pub mod config;
pub mod error;
pub mod harness;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::HarnessError;
pub use harness::{par_cheeger_exact, run_experiment};
pub use report::{emit_report, ResultRow};
