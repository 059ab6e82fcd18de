//! Experiment orchestration: configuration, Monte-Carlo runs, metrics,
//! regret and file output.

pub mod config;
pub mod output;
pub mod regret;
pub mod run;

pub use config::{Algorithm, ComparatorConfig, ExperimentConfig, KernelConfig, Overrides, SystemConfig};
pub use output::{emit_results, EmittedFiles};
pub use regret::{empirical_regret, KernelRidge, RegretCurve};
pub use run::{average_mse, run_experiment, ExperimentOutcome, MetricTrace, Setup};
