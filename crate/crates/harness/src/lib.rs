//! Experiment runner for the teaching library: configuration, seeded and
//! paired sessions, named suites, report output, and the verification
//! battery behind `teach check`.

pub mod check;
pub mod config;
pub mod emit;
pub mod experiment;
pub mod suites;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, ExperimentReport};
pub use suites::{run_suite, Suite, SuiteOptions};
