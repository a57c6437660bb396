//! Experiment runner for particle-number sweeps and parameter estimation.
//!
//! A JSON config selects a canonical experiment or lists custom series; a run
//! writes CSV tables, a text summary and an append-only JSON record that
//! `verify_record` can check against the files and by recomputation.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod runner;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentId, ResolvedConfig, Series, SeriesKind};
pub use error::{LabError, Result};
pub use record::RunRecord;
pub use runner::{run_experiment, RunOptions, RunOutcome};
pub use verify::{verify_record, VerifyOptions, VerifyReport};
