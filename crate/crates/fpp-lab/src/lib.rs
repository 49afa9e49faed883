//! Batch experiment orchestration for the fpp toolkit: configuration,
//! replicate scheduling, persistence and plot-data emission. The `fpp`
//! binary is a thin wrapper over this library.

pub mod config;
pub mod csvio;
pub mod manifest;
pub mod plotdata;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use manifest::RunManifest;
pub use plotdata::emit_plot_data;
pub use runner::{run, RunError};
