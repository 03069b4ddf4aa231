//! Experiment harness over `collapse-core`: configs, runs, CSV/JSON-lines artifacts,
//! SVG plots and the acceptance runner.

pub mod config;
pub mod plot;
pub mod run;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, Kind};
pub use run::{run, RunRecord};
pub use verify::{verify_all, Fault, Options, Report};
