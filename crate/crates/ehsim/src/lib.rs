//! Experiment harness for the electrohydraulic haptic device models in
//! [`ehsim_core`]: JSON configuration, CSV traces, named experiment runners
//! and TCP teleoperation endpoints.

pub mod config;
mod error;
pub mod experiments;
pub mod net;
pub mod trace;

pub use config::{load_config, load_selected, ExperimentConfig};
pub use error::{ConfigError, Error, Result};
pub use experiments::{run_experiment, run_named, Experiment, Outcome, RunOptions};
