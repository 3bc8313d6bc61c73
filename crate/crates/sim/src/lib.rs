//! Monte Carlo harness and command-line front end for Doppler-shift key
//! generation between spacecraft.
//!
//! Experiments live in [`experiments`]; each writes one CSV table and one
//! JSON sidecar through [`output`]. Trials draw from per-trial generators
//! derived from the master seed ([`seed`]), so results are bit-identical at
//! any thread count.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod seed;

pub use config::ScenarioConfig;
pub use error::{SimError, SimResult};
pub use experiments::{run_experiment, Experiment, ExperimentResult};
