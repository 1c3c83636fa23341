//! Harness for the exclusion-game strategies in `exlab-core`: TOML
//! experiment configs, exhaustive and sampled runs, parameter sweeps,
//! invariant suites and CSV/JSON result files.

pub mod config;
pub mod emit;
mod error;
pub mod formulas;
pub mod harness;
pub mod record;
pub mod verify;

pub use config::ExperimentConfig;
pub use emit::Format;
pub use error::{HarnessError, Result};
pub use record::{BoundEntry, ResultRecord, Value};
