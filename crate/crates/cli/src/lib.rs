//! JSON-configured experiment runner for the `singular-nls` laboratory.
//!
//! [`run_experiment`] checks admissibility, builds coercivity constants,
//! solves, samples energy profiles at each centre and issues localization
//! verdicts. Artifacts are returned in memory and written by
//! [`RunOutput::write`]; everything except `timings.json` is a pure
//! function of the config and any forcing file it references.

pub mod config;
pub mod error;
pub mod experiment;

pub use config::{AnalysisConfig, CEffSource, ExperimentConfig, ForcingSpec, OutputConfig, ProblemConfig};
pub use error::{CliError, EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_VIOLATION};
pub use experiment::{run_batch, run_experiment, RunOutput, RunReport};
