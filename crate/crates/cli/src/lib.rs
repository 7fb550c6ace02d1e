//! Experiment runner: figure presets and free-form sweeps written as CSV
//! curves plus a JSON manifest.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{ErrorModeKind, ExperimentConfig, Method, Metric, ParamOverrides};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, CurvePoint, CurveSeries, ExperimentOutput, Manifest};
pub use output::{emit_csv, parse_csv, read_csv, write_csv, write_manifest};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FDSSK_OUT_DIR";
