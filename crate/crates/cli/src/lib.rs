//! Dataset loading, configuration and evaluation runs behind the `gted`
//! command.

pub mod config;
pub mod dataset;
pub mod pipeline;

pub use config::{AlphaSetting, Config, ConfigError};
pub use dataset::{load_dataset, Dataset, DatasetError, EvalRecord};
pub use pipeline::{
    baselines, evaluate, sweep_command, Baseline, RunError, RunReport, SweepMetric,
};
