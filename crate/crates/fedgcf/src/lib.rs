//! File formats, run configuration and reporting around `fedgcf-core`.
//!
//! Datasets are read and written in the TUDataset text layout, runs are
//! described by a TOML file, and every run leaves `metrics.csv`,
//! `summary.json`, `bandit.csv` and `topology.csv` behind.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod report;
pub mod stats;
pub mod tudataset;

pub use config::RunConfig;
pub use error::{Error, Result};
