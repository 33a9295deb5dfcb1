//! Experiment harness: configuration, Monte Carlo runners, real-data
//! analysis and output files.

pub mod analyze;
pub mod config;
pub mod experiments;
pub mod output;

pub use analyze::{analyze, analyze_data, load_metrics, MetricsTable};
pub use config::{Experiment, ExperimentConfig, GraphModel};
pub use experiments::run;
pub use output::{Manifest, Table};
