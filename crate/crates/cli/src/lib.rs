//! Configuration, execution and plot-data emission for `sublil`
//! experiments.

#![recursion_limit = "256"]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod plot;
pub mod runner;

pub use config::{load, ExperimentConfig};
pub use error::CliError;
pub use plot::emit_plot_data;
pub use runner::{run, run_config, RunOptions, RunOutcome};
