//! Batch experiment runner behind the `swaptest` binary.

pub mod config;
pub mod diff;
pub mod experiments;
pub mod output;
pub mod table;

pub use config::{Engine, Experiment, ExperimentConfig, Grid, Tolerances, ToyParamsHz};
pub use diff::{diff, half_range, ColumnDiff, DiffReport};
pub use experiments::run;
pub use output::{svg_plot, write_result};
pub use table::{format_value, Metadata, SweepResult, Table};
