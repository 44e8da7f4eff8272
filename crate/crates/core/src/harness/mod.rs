//! Experiment orchestration: configuration, best-constant estimation,
//! end-to-end studies and CSV/SVG reporting.

pub mod config;
pub mod estimate;
pub mod experiments;
pub mod report;

pub use config::{Exponent, ExperimentConfig};
pub use estimate::{estimate_best_constant, BilinearForm, Estimate, EstimateOptions, LinearSparseForm, WeightedNorm};
pub use experiments::{run_experiment, Check, ExperimentKind};
pub use report::{emit_report, BoundReport, OutputPaths, Record};
