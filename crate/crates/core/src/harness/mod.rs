//! Experiment specs, drivers and scaling fits.

pub mod experiments;
pub mod fit;
pub mod spec;

pub use experiments::{run_curve, run_experiment, Curve, ExperimentOutput};
pub use fit::{fit_log_log, fit_scaling, Quantity, ScalingFit, ScalingInstance};
pub use spec::{ExperimentName, ExperimentSpec};
