//! Initial-excitation based adaptive observer for discrete-time LTI plants in
//! observable canonical form.
//!
//! The observer estimates the unknown plant matrices, the unknown initial
//! state and the current state from input/output data. Exponential
//! convergence needs only a finite burst of excitation: once the accumulated
//! regressor Gram matrix passes a threshold the observer freezes a
//! well-conditioned regression and keeps using it after the input dies out.
//!
//! Modules:
//! * [`numerics`]: dense-matrix primitives.
//! * [`plant`]: ground-truth plant, multi-sine inputs, excitation checks.
//! * [`observer`]: filters, regressor chain, switching and update law.
//! * [`harness`]: configs, experiment runner, CSV and SVG output.

pub mod error;
pub mod harness;
pub mod numerics;
pub mod observer;
pub mod plant;

pub use error::{Error, Result};
pub use harness::{
    compare_runs, load_config, parse_config, run_experiment, ExperimentConfig, RunSummary,
    TraceRecord,
};
pub use numerics::{DenseMatrix, MatrixPowerTracker};
pub use observer::{Dims, ObserverConfig, ObserverState, ParameterVector};
pub use plant::{
    Envelope, ExcitationMode, ExcitationReport, InputProgram, PlantDefinition, SineTerm,
};
