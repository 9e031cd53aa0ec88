//! Experiment harness: configuration, lockstep plant/observer simulation,
//! traces, CSV and SVG artifacts, run comparison and threshold calibration.

mod compare;
mod config;
mod csv;
mod plot;
mod run;

pub use compare::{compare_runs, Comparison, ComparisonRow};
pub use config::{
    load_config, parse_config, ExperimentConfig, RawChannel, RawConfig, RawInput, RawObserver,
    RawPlant, RawRun, DEFAULT_ZETA,
};
pub use csv::{parse_csv, trace_to_csv, write_csv};
pub use plot::{emit_plot, render_svg, PlotOptions, Quantity, Series};
pub use run::{
    calibrate_zeta, linear_fit, run_experiment, run_experiment_with, summarize, DecayFit,
    ExperimentRun, RunOptions, RunSummary, TraceRecord, ZetaCalibration, MONOTONE_SLACK,
};
