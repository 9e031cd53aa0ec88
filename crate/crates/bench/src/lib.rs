//! Shared fixtures for the criterion benchmarks.

use std::path::Path;

use ieobs_core::{parse_config, ExperimentConfig};

const REFERENCE: &str = include_str!("../../../configs/reference.toml");

pub fn reference_config(steps: usize) -> ExperimentConfig {
    let mut cfg = parse_config(REFERENCE, Path::new("reference.toml")).expect("bundled config");
    cfg.steps = steps;
    cfg
}
