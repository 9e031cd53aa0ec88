#![allow(dead_code)]

use std::path::Path;

use ieobs_core::{
    parse_config, DenseMatrix, Envelope, ExperimentConfig, InputProgram, ObserverConfig,
    ObserverState, ParameterVector, PlantDefinition,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const REFERENCE: &str = include_str!("../../../../configs/reference.toml");
pub const SUSTAINED: &str = include_str!("../../../../configs/ablation_sustained.toml");
pub const GATED: &str = include_str!("../../../../configs/ablation_gated.toml");

pub fn load(text: &str) -> ExperimentConfig {
    parse_config(text, Path::new("inline.toml")).expect("bundled config parses")
}

pub fn reference() -> ExperimentConfig {
    load(REFERENCE)
}

pub fn reference_with_steps(steps: usize) -> ExperimentConfig {
    let mut cfg = reference();
    cfg.steps = steps;
    cfg
}

pub fn scalar_blocks(v: &[f64]) -> Vec<DenseMatrix> {
    v.iter()
        .map(|&x| DenseMatrix::new(1, 1, vec![x]).unwrap())
        .collect()
}

/// Scalar companion blocks with `Σ|f_i| <= bound < 1`, hence Schur.
pub fn random_schur_blocks(rng: &mut StdRng, r: usize, bound: f64) -> Vec<DenseMatrix> {
    let raw: Vec<f64> = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
    let l1: f64 = raw.iter().map(|v| v.abs()).sum::<f64>().max(1e-12);
    let scale = rng.random_range(0.0..bound) / l1;
    scalar_blocks(&raw.iter().map(|v| v * scale).collect::<Vec<_>>())
}

/// Reference config with randomized observer tuning.
pub fn randomized(seed: u64, steps: usize) -> ExperimentConfig {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cfg = reference_with_steps(steps);
    let o = &mut cfg.observer;
    o.f_blocks = random_schur_blocks(&mut rng, 3, 0.95);
    o.kappa1 = rng.random_range(0.1..=2.0);
    o.kappa2 = rng.random_range(0.1..=2.0);
    o.kappa3 = rng.random_range(0.1..=2.0);
    o.alpha = rng.random_range(0.05..0.95);
    o.sigma = rng.random_range(-0.99..0.99);
    cfg.validate().expect("randomized config is valid");
    cfg
}

/// Observer initialized at the true parameter of `plant`.
pub fn exact_observer_config(plant: &PlantDefinition, base: &ObserverConfig) -> ObserverConfig {
    ObserverConfig {
        a_hat0_blocks: plant.a_blocks().to_vec(),
        b_hat0: plant.b().clone(),
        x0_hat0: plant.x0().to_vec(),
        ..base.clone()
    }
}

pub struct Step {
    pub t: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Drives plant and observer in lockstep, calling `visit` after each step.
pub fn drive(
    plant: &PlantDefinition,
    input: &InputProgram,
    observer: &mut ObserverState,
    steps: usize,
    mut visit: impl FnMut(&Step, &ObserverState),
) {
    let mut x = plant.x0().to_vec();
    for t in 0..steps {
        let u = input.eval(t as u64);
        let (x_next, y) = plant.step(&x, &u).unwrap();
        observer.observe(&y, &u).unwrap();
        visit(&Step { t, x: x.clone(), y }, observer);
        x = x_next;
    }
}

pub fn truth(cfg: &ExperimentConfig) -> ParameterVector {
    ParameterVector::of_plant(&cfg.plant, &cfg.observer.f_blocks).unwrap()
}

pub fn constant_envelope() -> Envelope {
    Envelope::Constant { value: 1.0 }
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
