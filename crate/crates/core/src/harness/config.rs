//! TOML experiment configuration.
//!
//! ```toml
//! [plant]
//! a_blocks = [[[0.4]], [[0.5]], [[-0.1]]]   # first block-column of A, r blocks q x q
//! b = [[0.1, -0.2], [0.2, 0.1], [0.3, 0.0]]
//! x0 = [1.0, 1.0, 1.0]
//!
//! [observer]
//! f_blocks = [[[0.0022]], [[0.011]], [[0.0001]]]
//! kappa1 = 1.05
//! kappa2 = 1.05
//! kappa3 = 0.01
//! alpha = 0.26
//! sigma = -0.98
//! zeta = 1e-5                 # optional, defaults to 1e-6
//! a_hat0_blocks = [[[5.0]], [[5.0]], [[5.0]]]
//! b_hat0 = [[5.0, 5.0], [5.0, 5.0], [5.0, 5.0]]
//! x0_hat0 = [0.9, 0.9, 0.9]
//!
//! [input]
//! gain = 0.2
//! envelope = { kind = "exponential", scale = 1.0, rate = -0.001 }
//! preset = "reference_multisine"   # or explicit [[input.channels]] tables
//! exc_amplitude = 1.0
//!
//! [run]
//! steps = 5000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::observer::{Dims, ObserverConfig};
use crate::plant::{Envelope, InputProgram, PlantDefinition, SineTerm};

pub const DEFAULT_ZETA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub plant: RawPlant,
    pub observer: RawObserver,
    pub input: RawInput,
    pub run: RawRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlant {
    pub a_blocks: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObserver {
    pub f_blocks: Vec<Vec<Vec<f64>>>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub alpha: f64,
    pub sigma: f64,
    #[serde(default)]
    pub zeta: Option<f64>,
    pub a_hat0_blocks: Vec<Vec<Vec<f64>>>,
    pub b_hat0: Vec<Vec<f64>>,
    pub x0_hat0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub amplitudes: Vec<f64>,
    pub omegas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInput {
    #[serde(default)]
    pub gain: Option<f64>,
    pub envelope: Envelope,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub exc_amplitude: Option<f64>,
    #[serde(default)]
    pub channels: Vec<RawChannel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    pub steps: usize,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub plot: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub plant: PlantDefinition,
    pub observer: ObserverConfig,
    pub input: InputProgram,
    pub steps: usize,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    /// Reserved; the pipeline is deterministic.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn dims(&self) -> Dims {
        Dims::of_plant(&self.plant)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("run.steps", "must be at least 1"));
        }
        let dims = self.dims();
        self.observer.validate(dims)?;
        self.observer.check_schur(dims.q)?;
        if self.input.m() != dims.m {
            return Err(Error::config(
                "input.channels",
                format!(
                    "plant has {} inputs, program has {} channels",
                    dims.m,
                    self.input.m()
                ),
            ));
        }
        Ok(())
    }
}

fn matrix(field: &str, rows: &[Vec<f64>]) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(rows).map_err(|e| Error::config(field, e.to_string()))
}

fn blocks(field: &str, raw: &[Vec<Vec<f64>>]) -> Result<Vec<DenseMatrix>> {
    if raw.is_empty() {
        return Err(Error::config(field, "at least one block required"));
    }
    raw.iter().map(|b| matrix(field, b)).collect()
}

impl RawConfig {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let a_blocks = blocks("plant.a_blocks", &self.plant.a_blocks)?;
        let b = matrix("plant.b", &self.plant.b)?;
        let plant = PlantDefinition::new(a_blocks, b, self.plant.x0)?;

        let o = self.observer;
        let observer = ObserverConfig {
            f_blocks: blocks("observer.f_blocks", &o.f_blocks)?,
            kappa1: o.kappa1,
            kappa2: o.kappa2,
            kappa3: o.kappa3,
            alpha: o.alpha,
            sigma: o.sigma,
            zeta: o.zeta.unwrap_or(DEFAULT_ZETA),
            a_hat0_blocks: blocks("observer.a_hat0_blocks", &o.a_hat0_blocks)?,
            b_hat0: matrix("observer.b_hat0", &o.b_hat0)?,
            x0_hat0: o.x0_hat0,
        };

        let i = self.input;
        let mut input = match i.preset.as_deref() {
            Some("reference_multisine") => {
                if !i.channels.is_empty() {
                    return Err(Error::config(
                        "input.channels",
                        "not allowed together with a preset",
                    ));
                }
                InputProgram::reference_multisine(i.envelope, i.exc_amplitude.unwrap_or(1.0))
            }
            Some(other) => {
                return Err(Error::config(
                    "input.preset",
                    format!("unknown preset `{other}`"),
                ));
            }
            None => {
                let channels = i
                    .channels
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        if c.amplitudes.len() != c.omegas.len() {
                            return Err(Error::config(
                                format!("input.channels[{k}]"),
                                "amplitudes and omegas differ in length",
                            ));
                        }
                        Ok(c.amplitudes
                            .iter()
                            .zip(&c.omegas)
                            .map(|(&amplitude, &omega)| SineTerm { amplitude, omega })
                            .collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                InputProgram {
                    channels,
                    gain: 1.0,
                    envelope: i.envelope,
                }
            }
        };
        if let Some(g) = i.gain {
            input.gain = g;
        }

        let cfg = ExperimentConfig {
            name: self.run.name.unwrap_or_else(|| "experiment".to_owned()),
            plant,
            observer,
            input,
            steps: self.run.steps,
            csv: self.run.csv,
            plot: self.run.plot,
            seed: self.run.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        source: Box::new(e),
    })?;
    raw.into_config()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path)
}
