use std::fmt::Write as _;
use std::thread;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::run::{run_experiment, ExperimentRun};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub sie_step: Option<usize>,
    pub final_psi_err: f64,
    pub final_x_err: f64,
    /// `final / initial` for `‖ψ̃‖`.
    pub psi_err_ratio: f64,
    pub decay_rate: Option<f64>,
    pub monotone_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub runs: Vec<ExperimentRun>,
}

impl Comparison {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24} {:>8} {:>14} {:>14} {:>12} {:>12} {:>9}",
            "run", "t_SIE", "final_psi_err", "final_x_err", "psi_ratio", "decay_rate", "monotone"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<24} {:>8} {:>14.6e} {:>14.6e} {:>12.4e} {:>12} {:>9}",
                r.name,
                r.sie_step.map_or("-".to_owned(), |s| s.to_string()),
                r.final_psi_err,
                r.final_x_err,
                r.psi_err_ratio,
                r.decay_rate.map_or("-".to_owned(), |d| format!("{d:.6}")),
                r.monotone_ok
            );
        }
        out
    }
}

/// Runs every config (concurrently) against the same plant and tabulates the
/// outcomes in input order.
pub fn compare_runs(configs: &[ExperimentConfig]) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            available: configs.len(),
        });
    }
    let plant = &configs[0].plant;
    if let Some(other) = configs.iter().find(|c| &c.plant != plant) {
        return Err(Error::PlantMismatch(format!(
            "`{}` differs from `{}`",
            other.name, configs[0].name
        )));
    }
    let runs = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| s.spawn(move || run_experiment(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let rows = runs
        .iter()
        .map(|r| ComparisonRow {
            name: r.name.clone(),
            sie_step: r.summary.sie_step(),
            final_psi_err: r.summary.final_psi_err,
            final_x_err: r.summary.final_x_err,
            psi_err_ratio: if r.summary.initial_psi_err > 0.0 {
                r.summary.final_psi_err / r.summary.initial_psi_err
            } else {
                0.0
            },
            decay_rate: r.summary.fitted_decay_rate(),
            monotone_ok: r.summary.monotone_ok,
        })
        .collect();
    Ok(Comparison { rows, runs })
}
