use crate::error::Result;
use crate::observer::{l2_dist, ObserverState, ParameterVector, SieSnapshot};

use super::config::ExperimentConfig;

/// Slack allowed when checking that `‖ψ̃‖` never increases.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub psi_err: f64,
    pub x_err: f64,
    pub gamma_sq: f64,
    pub gram_min_eig: f64,
    pub eta: bool,
    /// Full-dump mode only.
    pub p_hat: Option<Vec<f64>>,
    pub x_hat: Option<Vec<f64>>,
}

/// Log-linear least-squares fit `ln ‖ψ̃_t‖ ≈ a + t ln(rate)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Per-step contraction factor of `‖ψ̃‖`.
    pub rate: f64,
    pub r_squared: f64,
    pub start: usize,
    pub end: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub sie: Option<SieSnapshot>,
    pub initial_psi_err: f64,
    pub initial_x_err: f64,
    pub final_psi_err: f64,
    pub final_x_err: f64,
    pub decay: Option<DecayFit>,
    pub monotone_ok: bool,
}

impl RunSummary {
    pub fn sie_step(&self) -> Option<usize> {
        self.sie.map(|s| s.step)
    }

    pub fn fitted_decay_rate(&self) -> Option<f64> {
        self.decay.map(|d| d.rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub name: String,
    pub trace: Vec<TraceRecord>,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record `p_hat` and `x_hat` in every trace record.
    pub full_dump: bool,
}

/// Simulates plant and observer in lockstep for `config.steps` steps.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    run_experiment_with(config, RunOptions::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentRun> {
    config.validate()?;
    let dims = config.dims();
    let truth = ParameterVector::of_plant(&config.plant, &config.observer.f_blocks)?;
    let mut observer = ObserverState::new(config.observer.clone(), dims)?;
    let mut x = config.plant.x0().to_vec();
    let mut trace = Vec::with_capacity(config.steps);

    for t in 0..config.steps {
        let u = config.input.eval(t as u64);
        let (x_next, y) = config.plant.step(&x, &u)?;
        observer.observe(&y, &u)?;
        let est = observer.extract_estimates();
        trace.push(TraceRecord {
            t,
            psi_err: l2_dist(truth.as_slice(), observer.psi_hat()),
            x_err: l2_dist(&x, &est.x_hat),
            gamma_sq: observer.gamma_sq(),
            gram_min_eig: observer.gram_min_eig(),
            eta: observer.eta(),
            p_hat: opts.full_dump.then(|| est.p_hat.clone()),
            x_hat: opts.full_dump.then(|| est.x_hat.clone()),
            y,
            u,
        });
        x = x_next;
    }

    let summary = summarize(&trace, observer.sie());
    Ok(ExperimentRun {
        name: config.name.clone(),
        trace,
        summary,
    })
}

pub fn summarize(trace: &[TraceRecord], sie: Option<SieSnapshot>) -> RunSummary {
    let first = trace.first();
    let last = trace.last();
    let monotone_ok = trace
        .windows(2)
        .all(|w| w[1].psi_err <= w[0].psi_err + MONOTONE_SLACK);
    let initial_psi_err = first.map_or(0.0, |r| r.psi_err);
    let decay = sie.and_then(|s| post_switch_fit(trace, s.step, initial_psi_err));
    RunSummary {
        sie,
        initial_psi_err,
        initial_x_err: first.map_or(0.0, |r| r.x_err),
        final_psi_err: last.map_or(0.0, |r| r.psi_err),
        final_x_err: last.map_or(0.0, |r| r.x_err),
        decay,
        monotone_ok,
    }
}

/// Fits the post-switch decay over the band where
/// `‖ψ̃‖ ∈ [1e-10, 1e-1]·‖ψ̃_0‖`; falls back to every post-switch point above
/// `1e-12` if the band holds fewer than three points.
fn post_switch_fit(trace: &[TraceRecord], sie_step: usize, psi0: f64) -> Option<DecayFit> {
    let post = || trace.iter().filter(move |r| r.t >= sie_step);
    let band: Vec<&TraceRecord> = post()
        .filter(|r| r.psi_err >= 1e-10 * psi0 && r.psi_err <= 1e-1 * psi0)
        .collect();
    let pts = if band.len() >= 3 {
        band
    } else {
        post().filter(|r| r.psi_err > 1e-12).collect()
    };
    let xy: Vec<(f64, f64)> = pts.iter().map(|r| (r.t as f64, r.psi_err.ln())).collect();
    let (slope, r_squared) = linear_fit(&xy)?;
    Some(DecayFit {
        rate: slope.exp(),
        r_squared,
        start: pts.first()?.t,
        end: pts.last()?.t,
        points: pts.len(),
    })
}

/// Ordinary least squares `y = a + b x`; returns `(b, R²)`.
pub fn linear_fit(xy: &[(f64, f64)]) -> Option<(f64, f64)> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((slope, r2))
}

/// Per-step `λ_min(Σ_{i<t} W_iᵀW_i)` with a suggested threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaCalibration {
    /// `(t, λ_min)` for every step.
    pub series: Vec<(usize, f64)>,
    /// Earliest step at which detection is armed (`qn+mn+n`).
    pub min_step: usize,
    /// First armed step whose `λ_min` is positive and at least ten times the
    /// largest value seen before it.
    pub crossing_step: Option<usize>,
    /// Threshold between the values bracketing `crossing_step`: a tenth of
    /// the crossing value when the previous value is at round-off level,
    /// otherwise their geometric mean.
    pub suggested_zeta: Option<f64>,
}

/// Runs the experiment and reports the Gram spectrum floor over time.
pub fn calibrate_zeta(config: &ExperimentConfig) -> Result<ZetaCalibration> {
    let run = run_experiment(config)?;
    let series: Vec<(usize, f64)> = run.trace.iter().map(|r| (r.t, r.gram_min_eig)).collect();
    let min_step = config.dims().psi_len();
    let mut crossing_step = None;
    let mut suggested_zeta = None;
    let mut prev_max: f64 = 0.0;
    for &(t, v) in &series {
        if t >= min_step && v > 0.0 && v >= 10.0 * prev_max {
            crossing_step = Some(t);
            suggested_zeta = Some(if prev_max <= 1e-6 * v {
                v / 10.0
            } else {
                (v * prev_max).sqrt()
            });
            break;
        }
        prev_max = prev_max.max(v);
    }
    Ok(ZetaCalibration {
        series,
        min_step,
        crossing_step,
        suggested_zeta,
    })
}
