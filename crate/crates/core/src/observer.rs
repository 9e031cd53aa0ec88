//! Initial-excitation based adaptive observer.
//!
//! The observer rewrites the plant output as a linear regression
//! `y_t = w_t psi` in the stacked unknown `psi = [p ; x0]`, where
//! `p = [a - f ; b]` holds the unknown first block-column of `A` (offset by the
//! user gain `F`) and `B`, and `x0` is the unknown initial state. Two filter
//! layers build richer regressions from it:
//!
//! * first layer: `M_{t+1} = F M_t + Z_t` gives `x_t = M_t p + F^t x0`;
//! * a chain of `h = qn+mn+n` low-pass copies of `(w_t, y_t)` stacked into
//!   `(W_t, Y_t)` with `Y_t = W_t psi`;
//! * second layer: `S_{t+1} = σ S_t + W_tᵀW_t`, `ρ_{t+1} = σ ρ_t + W_tᵀY_t`
//!   with `ρ_t = S_t psi`.
//!
//! Once `Σ W_iᵀW_i >= ζ I` is observed (strong initial excitation), the current
//! `(S_t, ρ_t)` are frozen and a third, permanently active term is switched
//! into the normalized gradient update.
//!
//! Step sequencing follows the observer loop: at time `t` the measured `y_t`
//! and the applied `u_t` are absorbed, the filters are advanced to index `t`
//! (`M_t` from `Z_{t-1}`, `S_t`/`ρ_t`/Gram from `W_{t-1}`), the excitation
//! test runs, and `psi_hat` is updated once with `(W_t, Y_t, S_t, ρ_t)`.

use log::{info, warn};

use crate::error::{Error, Result};
use crate::numerics::{
    kron, min_eig_symmetric, spectral_radius_estimate, unvect, DenseMatrix, MatrixPowerTracker,
    EIG_TOL,
};
use crate::plant::{assemble_canonical, first_block_column_entries, PlantDefinition};

/// Problem dimensions. `n = q*r`; the parameter vector has `qn + mn + n`
/// entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub q: usize,
    pub r: usize,
    pub m: usize,
}

impl Dims {
    pub fn n(&self) -> usize {
        self.q * self.r
    }

    /// Length of `p = [a - f ; b]`.
    pub fn p_len(&self) -> usize {
        (self.q + self.m) * self.n()
    }

    /// Length of `psi = [p ; x0]`; also the minimum SIE horizon.
    pub fn psi_len(&self) -> usize {
        self.p_len() + self.n()
    }

    pub fn of_plant(plant: &PlantDefinition) -> Self {
        Self {
            q: plant.q(),
            r: plant.r(),
            m: plant.m(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverConfig {
    /// First block-column of `F`, `r` blocks of `q x q`.
    pub f_blocks: Vec<DenseMatrix>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// Chain low-pass constant in (0, 1).
    pub alpha: f64,
    /// Second-layer filter constant in (-1, 1).
    pub sigma: f64,
    /// Strong initial excitation threshold.
    pub zeta: f64,
    pub a_hat0_blocks: Vec<DenseMatrix>,
    pub b_hat0: DenseMatrix,
    pub x0_hat0: Vec<f64>,
}

impl ObserverConfig {
    pub fn validate(&self, dims: Dims) -> Result<()> {
        let Dims { q, r, m } = dims;
        let n = dims.n();
        let check_blocks = |field: &str, blocks: &[DenseMatrix]| -> Result<()> {
            if blocks.len() != r || blocks.iter().any(|b| b.shape() != (q, q)) {
                return Err(Error::config(
                    field,
                    format!("expected {r} blocks of {q}x{q}"),
                ));
            }
            Ok(())
        };
        check_blocks("observer.f_blocks", &self.f_blocks)?;
        check_blocks("observer.a_hat0_blocks", &self.a_hat0_blocks)?;
        if self.b_hat0.shape() != (n, m) {
            return Err(Error::config(
                "observer.b_hat0",
                format!(
                    "expected {n}x{m}, found {}x{}",
                    self.b_hat0.rows(),
                    self.b_hat0.cols()
                ),
            ));
        }
        if self.x0_hat0.len() != n {
            return Err(Error::config(
                "observer.x0_hat0",
                format!("expected length {n}, found {}", self.x0_hat0.len()),
            ));
        }
        for (name, k) in [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa3", self.kappa3),
        ] {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::config(
                    format!("observer.{name}"),
                    "must be finite and nonnegative",
                ));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("observer.alpha", "must lie in (0, 1)"));
        }
        if !(self.sigma > -1.0 && self.sigma < 1.0) {
            return Err(Error::config("observer.sigma", "must lie in (-1, 1)"));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(Error::config("observer.zeta", "must be positive"));
        }
        Ok(())
    }

    pub fn f_matrix(&self, q: usize) -> Result<DenseMatrix> {
        assemble_canonical(&self.f_blocks, q)
    }

    /// Warns (without failing) when `F` does not look Schur stable.
    /// Returns the radius estimate.
    pub fn check_schur(&self, q: usize) -> Result<f64> {
        let f = self.f_matrix(q)?;
        let rho = spectral_radius_estimate(&f, 64)?;
        if rho >= 1.0 {
            warn!("observer gain F may not be Schur stable (‖F^64‖^(1/64) = {rho:.4})");
        }
        Ok(rho)
    }

    pub fn initial_psi(&self, dims: Dims) -> Result<ParameterVector> {
        ParameterVector::from_parts(
            dims,
            &self.a_hat0_blocks,
            &self.b_hat0,
            &self.x0_hat0,
            &self.f_blocks,
        )
    }
}

/// `psi = [a - f ; b ; x0]`; see [`first_block_column_entries`] for the
/// ordering inside `a` and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    dims: Dims,
    psi: Vec<f64>,
}

impl ParameterVector {
    pub fn from_parts(
        dims: Dims,
        a_blocks: &[DenseMatrix],
        b: &DenseMatrix,
        x0: &[f64],
        f_blocks: &[DenseMatrix],
    ) -> Result<Self> {
        let n = dims.n();
        let a = first_block_column_entries(a_blocks);
        let f = first_block_column_entries(f_blocks);
        if a.len() != dims.q * n || f.len() != dims.q * n {
            return Err(Error::dims(
                "ParameterVector a/f",
                dims.q * n,
                a.len().min(f.len()),
            ));
        }
        if b.shape() != (n, dims.m) {
            return Err(Error::dims(
                "ParameterVector b",
                format!("{n}x{}", dims.m),
                format!("{:?}", b.shape()),
            ));
        }
        if x0.len() != n {
            return Err(Error::dims("ParameterVector x0", n, x0.len()));
        }
        let mut psi: Vec<f64> = a.iter().zip(&f).map(|(a, f)| a - f).collect();
        psi.extend_from_slice(b.as_slice());
        psi.extend_from_slice(x0);
        Ok(Self { dims, psi })
    }

    /// The true parameter of a plant relative to observer gain `F`.
    pub fn of_plant(plant: &PlantDefinition, f_blocks: &[DenseMatrix]) -> Result<Self> {
        Self::from_parts(
            Dims::of_plant(plant),
            plant.a_blocks(),
            plant.b(),
            plant.x0(),
            f_blocks,
        )
    }

    pub fn from_vec(dims: Dims, psi: Vec<f64>) -> Result<Self> {
        if psi.len() != dims.psi_len() {
            return Err(Error::dims("ParameterVector", dims.psi_len(), psi.len()));
        }
        Ok(Self { dims, psi })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psi
    }

    pub fn p(&self) -> &[f64] {
        &self.psi[..self.dims.p_len()]
    }

    pub fn x0(&self) -> &[f64] {
        &self.psi[self.dims.p_len()..]
    }
}

/// Inverse of the parameter layout: `A` blocks are `p_a + f`, `B` is the
/// row-major reshape of `p_b`.
pub fn reconstruct_ab(
    p_hat: &[f64],
    f_blocks: &[DenseMatrix],
    dims: Dims,
) -> Result<(Vec<DenseMatrix>, DenseMatrix)> {
    let Dims { q, m, .. } = dims;
    let n = dims.n();
    if p_hat.len() != dims.p_len() {
        return Err(Error::dims("reconstruct_ab", dims.p_len(), p_hat.len()));
    }
    if f_blocks.len() != dims.r {
        return Err(Error::dims(
            "reconstruct_ab f_blocks",
            dims.r,
            f_blocks.len(),
        ));
    }
    let (pa, pb) = p_hat.split_at(q * n);
    let a_blocks = f_blocks
        .iter()
        .enumerate()
        .map(|(k, fb)| {
            let seg = &pa[k * q * q..(k + 1) * q * q];
            DenseMatrix::from_fn(q, q, |i, j| seg[i * q + j] + fb[(i, j)])
        })
        .collect();
    // pb is B row-major, i.e. vect(Bᵀ)
    let b = unvect(pb, m, n)?.transpose();
    Ok((a_blocks, b))
}

/// `Z_t = [I_n ⊗ y_tᵀ, I_n ⊗ u_tᵀ]`, an `n x (qn+mn)` matrix.
pub fn build_z(y: &[f64], u: &[f64], n: usize) -> Result<DenseMatrix> {
    if y.is_empty() || u.is_empty() || n == 0 {
        return Err(Error::dims(
            "build_Z",
            "nonempty y, u and n > 0",
            format!("q={}, m={}, n={n}", y.len(), u.len()),
        ));
    }
    let eye = DenseMatrix::identity(n);
    kron(&eye, &DenseMatrix::row_vector(y)).hstack(&kron(&eye, &DenseMatrix::row_vector(u)))
}

/// Result of one normalized-gradient update.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub psi_hat: Vec<f64>,
    /// `trace(ΓᵀΓ)`.
    pub gamma_trace: f64,
}

impl UpdateOutcome {
    /// `‖γ‖_F² = trace(ΓᵀΓ) / (1 + trace(ΓᵀΓ))`, always in `[0, 1)`.
    pub fn gamma_sq(&self) -> f64 {
        self.gamma_trace / (1.0 + self.gamma_trace)
    }
}

/// Frozen second-layer filter values captured when excitation is detected.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenRegression {
    pub s: DenseMatrix,
    pub rho: Vec<f64>,
}

/// Switched normalized gradient step
///
/// `psi+ = psi + [k1 Wᵀ(Y - W psi) + k2 Sᵀ(ρ - S psi) + k3 S*ᵀ(ρ* - S* psi)]
///         / (1 + k1‖W‖² + k2‖S‖² + k3‖S*‖²)`
///
/// where the starred term is present only when `frozen` is given.
#[allow(clippy::too_many_arguments)]
pub fn normalized_update(
    psi_hat: &[f64],
    w: &DenseMatrix,
    y: &[f64],
    s: &DenseMatrix,
    rho: &[f64],
    frozen: Option<&FrozenRegression>,
    kappa: [f64; 3],
) -> Result<UpdateOutcome> {
    let h = psi_hat.len();
    if w.cols() != h || s.shape() != (h, h) || rho.len() != h || y.len() != w.rows() {
        return Err(Error::dims(
            "normalized_update",
            format!("W ?x{h}, S {h}x{h}, rho {h}, Y = rows(W)"),
            format!(
                "W {:?}, S {:?}, rho {}, Y {}",
                w.shape(),
                s.shape(),
                rho.len(),
                y.len()
            ),
        ));
    }
    let [k1, k2, k3] = kappa;
    let mut step = vec![0.0; h];
    let mut gamma_trace = 0.0;

    let mut accumulate = |gain: f64, reg: &DenseMatrix, target: &[f64]| -> Result<()> {
        if gain == 0.0 {
            return Ok(());
        }
        let pred = reg.mul_vec(psi_hat)?;
        let resid: Vec<f64> = target.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let grad = reg.tr_mul_vec(&resid)?;
        for (s, g) in step.iter_mut().zip(grad) {
            *s += gain * g;
        }
        gamma_trace += gain * reg.frobenius_sq();
        Ok(())
    };
    accumulate(k1, w, y)?;
    accumulate(k2, s, rho)?;
    if let Some(fr) = frozen {
        if fr.s.shape() != (h, h) || fr.rho.len() != h {
            return Err(Error::dims("normalized_update frozen", h, fr.rho.len()));
        }
        accumulate(k3, &fr.s, &fr.rho)?;
    }
    let norm = 1.0 + gamma_trace;
    let psi_hat = psi_hat
        .iter()
        .zip(&step)
        .map(|(p, s)| p + s / norm)
        .collect();
    Ok(UpdateOutcome {
        psi_hat,
        gamma_trace,
    })
}

/// Conditioning of the second-layer regressor at the moment of switching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieSnapshot {
    pub step: usize,
    /// `λ_min(Σ_{i<t} W_iᵀW_i)` at detection.
    pub gram_min_eig: f64,
    /// `λ_min(S_t)`; may be negative when `σ < 0`.
    pub s_min_eig: f64,
    /// `λ_min(S_tᵀS_t)`.
    pub s_sq_min_eig: f64,
}

/// Per-step observables; truth-dependent fields are `None` without a truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: usize,
    pub psi_err_norm: Option<f64>,
    pub x_err_norm: Option<f64>,
    pub gamma_sq: f64,
    pub gram_min_eig: f64,
    pub eta: bool,
}

/// Estimates extracted from `psi_hat` at the current step.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub p_hat: Vec<f64>,
    pub x0_hat: Vec<f64>,
    pub x_hat: Vec<f64>,
}

/// Mutable estimation machinery for one observer run. Single writer.
#[derive(Debug, Clone)]
pub struct ObserverState {
    dims: Dims,
    config: ObserverConfig,
    /// `None` before the first measurement.
    t: Option<usize>,
    m_filter: DenseMatrix,
    f_power: MatrixPowerTracker,
    /// Stacked chain `W_t`, `q*h x h`.
    w_stack: DenseMatrix,
    /// Stacked chain `Y_t`, length `q*h`.
    y_stack: Vec<f64>,
    s: DenseMatrix,
    rho: Vec<f64>,
    gram: DenseMatrix,
    gram_min_eig: f64,
    psi_hat: Vec<f64>,
    eta: bool,
    frozen: Option<FrozenRegression>,
    sie: Option<SieSnapshot>,
    pending_z: Option<DenseMatrix>,
    gamma_sq: f64,
}

impl ObserverState {
    pub fn new(config: ObserverConfig, dims: Dims) -> Result<Self> {
        config.validate(dims)?;
        config.check_schur(dims.q)?;
        let f = config.f_matrix(dims.q)?;
        let psi_hat = config.initial_psi(dims)?.psi;
        let n = dims.n();
        let h = dims.psi_len();
        Ok(Self {
            dims,
            t: None,
            m_filter: DenseMatrix::zeros(n, dims.p_len()),
            f_power: MatrixPowerTracker::new(f)?,
            w_stack: DenseMatrix::zeros(dims.q * h, h),
            y_stack: vec![0.0; dims.q * h],
            s: DenseMatrix::zeros(h, h),
            rho: vec![0.0; h],
            gram: DenseMatrix::zeros(h, h),
            gram_min_eig: 0.0,
            psi_hat,
            eta: false,
            frozen: None,
            sie: None,
            pending_z: None,
            gamma_sq: 0.0,
            config,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn config(&self) -> &ObserverConfig {
        &self.config
    }

    /// Index of the last absorbed measurement.
    pub fn t(&self) -> Option<usize> {
        self.t
    }

    pub fn m_filter(&self) -> &DenseMatrix {
        &self.m_filter
    }

    pub fn f_power(&self) -> &DenseMatrix {
        self.f_power.current()
    }

    pub fn w_stack(&self) -> &DenseMatrix {
        &self.w_stack
    }

    pub fn y_stack(&self) -> &[f64] {
        &self.y_stack
    }

    pub fn s(&self) -> &DenseMatrix {
        &self.s
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `Σ_{i<t} W_iᵀW_i`.
    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    pub fn gram_min_eig(&self) -> f64 {
        self.gram_min_eig
    }

    pub fn psi_hat(&self) -> &[f64] {
        &self.psi_hat
    }

    pub fn eta(&self) -> bool {
        self.eta
    }

    pub fn frozen(&self) -> Option<&FrozenRegression> {
        self.frozen.as_ref()
    }

    pub fn sie(&self) -> Option<SieSnapshot> {
        self.sie
    }

    pub fn sie_step(&self) -> Option<usize> {
        self.sie.map(|s| s.step)
    }

    /// `‖γ_t‖_F²` from the most recent update (0 before the first update).
    pub fn gamma_sq(&self) -> f64 {
        self.gamma_sq
    }

    /// `w_t = [C M_t | C F^t]`.
    pub fn compute_w(&self) -> Result<DenseMatrix> {
        let t = self.t.unwrap_or(0);
        if self.f_power.step() != t {
            return Err(Error::StateMachine(
                "M and F^t are at different step indices",
            ));
        }
        let q = self.dims.q;
        self.m_filter
            .rows_range(0, q)
            .hstack(&self.f_power.current().rows_range(0, q))
    }

    /// `M <- F M + Z`.
    fn filter_m_step(&mut self, z: &DenseMatrix) -> Result<()> {
        if z.shape() != self.m_filter.shape() {
            return Err(Error::dims(
                "filter_M_step",
                format!("{:?}", self.m_filter.shape()),
                format!("{:?}", z.shape()),
            ));
        }
        let mut next = self.f_power.base().matmul(&self.m_filter)?;
        next.scale_add_assign(1.0, z)?;
        self.m_filter = next;
        Ok(())
    }

    /// Shifts the low-pass chain one step and writes `(w_new, y_new)` at
    /// index 0. Entries `i >= 1` are computed from the previous chain.
    fn regressor_chain_step(&mut self, w_new: &DenseMatrix, y_new: &[f64]) -> Result<()> {
        let q = self.dims.q;
        let h = self.dims.psi_len();
        if w_new.shape() != (q, h) || y_new.len() != q {
            return Err(Error::dims(
                "regressor_chain_step",
                format!("w {q}x{h}, y {q}"),
                format!("w {:?}, y {}", w_new.shape(), y_new.len()),
            ));
        }
        let alpha = self.config.alpha;
        let block = q * h;
        let data = self.w_stack.as_mut_slice();
        for i in (1..h).rev() {
            let (prev, cur) = data.split_at_mut(i * block);
            let prev = &prev[(i - 1) * block..];
            for (c, p) in cur[..block].iter_mut().zip(prev) {
                *c = alpha * *c + (1.0 - alpha) * p;
            }
        }
        data[..block].copy_from_slice(w_new.as_slice());
        for i in (1..h).rev() {
            for k in 0..q {
                self.y_stack[i * q + k] =
                    alpha * self.y_stack[i * q + k] + (1.0 - alpha) * self.y_stack[(i - 1) * q + k];
            }
        }
        self.y_stack[..q].copy_from_slice(y_new);
        Ok(())
    }

    /// `S <- σS + WᵀW`, `ρ <- σρ + WᵀY`, `Gram <- Gram + WᵀW` using the
    /// current chain.
    fn second_filter_step(&mut self) -> Result<()> {
        let wtw = self.w_stack.gram();
        let wty = self.w_stack.tr_mul_vec(&self.y_stack)?;
        let sigma = self.config.sigma;
        self.s.scale_add_assign(sigma, &wtw)?;
        for (r, v) in self.rho.iter_mut().zip(&wty) {
            *r = sigma * *r + v;
        }
        self.gram.scale_add_assign(1.0, &wtw)?;
        Ok(())
    }

    /// Strong-initial-excitation test on the accumulated Gram. Only armed
    /// while `eta == 0` and `t >= qn+mn+n`.
    pub fn sie_detect(&self) -> bool {
        let t = self.t.unwrap_or(0);
        !self.eta && t >= self.dims.psi_len() && self.gram_min_eig >= self.config.zeta
    }

    fn freeze(&mut self, t: usize) -> Result<()> {
        let s_eigs = crate::numerics::symmetric_eigenvalues(&self.s, EIG_TOL)?;
        let s_min_eig = s_eigs[0];
        let s_sq_min_eig = s_eigs.iter().map(|v| v * v).fold(f64::INFINITY, f64::min);
        let snap = SieSnapshot {
            step: t,
            gram_min_eig: self.gram_min_eig,
            s_min_eig,
            s_sq_min_eig,
        };
        info!(
            "strong initial excitation at t={t}: λmin(Gram)={:.3e}, λmin(S)={:.3e}, λmin(SᵀS)={:.3e}",
            snap.gram_min_eig, snap.s_min_eig, snap.s_sq_min_eig
        );
        if s_sq_min_eig <= EIG_TOL {
            warn!(
                "frozen S is numerically singular at t={t} (λmin(SᵀS)={s_sq_min_eig:.3e}); \
                 switched term will not contract every direction"
            );
        }
        self.frozen = Some(FrozenRegression {
            s: self.s.clone(),
            rho: self.rho.clone(),
        });
        self.sie = Some(snap);
        self.eta = true;
        Ok(())
    }

    fn update_psi(&mut self) -> Result<()> {
        if self.eta && self.frozen.is_none() {
            return Err(Error::StateMachine("eta = 1 without frozen regression"));
        }
        let frozen = if self.eta { self.frozen.as_ref() } else { None };
        let out = normalized_update(
            &self.psi_hat,
            &self.w_stack,
            &self.y_stack,
            &self.s,
            &self.rho,
            frozen,
            [self.config.kappa1, self.config.kappa2, self.config.kappa3],
        )?;
        self.gamma_sq = out.gamma_sq();
        self.psi_hat = out.psi_hat;
        Ok(())
    }

    /// Absorbs the measurement `y_t` and the input `u_t` applied at the same
    /// step, and runs one observer iteration.
    pub fn observe(&mut self, y: &[f64], u: &[f64]) -> Result<()> {
        let Dims { q, m, .. } = self.dims;
        if y.len() != q {
            return Err(Error::dims("observe y", q, y.len()));
        }
        if u.len() != m {
            return Err(Error::dims("observe u", m, u.len()));
        }
        let t = match self.t {
            None => {
                self.t = Some(0);
                let w0 = self.compute_w()?;
                self.regressor_chain_step(&w0, y)?;
                self.pending_z = Some(build_z(y, u, self.dims.n())?);
                return Ok(());
            }
            Some(prev) => prev + 1,
        };

        let z = self
            .pending_z
            .take()
            .ok_or(Error::StateMachine("missing Z from previous step"))?;
        self.filter_m_step(&z)?;
        self.f_power.advance();
        self.second_filter_step()?;
        self.t = Some(t);
        self.gram_min_eig = min_eig_symmetric(&self.gram, EIG_TOL)?;

        let w = self.compute_w()?;
        self.regressor_chain_step(&w, y)?;

        if self.sie_detect() {
            self.freeze(t)?;
        }
        self.update_psi()?;
        self.pending_z = Some(build_z(y, u, self.dims.n())?);

        if !self.psi_hat.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericFailure {
                step: t,
                quantity: "psi_hat",
            });
        }
        if !(self.m_filter.is_finite() && self.s.is_finite() && self.gram_min_eig.is_finite()) {
            return Err(Error::NumericFailure {
                step: t,
                quantity: "filter state",
            });
        }
        Ok(())
    }

    pub fn extract_estimates(&self) -> Estimates {
        let p_len = self.dims.p_len();
        let p_hat = self.psi_hat[..p_len].to_vec();
        let x0_hat = self.psi_hat[p_len..].to_vec();
        let mp = self.m_filter.mul_vec(&p_hat).expect("M is n x p_len");
        let fx = self
            .f_power
            .current()
            .mul_vec(&x0_hat)
            .expect("F^t is n x n");
        let x_hat = mp.iter().zip(&fx).map(|(a, b)| a + b).collect();
        Estimates {
            p_hat,
            x0_hat,
            x_hat,
        }
    }

    /// Reconstructed `(A_hat blocks, B_hat)`.
    pub fn reconstruct_ab(&self) -> Result<(Vec<DenseMatrix>, DenseMatrix)> {
        reconstruct_ab(
            &self.psi_hat[..self.dims.p_len()],
            &self.config.f_blocks,
            self.dims,
        )
    }

    pub fn diagnostics(&self, truth: Option<(&ParameterVector, &[f64])>) -> Diagnostics {
        let (psi_err_norm, x_err_norm) = match truth {
            Some((psi, x)) => {
                let pe = l2_dist(psi.as_slice(), &self.psi_hat);
                let xe = l2_dist(x, &self.extract_estimates().x_hat);
                (Some(pe), Some(xe))
            }
            None => (None, None),
        };
        Diagnostics {
            t: self.t.unwrap_or(0),
            psi_err_norm,
            x_err_norm,
            gamma_sq: self.gamma_sq,
            gram_min_eig: self.gram_min_eig,
            eta: self.eta,
        }
    }
}

pub(crate) fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
