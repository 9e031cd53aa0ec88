//! Ground-truth plant in observable canonical form, multi-sine excitation
//! programs and finite-trace excitation diagnostics (PE / IE / strong IE).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{min_eig_symmetric, DenseMatrix, EIG_TOL};

/// Assembles the block-companion matrix whose first block-column is `blocks`
/// (each `q x q`) with identity blocks on the first block super-diagonal.
///
/// Used for both the plant matrix `A` and the observer gain `F`.
pub fn assemble_canonical(blocks: &[DenseMatrix], q: usize) -> Result<DenseMatrix> {
    if blocks.is_empty() {
        return Err(Error::dims("assemble_canonical", "at least one block", 0));
    }
    if let Some(b) = blocks.iter().find(|b| b.shape() != (q, q)) {
        return Err(Error::dims(
            "assemble_canonical",
            format!("{q}x{q} blocks"),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    let n = q * blocks.len();
    let mut a = DenseMatrix::zeros(n, n);
    for (k, block) in blocks.iter().enumerate() {
        for i in 0..q {
            for j in 0..q {
                a[(k * q + i, j)] = block[(i, j)];
            }
            if k + 1 < blocks.len() {
                a[(k * q + i, (k + 1) * q + i)] = 1.0;
            }
        }
    }
    Ok(a)
}

/// Canonical-form LTI plant `x_{t+1} = A x_t + B u_t`, `y_t = C x_t` with
/// `C = [I_q 0 ... 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantDefinition {
    q: usize,
    m: usize,
    a_blocks: Vec<DenseMatrix>,
    b: DenseMatrix,
    x0: Vec<f64>,
    a: DenseMatrix,
}

impl PlantDefinition {
    pub fn new(a_blocks: Vec<DenseMatrix>, b: DenseMatrix, x0: Vec<f64>) -> Result<Self> {
        let q = a_blocks.first().map_or(0, DenseMatrix::rows);
        if q == 0 {
            return Err(Error::config(
                "plant.a_blocks",
                "at least one nonempty block required",
            ));
        }
        let a = assemble_canonical(&a_blocks, q)
            .map_err(|e| Error::config("plant.a_blocks", e.to_string()))?;
        let n = a.rows();
        if b.rows() != n {
            return Err(Error::config(
                "plant.b",
                format!("expected {n} rows, found {}", b.rows()),
            ));
        }
        if x0.len() != n {
            return Err(Error::config(
                "plant.x0",
                format!("expected length {n}, found {}", x0.len()),
            ));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("plant.x0", "entries must be finite"));
        }
        Ok(Self {
            q,
            m: b.cols(),
            a_blocks,
            b,
            x0,
            a,
        })
    }

    /// Output dimension.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of `q x q` blocks in the first block-column.
    pub fn r(&self) -> usize {
        self.a_blocks.len()
    }

    /// Input dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    /// State dimension `q * r`.
    pub fn n(&self) -> usize {
        self.q * self.a_blocks.len()
    }

    pub fn a_blocks(&self) -> &[DenseMatrix] {
        &self.a_blocks
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn c(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.q, self.n(), |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Advances the plant one step. `y` is the output at the current state,
    /// before advancing.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.n() {
            return Err(Error::dims("plant_step state", self.n(), x.len()));
        }
        if u.len() != self.m {
            return Err(Error::dims("plant_step input", self.m, u.len()));
        }
        let ax = self.a.mul_vec(x)?;
        let bu = self.b.mul_vec(u)?;
        let x_next = ax.iter().zip(&bu).map(|(a, b)| a + b).collect();
        let y = x[..self.q].to_vec();
        Ok((x_next, y))
    }

    /// Stacked `[C; CA; ...; CA^{r-1}]`.
    pub fn observability_matrix(&self) -> DenseMatrix {
        let mut blocks = Vec::with_capacity(self.r());
        let mut cak = self.c();
        for _ in 0..self.r() {
            let next = cak.matmul(&self.a).expect("C is q x n");
            blocks.push(cak);
            cak = next;
        }
        DenseMatrix::vstack(&blocks).expect("equal column counts")
    }
}

/// The `(qn+mn+n)`-dimensional parameter layout shared by the plant truth and
/// the observer estimate: `psi = [a - f ; b ; x0]`.
///
/// `a` stacks the entries of the first block-column of `A` row by row (row `i`
/// of that `n x q` block occupies `a[i*q..(i+1)*q]`), and `b` stacks `B` row
/// by row. This ordering is the one for which `Z_t p = (A - F) x_t + B u_t`
/// with `Z_t = [I_n ⊗ y_tᵀ, I_n ⊗ u_tᵀ]`.
pub fn first_block_column_entries(blocks: &[DenseMatrix]) -> Vec<f64> {
    blocks
        .iter()
        .flat_map(|b| b.as_slice().iter().copied())
        .collect()
}

/// Time envelope multiplying an [`InputProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    /// `value` for all t.
    Constant { value: f64 },
    /// `scale * exp(rate * t)`.
    Exponential { scale: f64, rate: f64 },
    /// 1 for `t < until`, 0 afterwards.
    Gate { until: u64 },
}

impl Envelope {
    pub fn at(&self, t: u64) -> f64 {
        match *self {
            Envelope::Constant { value } => value,
            Envelope::Exponential { scale, rate } => scale * (rate * t as f64).exp(),
            Envelope::Gate { until } => {
                if t < until {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub amplitude: f64,
    /// Angular frequency in rad/sample, applied as `sin(omega * t)`.
    pub omega: f64,
}

/// `u_t = gain * envelope(t) * [sum_k a_k sin(w_k t)]_channel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputProgram {
    pub channels: Vec<Vec<SineTerm>>,
    pub gain: f64,
    pub envelope: Envelope,
}

impl InputProgram {
    /// The two-channel multi-sine family used in the reference experiment:
    /// each channel has one base sine plus eleven "excitation" sines whose
    /// amplitude is `exc_amplitude`.
    pub fn reference_multisine(envelope: Envelope, exc_amplitude: f64) -> Self {
        const CH1: (f64, [f64; 11]) = (
            2.0,
            [
                3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 23.0, 29.0, 31.0, 37.0, 41.0,
            ],
        );
        const CH2: (f64, [f64; 11]) = (
            59.0,
            [
                157.0, 163.0, 167.0, 173.0, 179.0, 61.0, 67.0, 71.0, 73.0, 79.0, 83.0,
            ],
        );
        let channel = |(base, extra): (f64, [f64; 11])| {
            std::iter::once(SineTerm {
                amplitude: 1.0,
                omega: base,
            })
            .chain(extra.iter().map(|&omega| SineTerm {
                amplitude: exc_amplitude,
                omega,
            }))
            .collect()
        };
        Self {
            channels: vec![channel(CH1), channel(CH2)],
            gain: 0.2,
            envelope,
        }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            channels: vec![Vec::new(); m],
            gain: 0.0,
            envelope: Envelope::Constant { value: 0.0 },
        }
    }

    pub fn m(&self) -> usize {
        self.channels.len()
    }

    pub fn eval(&self, t: u64) -> Vec<f64> {
        let env = self.gain * self.envelope.at(t);
        let tf = t as f64;
        self.channels
            .iter()
            .map(|terms| {
                if env == 0.0 {
                    return 0.0;
                }
                env * terms
                    .iter()
                    .map(|s| s.amplitude * (s.omega * tf).sin())
                    .sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExcitationMode {
    /// Persistent excitation: every window of length `horizon` in the trace.
    Pe,
    /// Initial excitation of a vector signal.
    Ie,
    /// Strong initial excitation of a matrix signal.
    Sie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationReport {
    pub mode: ExcitationMode,
    pub horizon: usize,
    /// Smallest eigenvalue of the accumulated Gram (worst window for PE).
    pub zeta_achieved: f64,
    pub satisfied: bool,
}

/// Checks an excitation condition on a finite trace of `h x k` signals
/// `phi_i` using `sum phi_i phi_iᵀ >= zeta I_h`.
///
/// For PE only the windows that fit inside the trace are examined, so a
/// positive result confirms the condition on observed data only.
pub fn excitation_check(
    signals: &[DenseMatrix],
    mode: ExcitationMode,
    horizon: usize,
    zeta: f64,
) -> Result<ExcitationReport> {
    let h = signals.first().map_or(0, DenseMatrix::rows);
    if h == 0 {
        return Err(Error::InsufficientSamples {
            needed: horizon.max(1),
            available: 0,
        });
    }
    if let Some(bad) = signals.iter().find(|s| s.rows() != h) {
        return Err(Error::dims("excitation_check", h, bad.rows()));
    }
    if horizon < h {
        return Err(Error::HorizonTooShort { horizon, dim: h });
    }
    if signals.len() < horizon {
        return Err(Error::InsufficientSamples {
            needed: horizon,
            available: signals.len(),
        });
    }
    let outer: Vec<DenseMatrix> = signals.iter().map(|s| s.transpose().gram()).collect();
    let window_min = |start: usize| -> Result<f64> {
        let mut acc = DenseMatrix::zeros(h, h);
        for g in &outer[start..start + horizon] {
            acc.scale_add_assign(1.0, g)?;
        }
        min_eig_symmetric(&acc, EIG_TOL)
    };
    let zeta_achieved = match mode {
        ExcitationMode::Ie | ExcitationMode::Sie => window_min(0)?,
        ExcitationMode::Pe => {
            let mut worst = f64::INFINITY;
            for start in 0..=(signals.len() - horizon) {
                worst = worst.min(window_min(start)?);
            }
            worst
        }
    };
    Ok(ExcitationReport {
        mode,
        horizon,
        zeta_achieved,
        satisfied: zeta_achieved >= zeta,
    })
}
