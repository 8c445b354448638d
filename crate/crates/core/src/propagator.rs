//! Closed-form evolution for the Kerr/multiphoton family.
//!
//! Both pictures share the invariant 2x2 blocks spanned by `|e,n>` and
//! `|g,n+k>` (rotating) or `|g,n>` and `|e,n+k>` (counter-rotating). Each
//! block evolves with the scalars `E_n`, `F_n`, `G_n`, so a step costs O(N).
//! The result equals `exp(-iHt)` up to the global phase `exp(i chi k^2 t / 2)`.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{self, FockVector, WithLeakage};
use crate::model::{JointMatrix, ModelParams};
use crate::states::QubitFieldState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `Delta/2 sigma_z + chi n^2 + g[a^k sigma_- + (a^dagger)^k sigma_+]`
    CounterRotating,
    /// The shifted-Kerr rotating Hamiltonian.
    Rotating,
}

/// `Delta/2 + chi (m k + k^2/2)`, the half-splitting of block `m`.
pub fn block_detuning(m: i64, params: &ModelParams) -> f64 {
    let k = params.k as f64;
    params.delta / 2.0 + params.chi * (m as f64 * k + k * k / 2.0)
}

/// `Omega_m`; for `m < 0` the coupling term is absent and the signed detuning is returned.
pub fn rabi_frequency(m: i64, params: &ModelParams) -> f64 {
    let a = block_detuning(m, params);
    if m < 0 {
        return a;
    }
    let r = fock::shifted_product(m, params.k);
    (params.g * params.g * r + a * a).sqrt()
}

/// Below this `|Omega t|` the ratio `sin(Omega t)/Omega` switches to its Taylor series.
pub const SINC_SWITCH: f64 = 1e-4;

/// `sin(Omega t) / Omega`, continuous through `Omega = 0`.
pub fn sin_over(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x.abs() < SINC_SWITCH {
        let x2 = x * x;
        t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0))))
    } else {
        x.sin() / omega
    }
}

/// `(E_n, F_n, G_n)` at one block index and time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfgTriple {
    pub e: C64,
    pub f: C64,
    pub g: C64,
}

pub fn efg(n: i64, t: f64, params: &ModelParams) -> EfgTriple {
    let omega = rabi_frequency(n, params);
    let s = sin_over(omega, t);
    let a = block_detuning(n, params);
    EfgTriple {
        e: C64::from_polar(1.0, -params.chi * t * (n * (n + params.k as i64)) as f64),
        f: C64::new((omega * t).cos(), a * s),
        g: C64::new(0.0, -params.g * s),
    }
}

/// Deliberate defects, used to check that the verification suite catches them.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    FlipGSign,
}

/// The four blocks of the evolution operator at a fixed time.
///
/// The branch that is lowered by `k` inside each invariant block (`g` in the
/// counter-rotating picture, `e` in the rotating one) is called `lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPropagator {
    frame: Frame,
    k: usize,
    /// Diagonal weights on the lower branch, index `n`.
    diag_lower: Vec<C64>,
    /// Diagonal weights on the upper branch, index `m`.
    diag_upper: Vec<C64>,
    /// `E_n G_n sqrt((n+k)!/n!)`, coupling lower `n` with upper `n + k`.
    shift: Vec<C64>,
}

impl BlockPropagator {
    pub fn new(frame: Frame, params: &ModelParams, cutoff: usize, t: f64) -> Result<Self> {
        Self::with_fault(frame, params, cutoff, t, Fault::None)
    }

    #[doc(hidden)]
    pub fn with_fault(frame: Frame, params: &ModelParams, cutoff: usize, t: f64, fault: Fault) -> Result<Self> {
        params.require_kerr_family()?;
        let k = params.k;
        let ki = k as i64;
        let g_sign = if fault == Fault::FlipGSign { -1.0 } else { 1.0 };
        let mut diag_lower = Vec::with_capacity(cutoff + 1);
        let mut diag_upper = Vec::with_capacity(cutoff + 1);
        let mut shift = Vec::with_capacity(cutoff + 1);
        // Blocks n = -k..-1 hold only their upper level.
        for n in -ki..0 {
            let q = efg(n, t, params);
            diag_upper.push(upper_weight(frame, q));
        }
        for n in 0..=cutoff as i64 {
            let q = efg(n, t, params);
            diag_lower.push(lower_weight(frame, q));
            if n + ki <= cutoff as i64 {
                diag_upper.push(upper_weight(frame, q));
            }
            shift.push(q.e * q.g * g_sign * fock::sqrt_shifted_product(n, k));
        }
        Ok(Self {
            frame,
            k,
            diag_lower,
            diag_upper,
            shift,
        })
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn cutoff(&self) -> usize {
        self.diag_lower.len() - 1
    }

    /// Diagonal weight on the excited branch at level `n` (`U11`).
    pub fn u11(&self, n: usize) -> C64 {
        match self.frame {
            Frame::CounterRotating => self.diag_upper[n],
            Frame::Rotating => self.diag_lower[n],
        }
    }

    /// Diagonal weight on the ground branch at level `n` (`U22`).
    pub fn u22(&self, n: usize) -> C64 {
        match self.frame {
            Frame::CounterRotating => self.diag_lower[n],
            Frame::Rotating => self.diag_upper[n],
        }
    }

    /// Weight multiplying the ladder element between levels `n` and `n + k`.
    pub fn shift_weight(&self, n: usize) -> C64 {
        self.shift[n]
    }

    /// Evolve a state. Both output branches are computed from the unmodified input.
    pub fn apply(&self, state: &QubitFieldState) -> Result<WithLeakage<QubitFieldState>> {
        let cutoff = self.cutoff();
        if state.cutoff() != cutoff {
            return Err(crate::Error::Dimension(format!(
                "state cutoff {} differs from propagator cutoff {cutoff}",
                state.cutoff()
            )));
        }
        let (lower, upper) = match self.frame {
            Frame::CounterRotating => (state.ground(), state.excited()),
            Frame::Rotating => (state.excited(), state.ground()),
        };
        let k = self.k;
        let mut lower_out = FockVector::zeros(cutoff);
        let mut upper_out = FockVector::zeros(cutoff);
        let mut leakage = 0.0;
        for n in 0..=cutoff {
            let mut acc = self.diag_lower[n] * lower[n];
            if n + k <= cutoff {
                acc += self.shift[n] * upper[n + k];
            } else {
                leakage += (self.shift[n] * lower[n]).norm_sqr();
            }
            lower_out[n] = acc;
        }
        for m in 0..=cutoff {
            let mut acc = self.diag_upper[m] * upper[m];
            if m >= k {
                acc += self.shift[m - k] * lower[m - k];
            }
            upper_out[m] = acc;
        }
        let state = match self.frame {
            Frame::CounterRotating => QubitFieldState::new(upper_out, lower_out)?,
            Frame::Rotating => QubitFieldState::new(lower_out, upper_out)?,
        };
        Ok(WithLeakage { value: state, leakage })
    }

    /// The truncated operator as a dense matrix.
    pub fn to_dense(&self) -> JointMatrix {
        let cutoff = self.cutoff();
        let dim = 2 * (cutoff + 1);
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let (lo, up) = match self.frame {
            Frame::CounterRotating => (cutoff + 1, 0),
            Frame::Rotating => (0, cutoff + 1),
        };
        for n in 0..=cutoff {
            m[(lo + n, lo + n)] = self.diag_lower[n];
            m[(up + n, up + n)] = self.diag_upper[n];
            if n + self.k <= cutoff {
                m[(lo + n, up + n + self.k)] = self.shift[n];
                m[(up + n + self.k, lo + n)] = self.shift[n];
            }
        }
        JointMatrix::from_matrix(cutoff, m).expect("dimension matches cutoff")
    }
}

fn lower_weight(frame: Frame, q: EfgTriple) -> C64 {
    match frame {
        Frame::CounterRotating => q.e * q.f,
        Frame::Rotating => q.e * q.f.conj(),
    }
}

fn upper_weight(frame: Frame, q: EfgTriple) -> C64 {
    match frame {
        Frame::CounterRotating => q.e * q.f.conj(),
        Frame::Rotating => q.e * q.f,
    }
}

pub fn propagate_counter(state: &QubitFieldState, t: f64, params: &ModelParams) -> Result<WithLeakage<QubitFieldState>> {
    BlockPropagator::new(Frame::CounterRotating, params, state.cutoff(), t)?.apply(state)
}

pub fn propagate_rotating(state: &QubitFieldState, t: f64, params: &ModelParams) -> Result<WithLeakage<QubitFieldState>> {
    BlockPropagator::new(Frame::Rotating, params, state.cutoff(), t)?.apply(state)
}
