//! Independent reference computations: dense eigendecomposition for time
//! evolution and exact rational arithmetic for the Laguerre series.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::JointMatrix;
use crate::states::QubitFieldState;

/// `H = V diag(lambda) V^dagger`, computed once and reused for every time.
#[derive(Clone, Debug)]
pub struct EigenOracle {
    cutoff: usize,
    vectors: DMatrix<C64>,
    values: DVector<f64>,
    residual: f64,
}

/// Relative Hermiticity tolerance for accepted Hamiltonians.
const HERMITIAN_TOL: f64 = 1e-12;

impl EigenOracle {
    pub fn new(h: &JointMatrix) -> Result<Self> {
        let scale = h.max_abs().max(1.0);
        let herm = h.hermiticity_residual();
        if herm > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(herm));
        }
        let m = h.matrix();
        let eig = m.clone().symmetric_eigen();
        let vectors = eig.eigenvectors;
        let values = eig.eigenvalues;
        let lambda = DMatrix::from_diagonal(&values.map(|v| C64::new(v, 0.0)));
        let residual = (m * &vectors - &vectors * lambda)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Ok(Self {
            cutoff: h.cutoff(),
            vectors,
            values,
            residual,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// `max |H V - V Lambda|`, absolute.
    pub fn decomposition_residual(&self) -> f64 {
        self.residual
    }

    pub fn evolve(&self, state: &QubitFieldState, t: f64) -> Result<QubitFieldState> {
        if state.cutoff() != self.cutoff {
            return Err(Error::Dimension(format!(
                "state cutoff {} differs from Hamiltonian cutoff {}",
                state.cutoff(),
                self.cutoff
            )));
        }
        let psi = DVector::from_vec(state.to_joint());
        let mut coeffs = self.vectors.ad_mul(&psi);
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= C64::from_polar(1.0, -lambda * t);
        }
        let out = &self.vectors * coeffs;
        QubitFieldState::from_joint(out.as_slice())
    }
}

struct CacheEntry {
    key: u64,
    matrix: JointMatrix,
    oracle: Arc<EigenOracle>,
}

const CACHE_CAPACITY: usize = 16;

fn cache() -> &'static Mutex<Vec<CacheEntry>> {
    static CACHE: OnceLock<Mutex<Vec<CacheEntry>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

fn matrix_key(h: &JointMatrix) -> u64 {
    let mut hasher = DefaultHasher::new();
    h.cutoff().hash(&mut hasher);
    for z in h.matrix().iter() {
        z.re.to_bits().hash(&mut hasher);
        z.im.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

/// Decomposition of `h`, shared through a small process-wide cache.
pub fn oracle_for(h: &JointMatrix) -> Result<Arc<EigenOracle>> {
    let key = matrix_key(h);
    {
        let entries = cache().lock().expect("oracle cache poisoned");
        if let Some(e) = entries.iter().find(|e| e.key == key && e.matrix == *h) {
            return Ok(Arc::clone(&e.oracle));
        }
    }
    let oracle = Arc::new(EigenOracle::new(h)?);
    let mut entries = cache().lock().expect("oracle cache poisoned");
    if entries.len() >= CACHE_CAPACITY {
        entries.remove(0);
    }
    entries.push(CacheEntry {
        key,
        matrix: h.clone(),
        oracle: Arc::clone(&oracle),
    });
    Ok(oracle)
}

/// `exp(-iHt) state`.
pub fn evolve_oracle(h: &JointMatrix, state: &QubitFieldState, t: f64) -> Result<QubitFieldState> {
    oracle_for(h)?.evolve(state, t)
}

/// Rotate `b` by the global phase that matches `a` at `b`'s largest amplitude.
///
/// Returns the rotated state and `max |a - b e^{i theta}|`.
pub fn phase_align(a: &QubitFieldState, b: &QubitFieldState) -> (QubitFieldState, f64) {
    let ja = a.to_joint();
    let jb = b.to_joint();
    let idx = jb
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0;
    let phase = if jb[idx].norm() == 0.0 || ja[idx].norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        let ratio = ja[idx] / jb[idx];
        ratio / ratio.norm()
    };
    let aligned = b.scaled(phase);
    let residual = a.max_abs_diff(&aligned);
    (aligned, residual)
}

/// `L_s^a(x) = sum_j (-1)^j C(s+a, s-j) x^j / j!` summed exactly in rationals
/// (the binomial is the generalized one, so `a >= -s` of either sign works).
/// `x` is converted exactly from its binary value; only the final division rounds.
pub fn laguerre_series_exact(s: usize, a: i64, x: f64) -> Result<f64> {
    if a < -(s as i64) {
        return Err(Error::LaguerreOrder { s, a });
    }
    let x = BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidParameter(format!("x = {x} is not finite")))?;
    let top = BigInt::from(s as i64 + a);
    let binom = |r: usize| {
        // C(top, r) = top (top-1) ... (top-r+1) / r!
        let mut v = BigRational::one();
        for i in 0..r {
            v *= BigRational::new(&top - BigInt::from(i), BigInt::from(i + 1));
        }
        v
    };
    let mut sum = BigRational::zero();
    let mut power = BigRational::one(); // x^j / j!
    for j in 0..=s {
        if j > 0 {
            power = power * &x / BigInt::from(j);
        }
        let term = binom(s - j) * &power;
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum.to_f64().unwrap_or(f64::NAN))
}
