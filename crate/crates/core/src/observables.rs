//! Expectation values of qubit-diagonal operators `diag(p(n), q(n))`.
//!
//! The closed form sums over the invariant blocks, so it needs only the
//! initial amplitudes and the scalars `F_n`, `G_n`; the direct form reads a
//! propagated state. Sums stop at the cutoff: a term is kept only when both
//! Fock levels it touches lie inside the truncated space.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock;
use crate::model::{DiagFn, ModelParams};
use crate::propagator::efg;
use crate::states::{InitialCondition, QubitFieldState};

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalObservable {
    /// Weight on the excited branch.
    pub p: DiagFn,
    /// Weight on the ground branch.
    pub q: DiagFn,
}

impl DiagonalObservable {
    pub fn sigma_z() -> Self {
        Self {
            p: DiagFn::Poly(vec![1.0]),
            q: DiagFn::Poly(vec![-1.0]),
        }
    }

    pub fn number_power(j: u32) -> Self {
        Self {
            p: DiagFn::power(j),
            q: DiagFn::power(j),
        }
    }

    /// `C = n - k sigma_z / 2`, or its square.
    pub fn conserved_c(k: usize, power: u32) -> Self {
        let h = k as f64 / 2.0;
        let pow = |shift: f64| match power {
            1 => DiagFn::Poly(vec![shift, 1.0]),
            _ => DiagFn::Poly(vec![shift * shift, 2.0 * shift, 1.0]),
        };
        Self { p: pow(-h), q: pow(h) }
    }

    /// `C0 = n + k sigma_z / 2`, or its square.
    pub fn conserved_c0(k: usize, power: u32) -> Self {
        let c = Self::conserved_c(k, power);
        Self { p: c.q, q: c.p }
    }
}

/// Per-time block scalars, shared by every observable evaluated at that time.
#[derive(Clone, Debug)]
pub struct BlockScalars {
    k: usize,
    /// `F_m` for `m = -k..=N`, stored at `m + k`.
    f: Vec<C64>,
    /// `H_n = -i sqrt((n+k)!/n!) G_n` (real), `n = 0..=N`.
    h: Vec<f64>,
}

impl BlockScalars {
    pub fn new(params: &ModelParams, cutoff: usize, t: f64) -> Result<Self> {
        params.require_kerr_family()?;
        let k = params.k;
        let ki = k as i64;
        let f = (-ki..=cutoff as i64).map(|m| efg(m, t, params).f).collect();
        let h = (0..=cutoff as i64)
            .map(|n| {
                let g = efg(n, t, params).g;
                (C64::new(0.0, -fock::sqrt_shifted_product(n, k)) * g).re
            })
            .collect();
        Ok(Self { k, f, h })
    }

    fn f_at(&self, m: i64) -> C64 {
        self.f[(m + self.k as i64) as usize]
    }

    /// `<O>` for the counter-rotating evolution of `ic`.
    pub fn expect(&self, ic: &InitialCondition, obs: &DiagonalObservable) -> f64 {
        let k = self.k;
        let cutoff = ic.cutoff();
        let (c, d) = (ic.c.amps(), ic.d.amps());
        let ae2 = ic.alpha_e.norm_sqr();
        let ag2 = ic.alpha_g.norm_sqr();
        let cross = ic.alpha_e * ic.alpha_g.conj();
        let mut q_sum = 0.0;
        let mut r_sum = 0.0;
        let mut t_sum = 0.0;
        for n in 0..=cutoff {
            let ni = n as i64;
            let pn = obs.p.eval(ni);
            let qn = obs.q.eval(ni);
            let fn_ = self.f_at(ni);
            q_sum += pn * c[n].norm_sqr() * self.f_at(ni - k as i64).norm_sqr();
            r_sum += qn * d[n].norm_sqr() * fn_.norm_sqr();
            if n + k <= cutoff {
                let h = self.h[n];
                let pnk = obs.p.eval(ni + k as i64);
                q_sum += qn * c[n + k].norm_sqr() * h * h;
                r_sum += pnk * d[n].norm_sqr() * h * h;
                t_sum += h * (pnk - qn) * (cross * c[n + k] * d[n].conj() * fn_.conj()).im;
            }
        }
        (ae2 * q_sum + ag2 * r_sum + 2.0 * t_sum) / (ae2 + ag2)
    }
}

pub fn expect_diagonal_closed(
    ic: &InitialCondition,
    params: &ModelParams,
    t: f64,
    obs: &DiagonalObservable,
) -> Result<f64> {
    Ok(BlockScalars::new(params, ic.cutoff(), t)?.expect(ic, obs))
}

/// `<psi| O |psi>` on an explicit state.
pub fn expect_diagonal_direct(state: &QubitFieldState, obs: &DiagonalObservable) -> f64 {
    let e: f64 = state
        .excited()
        .iter()
        .enumerate()
        .map(|(n, a)| obs.p.eval(n as i64) * a.norm_sqr())
        .sum();
    let g: f64 = state
        .ground()
        .iter()
        .enumerate()
        .map(|(n, a)| obs.q.eval(n as i64) * a.norm_sqr())
        .sum();
    e + g
}

pub fn atomic_inversion(ic: &InitialCondition, params: &ModelParams, t: f64) -> Result<f64> {
    expect_diagonal_closed(ic, params, t, &DiagonalObservable::sigma_z())
}

pub fn expect_n_power(ic: &InitialCondition, params: &ModelParams, t: f64, j: u32) -> Result<f64> {
    expect_diagonal_closed(ic, params, t, &DiagonalObservable::number_power(j))
}

/// Below this mean photon number Q is undefined.
pub const MANDEL_EPS: f64 = 1e-9;

/// `(<n^2> - <n>^2)/<n> - 1`, or `None` for a (near-)vacuum field.
pub fn mandel_q_from_moments(n1: f64, n2: f64) -> Option<f64> {
    if n1 < MANDEL_EPS {
        None
    } else {
        Some((n2 - n1 * n1) / n1 - 1.0)
    }
}

pub fn mandel_q(ic: &InitialCondition, params: &ModelParams, t: f64) -> Result<Option<f64>> {
    let b = BlockScalars::new(params, ic.cutoff(), t)?;
    let n1 = b.expect(ic, &DiagonalObservable::number_power(1));
    let n2 = b.expect(ic, &DiagonalObservable::number_power(2));
    Ok(mandel_q_from_moments(n1, n2))
}

/// Earliest interior local minimum `(t*, value)` of a sampled series.
///
/// A sample (or a run of equal samples) counts when it is strictly below
/// both neighbours; for a run, its first sample is reported. Undefined
/// samples (NaN) never form a minimum.
pub fn first_local_min(times: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len().min(times.len());
    if n < 3 {
        return None;
    }
    let mut i = 1;
    while i + 1 < n {
        let v = values[i];
        if v.is_nan() || !(v < values[i - 1]) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && values[j + 1] == v {
            j += 1;
        }
        if j + 1 < n && v < values[j + 1] {
            return Some((times[i], v));
        }
        i = j + 1;
    }
    None
}
