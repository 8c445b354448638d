//! Fidelity `F = sqrt(<phi|rho|phi>)` between the initial field state and the
//! evolved reduced density (square-root convention, not its square).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, FockVector};
use crate::model::ModelParams;
use crate::phase_space::FieldDensity;
use crate::propagator::efg;
use crate::states::InitialCondition;

/// Allowed overshoot of `<phi|rho|phi>` above one before it is treated as an error.
const OVERSHOOT: f64 = 1e-8;

fn finish(raw: f64) -> Result<f64> {
    if !raw.is_finite() || raw > 1.0 + OVERSHOOT {
        return Err(Error::InvalidDensity(format!("overlap {raw} exceeds one")));
    }
    Ok(raw.max(0.0).sqrt().min(1.0))
}

/// `sqrt(<phi|rho|phi>)` for a pure reference state.
pub fn fidelity_pure_vs_state(phi: &FockVector, rho: &FieldDensity) -> Result<f64> {
    if (phi.norm_sqr() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "reference state must be unit-norm (|phi|^2 = {:.12})",
            phi.norm_sqr()
        )));
    }
    let herm = rho.hermiticity_residual();
    if herm > 1e-10 {
        return Err(Error::InvalidDensity(format!("not Hermitian (residual {herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDensity(format!("trace {tr:.12} differs from 1")));
    }
    finish(rho.expectation(phi)?.re)
}

/// The overlaps `h1..h4` of the evolved blocks with the initial field state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlaps {
    pub h1: C64,
    pub h2: C64,
    pub h3: C64,
    pub h4: C64,
}

pub fn overlaps(c: &FockVector, params: &ModelParams, t: f64) -> Result<Overlaps> {
    params.require_kerr_family()?;
    let k = params.k;
    let cutoff = c.cutoff();
    let zero = C64::new(0.0, 0.0);
    let mut o = Overlaps {
        h1: zero,
        h2: zero,
        h3: zero,
        h4: zero,
    };
    for n in 0..=cutoff {
        let ni = n as i64;
        let p = c[n].norm_sqr();
        let low = efg(ni - k as i64, t, params);
        let here = efg(ni, t, params);
        o.h1 += p * low.e * low.f.conj();
        o.h4 += p * here.e * here.f;
        if n + k <= cutoff {
            let w = here.g * here.e * fock::sqrt_shifted_product(ni, k);
            o.h2 += c[n].conj() * c[n + k] * w;
            o.h3 += c[n + k].conj() * c[n] * w;
        }
    }
    Ok(o)
}

/// Closed-form fidelity for a product initial state.
pub fn fidelity_closed(ic: &InitialCondition, params: &ModelParams, t: f64) -> Result<f64> {
    let phi = ic.separable_field().ok_or_else(|| {
        Error::NotSeparable(
            "closed-form fidelity needs a product initial state (c = d, or alpha_g = 0, or alpha_e = 0)".into(),
        )
    })?;
    let o = overlaps(phi, params, t)?;
    let (ae, ag) = (ic.alpha_e, ic.alpha_g);
    let raw = ((ae * o.h1 + ag * o.h3).norm_sqr() + (ae * o.h2 + ag * o.h4).norm_sqr()) / ic.n_eg().powi(2);
    finish(raw)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FidelitySeries {
    pub fn closed(ic: &InitialCondition, params: &ModelParams, times: &[f64]) -> Result<Self> {
        let values = times
            .iter()
            .map(|&t| fidelity_closed(ic, params, t))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            times: times.to_vec(),
            values,
        })
    }

    /// Number of maximal runs of consecutive samples strictly above `threshold`.
    pub fn runs_above(&self, threshold: f64) -> usize {
        let mut runs = 0;
        let mut inside = false;
        for &v in &self.values {
            if v > threshold && !inside {
                runs += 1;
            }
            inside = v > threshold;
        }
        runs
    }
}
