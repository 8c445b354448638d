//! Truncated Fock-space primitives.
//!
//! Amplitude vectors live on `|0>, ..., |N>`. Factorial-like quantities are
//! running products (of square roots where possible) so that they stay
//! exact for small integers and representable up to cutoffs of a few hundred.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Amplitudes `v[n]` of a field state truncated at `n = N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            amps: vec![C64::new(0.0, 0.0); cutoff + 1],
        }
    }

    /// Number state `|n>`.
    pub fn basis(cutoff: usize, n: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidParameter(format!(
                "Fock level {n} exceeds cutoff {cutoff}"
            )));
        }
        let mut v = Self::zeros(cutoff);
        v.amps[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension("empty amplitude vector".into()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> FockVector {
        FockVector {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Squared mass on levels `n >= from`.
    pub fn tail_mass(&self, from: usize) -> f64 {
        self.amps.iter().skip(from).map(|a| a.norm_sqr()).sum()
    }

    /// Highest level whose amplitude magnitude exceeds `threshold`.
    pub fn support_top(&self, threshold: f64) -> Option<usize> {
        self.amps.iter().rposition(|a| a.norm() > threshold)
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for FockVector {
    type Output = C64;
    fn index(&self, n: usize) -> &C64 {
        &self.amps[n]
    }
}

impl IndexMut<usize> for FockVector {
    fn index_mut(&mut self, n: usize) -> &mut C64 {
        &mut self.amps[n]
    }
}

/// A result together with the squared amplitude that was pushed past the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct WithLeakage<T> {
    pub value: T,
    pub leakage: f64,
}

/// `prod_{j=1}^{k} (n + j)` for any integer `n`; zero whenever `-k <= n < 0`.
pub(crate) fn shifted_product(n: i64, k: usize) -> f64 {
    (1..=k as i64).map(|j| (n + j) as f64).product()
}

/// `prod_{j=1}^{k} sqrt(n + j)`, zero for `-k <= n < 0`.
pub(crate) fn sqrt_shifted_product(n: i64, k: usize) -> f64 {
    (1..=k as i64)
        .map(|j| ((n + j) as f64).max(0.0).sqrt())
        .product()
}

/// `(n+k)!/n!` as a running product.
pub fn factorial_ratio(n: usize, k: usize) -> Result<f64> {
    let value = shifted_product(n as i64, k);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { n: n as i64, k })
    }
}

/// `sqrt((n+k)!/n!)`, accumulated factor by factor.
pub fn sqrt_factorial_ratio(n: usize, k: usize) -> Result<f64> {
    let value = sqrt_shifted_product(n as i64, k);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { n: n as i64, k })
    }
}

/// Associated Laguerre polynomial `L_s^a(x)` by the three-term recurrence in `s`.
///
/// Any integer superscript `a >= -s` is accepted.
pub fn assoc_laguerre(s: usize, a: i64, x: f64) -> Result<f64> {
    if a < -(s as i64) {
        return Err(Error::LaguerreOrder { s, a });
    }
    if a >= 0 {
        return Ok(laguerre_unchecked(s, a as f64, x));
    }
    // For a = -m the coefficient (j + a) of the recurrence vanishes at j = m,
    // so the sequence restarts there from L_m^{-m}(x) = (-x)^m / m!. Starting
    // at j = m skips the low orders whose contributions cancel exactly.
    let m = (-a) as usize;
    let mut prev = 0.0;
    let mut cur = (1..=m).fold(1.0, |acc, j| -acc * x / j as f64);
    for j in m..s {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a as f64 - x) * cur - (jf + a as f64) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn laguerre_unchecked(s: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if s == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..s {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner-series kernel `mu(alpha, n, s) = conj(alpha)^(n-s) sqrt(s!/n!) L_s^(n-s)(|alpha|^2)`.
///
/// For `n < s` the value is taken from `conj(mu(-alpha, s, n))`, which keeps
/// the Laguerre superscript non-negative and avoids negative powers of alpha.
pub fn mu(alpha: C64, n: usize, s: usize) -> C64 {
    if n < s {
        return mu(-alpha, s, n).conj();
    }
    let d = n - s;
    let x = alpha.norm_sqr();
    // conj(alpha)^d / sqrt((s+1)...(s+d)), fused to keep the magnitude bounded.
    let mut prefactor = C64::new(1.0, 0.0);
    let ac = alpha.conj();
    for j in 1..=d {
        prefactor *= ac / ((s + j) as f64).sqrt();
    }
    prefactor * laguerre_unchecked(s, d as f64, x)
}

/// `mu` evaluated literally for `n < s`, with a negative Laguerre superscript and
/// negative power of `conj(alpha)`. Undefined at `alpha = 0`.
pub fn mu_negative_superscript(alpha: C64, n: usize, s: usize) -> Result<C64> {
    if n >= s {
        return Ok(mu(alpha, n, s));
    }
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "negative power of conj(alpha) at alpha = 0".into(),
        ));
    }
    let m = s - n;
    let ac = alpha.conj();
    let mut prefactor = C64::new(1.0, 0.0);
    for j in 1..=m {
        prefactor *= ((n + j) as f64).sqrt() / ac;
    }
    let lag = assoc_laguerre(s, n as i64 - s as i64, alpha.norm_sqr())?;
    Ok(prefactor * lag)
}

/// Coherent-state amplitudes `exp(-|gamma|^2/2) gamma^n / sqrt(n!)`, `n = 0..=cutoff`.
pub fn coherent_amplitudes(gamma: C64, cutoff: usize) -> FockVector {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-gamma.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c = c * gamma / (n as f64).sqrt();
        amps.push(c);
    }
    FockVector { amps }
}

/// Coherent amplitudes with the truncation tail measured against a tolerance.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub amps: FockVector,
    /// Mass on `n > N - 2k` plus the mass cut off beyond `N`.
    pub tail_mass: f64,
    pub tail_exceeded: bool,
}

pub fn coherent_with_guard(gamma: C64, cutoff: usize, k: usize, tolerance: f64) -> CoherentState {
    let amps = coherent_amplitudes(gamma, cutoff);
    let from = (cutoff + 1).saturating_sub(2 * k);
    let tail_mass = amps.tail_mass(from) + mass_beyond(gamma, cutoff, amps[cutoff]);
    CoherentState {
        tail_exceeded: tail_mass > tolerance,
        amps,
        tail_mass,
    }
}

/// Mass of the coherent distribution above `cutoff`, continuing the recurrence.
fn mass_beyond(gamma: C64, cutoff: usize, last: C64) -> f64 {
    let mut c = last;
    let mut mass = 0.0;
    let mut n = cutoff;
    loop {
        n += 1;
        c = c * gamma / (n as f64).sqrt();
        let p = c.norm_sqr();
        mass += p;
        if (n as f64) > gamma.norm_sqr() && (p <= mass * 1e-17 || p < 1e-300) {
            break;
        }
    }
    mass
}

/// Smallest cutoff for which the coherent tail drops below `tolerance`.
pub fn suggest_cutoff(gamma: C64, k: usize, tolerance: f64) -> usize {
    let mut cutoff = 2 * k + 2;
    while coherent_with_guard(gamma, cutoff, k, tolerance).tail_exceeded {
        cutoff += (cutoff / 8).max(8);
    }
    cutoff
}

/// `(a^dagger)^k v`; amplitude pushed beyond the cutoff is reported as leakage.
pub fn apply_raise_k(v: &FockVector, k: usize) -> WithLeakage<FockVector> {
    let cutoff = v.cutoff();
    let mut out = FockVector::zeros(cutoff);
    let mut leakage = 0.0;
    for (n, amp) in v.amps.iter().enumerate() {
        let shifted = amp * sqrt_shifted_product(n as i64, k);
        if n + k <= cutoff {
            out.amps[n + k] = shifted;
        } else {
            leakage += shifted.norm_sqr();
        }
    }
    WithLeakage {
        value: out,
        leakage,
    }
}

/// `a^k v`; levels below `k` are annihilated.
pub fn apply_lower_k(v: &FockVector, k: usize) -> FockVector {
    let cutoff = v.cutoff();
    let mut out = FockVector::zeros(cutoff);
    for n in 0..=cutoff.saturating_sub(k) {
        if n + k <= cutoff {
            out.amps[n] = v.amps[n + k] * sqrt_shifted_product(n as i64, k);
        }
    }
    out
}
