//! Hamiltonians of the rotating and counter-rotating qubit-cavity family,
//! the intertwining operator `B^k`, and the conserved quantities.
//!
//! Joint matrices use the basis `|e,0>, ..., |e,N>, |g,0>, ..., |g,N>`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector};

/// A real function of the number operator, evaluated on integer levels.
///
/// Negative levels occur when an index shift `n - k` is applied near the
/// vacuum; both variants are total on the integers.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagFn {
    /// `sum_j coeffs[j] n^j`
    Poly(Vec<f64>),
    /// `scale * (-1)^n`
    Parity(f64),
}

impl DiagFn {
    pub fn zero() -> Self {
        DiagFn::Poly(Vec::new())
    }

    /// The identity operator (constant 1).
    pub fn one() -> Self {
        DiagFn::Poly(vec![1.0])
    }

    /// `n^j`
    pub fn power(j: u32) -> Self {
        let mut coeffs = vec![0.0; j as usize + 1];
        coeffs[j as usize] = 1.0;
        DiagFn::Poly(coeffs)
    }

    pub fn eval(&self, n: i64) -> f64 {
        match self {
            DiagFn::Poly(coeffs) => {
                let x = n as f64;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            DiagFn::Parity(scale) => {
                if n.rem_euclid(2) == 0 {
                    *scale
                } else {
                    -*scale
                }
            }
        }
    }
}

impl fmt::Display for DiagFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagFn::Poly(coeffs) => {
                write!(f, "poly(")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c:?}")?;
                }
                write!(f, ")")
            }
            DiagFn::Parity(scale) => write!(f, "parity({scale:?})"),
        }
    }
}

impl FromStr for DiagFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = crate::states::split_call(s)?;
        let numbers = args
            .iter()
            .map(|a| {
                a.parse::<f64>()
                    .map_err(|_| Error::parse("diagonal function", format!("bad number '{a}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match head {
            "poly" => Ok(DiagFn::Poly(numbers)),
            "parity" if numbers.len() == 1 => Ok(DiagFn::Parity(numbers[0])),
            _ => Err(Error::parse(
                "diagonal function",
                format!("expected poly(c0, c1, ...) or parity(scale), got '{s}'"),
            )),
        }
    }
}

impl Serialize for DiagFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DiagFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Physical parameters, all frequencies in units of the cavity frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default)]
    pub delta: f64,
    pub g: f64,
    #[serde(default)]
    pub chi: f64,
    pub k: usize,
    /// `F_n`, the Stark-like term multiplying `sigma_z`. Defaults to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stark: Option<DiagFn>,
    /// `G_n`, the qubit-independent diagonal term. Defaults to `chi n^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<DiagFn>,
    /// `f_n`, the intensity-dependent coupling profile. Defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_profile: Option<DiagFn>,
}

impl ModelParams {
    /// The Kerr/multiphoton family: `F = 0`, `G = chi n^2`, `f = 1`.
    pub fn kerr(delta: f64, g: f64, chi: f64, k: usize) -> Self {
        Self {
            delta,
            g,
            chi,
            k,
            stark: None,
            diagonal: None,
            coupling_profile: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("photon order k must be >= 1".into()));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling g = {} must be finite and >= 0", self.g)));
        }
        if !self.delta.is_finite() || !self.chi.is_finite() {
            return Err(Error::InvalidParameter("delta and chi must be finite".into()));
        }
        Ok(())
    }

    pub fn is_kerr_family(&self) -> bool {
        self.stark.is_none() && self.diagonal.is_none() && self.coupling_profile.is_none()
    }

    pub(crate) fn require_kerr_family(&self) -> Result<()> {
        self.validate()?;
        if self.is_kerr_family() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "custom F/G/f functions have no closed-form propagator; use the eigen-oracle".into(),
            ))
        }
    }

    pub fn stark_at(&self, n: i64) -> f64 {
        self.stark.as_ref().map_or(0.0, |f| f.eval(n))
    }

    pub fn diagonal_at(&self, n: i64) -> f64 {
        match &self.diagonal {
            Some(f) => f.eval(n),
            None => self.chi * (n * n) as f64,
        }
    }

    pub fn profile_at(&self, n: i64) -> f64 {
        self.coupling_profile.as_ref().map_or(1.0, |f| f.eval(n))
    }

    /// `D^+_n = G_n + F_n`
    fn d_plus(&self, n: i64) -> f64 {
        self.diagonal_at(n) + self.stark_at(n)
    }

    /// `D^-_n = G_n - F_n`
    fn d_minus(&self, n: i64) -> f64 {
        self.diagonal_at(n) - self.stark_at(n)
    }
}

/// Dense operator on the truncated qubit-field space.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMatrix {
    cutoff: usize,
    matrix: DMatrix<C64>,
}

impl JointMatrix {
    pub fn zeros(cutoff: usize) -> Self {
        let dim = 2 * (cutoff + 1);
        Self {
            cutoff,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_matrix(cutoff: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 2 * (cutoff + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim}x{dim} for cutoff {cutoff}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { cutoff, matrix })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Row/column index of `|e,n>`.
    pub fn excited(&self, n: usize) -> usize {
        n
    }

    /// Row/column index of `|g,n>`.
    pub fn ground(&self, n: usize) -> usize {
        self.cutoff + 1 + n
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    fn add(&mut self, row: usize, col: usize, value: C64) {
        self.matrix[(row, col)] += value;
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|` over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn mul(&self, other: &JointMatrix) -> JointMatrix {
        JointMatrix {
            cutoff: self.cutoff,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn sub(&self, other: &JointMatrix) -> JointMatrix {
        JointMatrix {
            cutoff: self.cutoff,
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// Max entry magnitude over rows and columns with Fock index `<= limit`.
    pub fn interior_max_abs(&self, limit: usize) -> f64 {
        let idx: Vec<usize> = (0..=limit.min(self.cutoff))
            .flat_map(|n| [self.excited(n), self.ground(n)])
            .collect();
        let mut worst: f64 = 0.0;
        for &i in &idx {
            for &j in &idx {
                worst = worst.max(self.matrix[(i, j)].norm());
            }
        }
        worst
    }

    /// `M |psi>` for a state given as excited and ground branches.
    pub fn apply(&self, excited: &FockVector, ground: &FockVector) -> Result<(FockVector, FockVector)> {
        if excited.cutoff() != self.cutoff || ground.cutoff() != self.cutoff {
            return Err(Error::Dimension("state cutoff differs from operator cutoff".into()));
        }
        let v = nalgebra::DVector::from_iterator(
            self.dim(),
            excited.iter().chain(ground.iter()).copied(),
        );
        let out = &self.matrix * v;
        let m = self.cutoff + 1;
        Ok((
            FockVector::from_amps(out.rows(0, m).iter().copied().collect())?,
            FockVector::from_amps(out.rows(m, m).iter().copied().collect())?,
        ))
    }
}

fn check_cutoff(k: usize, cutoff: usize) -> Result<()> {
    let min = 2 * k;
    if cutoff < min {
        return Err(Error::CutoffTooSmall { cutoff, k, min });
    }
    Ok(())
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Off-diagonal coupling `g f_n a^k` between the branches, placed so that
/// `lower` is the branch the `a^k` acts into: entry `(lower, n) <- (upper, n + k)`.
fn add_coupling(h: &mut JointMatrix, params: &ModelParams, lower_is_excited: bool) {
    let cutoff = h.cutoff;
    let k = params.k;
    for m in k..=cutoff {
        // a^k |m> = sqrt(m!/(m-k)!) |m - k>, built from the ladder action.
        let col = fock::FockVector::basis(cutoff, m).expect("m <= cutoff");
        let lowered = fock::apply_lower_k(&col, k);
        let n = m - k;
        let value = params.g * params.profile_at(m as i64) * lowered[n].re;
        let (row, col) = if lower_is_excited {
            (h.excited(n), h.ground(m))
        } else {
            (h.ground(n), h.excited(m))
        };
        h.add(row, col, real(value));
        h.add(col, row, real(value));
    }
}

/// The general rotating Hamiltonian `(Delta/2 + F) sigma_z + G + g[a^k f sigma_+ + f (a^dagger)^k sigma_-]`.
pub fn build_h0(params: &ModelParams, cutoff: usize) -> Result<JointMatrix> {
    params.validate()?;
    check_cutoff(params.k, cutoff)?;
    let mut h = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff {
        let ni = n as i64;
        h.add(h.excited(n), h.excited(n), real(params.delta / 2.0 + params.d_plus(ni)));
        h.add(h.ground(n), h.ground(n), real(-params.delta / 2.0 + params.d_minus(ni)));
    }
    add_coupling(&mut h, params, true);
    Ok(h)
}

/// Rotating Hamiltonian with the diagonal terms pre-shifted by `+-k`
/// (`D^+_{n+k}` on the excited branch, `D^-_{n-k}` on the ground branch),
/// so that its partner under `B^k` is exactly [`build_h`]. For the default
/// family this is `Delta/2 sigma_z + chi sigma_+sigma_- (n+k)^2 + chi sigma_-sigma_+ (n-k)^2 + g[...]`.
pub fn build_h0_shifted(params: &ModelParams, cutoff: usize) -> Result<JointMatrix> {
    params.validate()?;
    check_cutoff(params.k, cutoff)?;
    let k = params.k as i64;
    let mut h = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff {
        let ni = n as i64;
        h.add(h.excited(n), h.excited(n), real(params.delta / 2.0 + params.d_plus(ni + k)));
        h.add(h.ground(n), h.ground(n), real(-params.delta / 2.0 + params.d_minus(ni - k)));
    }
    add_coupling(&mut h, params, true);
    Ok(h)
}

/// Counter-rotating Hamiltonian `(Delta/2 + F) sigma_z + G + g[a^k f sigma_- + f (a^dagger)^k sigma_+]`.
///
/// With the default functions this is `Delta/2 sigma_z + chi n^2 + g[a^k sigma_- + (a^dagger)^k sigma_+]`.
pub fn build_h(params: &ModelParams, cutoff: usize) -> Result<JointMatrix> {
    params.validate()?;
    check_cutoff(params.k, cutoff)?;
    let mut h = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff {
        let ni = n as i64;
        h.add(h.excited(n), h.excited(n), real(params.delta / 2.0 + params.d_plus(ni)));
        h.add(h.ground(n), h.ground(n), real(-params.delta / 2.0 + params.d_minus(ni)));
    }
    add_coupling(&mut h, params, false);
    Ok(h)
}

/// The SUSY partner of [`build_h0`]: diagonal terms `D^+_{n-k}` and `D^-_{n+k}`
/// with counter-rotating coupling.
pub fn build_partner(params: &ModelParams, cutoff: usize) -> Result<JointMatrix> {
    params.validate()?;
    check_cutoff(params.k, cutoff)?;
    let k = params.k as i64;
    let mut h = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff {
        let ni = n as i64;
        h.add(h.excited(n), h.excited(n), real(params.delta / 2.0 + params.d_plus(ni - k)));
        h.add(h.ground(n), h.ground(n), real(-params.delta / 2.0 + params.d_minus(ni + k)));
    }
    add_coupling(&mut h, params, false);
    Ok(h)
}

/// `B^k = diag((a^dagger)^k, a^k)`.
pub fn build_bk(k: usize, cutoff: usize) -> Result<JointMatrix> {
    if k == 0 {
        return Err(Error::InvalidParameter("photon order k must be >= 1".into()));
    }
    check_cutoff(k, cutoff)?;
    let mut b = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff - k {
        let w = real(fock::sqrt_shifted_product(n as i64, k));
        b.add(b.excited(n + k), b.excited(n), w);
        b.add(b.ground(n), b.ground(n + k), w);
    }
    Ok(b)
}

/// Max entry of `B^k H0 - H B^k` on Fock indices `<= N - guard - k`.
pub fn intertwining_residual_of(
    h0: &JointMatrix,
    h: &JointMatrix,
    k: usize,
    guard: usize,
) -> Result<f64> {
    let cutoff = h0.cutoff();
    if h.cutoff() != cutoff {
        return Err(Error::Dimension("H0 and H cutoffs differ".into()));
    }
    if guard < k || guard + k > cutoff {
        return Err(Error::EmptyInterior { cutoff, k, guard });
    }
    let b = build_bk(k, cutoff)?;
    let diff = b.mul(h0).sub(&h.mul(&b));
    Ok(diff.interior_max_abs(cutoff - guard - k))
}

/// Intertwining residual of the pair actually propagated in closed form:
/// [`build_h0_shifted`] and [`build_h`].
pub fn intertwining_residual(params: &ModelParams, cutoff: usize, guard: usize) -> Result<f64> {
    let h0 = build_h0_shifted(params, cutoff)?;
    let h = build_h(params, cutoff)?;
    intertwining_residual_of(&h0, &h, params.k, guard)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conserved {
    /// `C0 = n + k sigma_z / 2`, conserved by the rotating Hamiltonians.
    C0,
    /// `C = n - k sigma_z / 2`, conserved by the counter-rotating Hamiltonians.
    C,
}

pub fn constant_of_motion(which: Conserved, k: usize, cutoff: usize) -> JointMatrix {
    let sign = match which {
        Conserved::C0 => 1.0,
        Conserved::C => -1.0,
    };
    let half = k as f64 / 2.0;
    let mut c = JointMatrix::zeros(cutoff);
    for n in 0..=cutoff {
        c.add(c.excited(n), c.excited(n), real(n as f64 + sign * half));
        c.add(c.ground(n), c.ground(n), real(n as f64 - sign * half));
    }
    c
}

/// Max entry of `[A, B]` on Fock indices `<= limit`.
pub fn commutator_interior(a: &JointMatrix, b: &JointMatrix, limit: usize) -> f64 {
    a.mul(b).sub(&b.mul(a)).interior_max_abs(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn collapse_params() -> ModelParams {
        ModelParams::kerr(0.0, 0.1, 0.0, 2)
    }

    #[test]
    fn diag_fn_parse_and_eval() {
        let f: DiagFn = "poly(0, 0, 0.5)".parse().unwrap();
        assert_eq!(f.eval(3), 4.5);
        assert_eq!(f.eval(-2), 2.0);
        let p: DiagFn = "parity(2)".parse().unwrap();
        assert_eq!(p.eval(3), -2.0);
        assert_eq!(p.eval(-2), 2.0);
        assert_eq!(f.to_string().parse::<DiagFn>().unwrap(), f);
        assert!("sin(1)".parse::<DiagFn>().is_err());
    }

    #[test]
    fn uncoupled_h0_is_block_diagonal() {
        let mut p = ModelParams::kerr(0.3, 0.0, 0.2, 1);
        p.stark = Some(DiagFn::power(1));
        let h = build_h0(&p, 10).unwrap();
        for n in 0..=10 {
            let d = n as f64;
            assert_relative_eq!(h.get(h.excited(n), h.excited(n)).re, 0.15 + 0.2 * d * d + d, epsilon = 1e-13);
            assert_relative_eq!(h.get(h.ground(n), h.ground(n)).re, -0.15 + 0.2 * d * d - d, epsilon = 1e-13);
            for m in 0..=10 {
                assert_eq!(h.get(h.excited(n), h.ground(m)), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn resonant_jc_structure() {
        let p = ModelParams::kerr(0.0, 0.1, 0.0, 1);
        let h = build_h0(&p, 8).unwrap();
        for n in 0..8 {
            let w = h.get(h.excited(n), h.ground(n + 1)).re;
            assert_relative_eq!(w, 0.1 * ((n + 1) as f64).sqrt(), max_relative = 1e-15);
            assert_eq!(h.get(h.ground(n + 1), h.excited(n)).re, w);
        }
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let p = collapse_params();
        for h in [build_h0(&p, 64), build_h(&p, 64), build_h0_shifted(&p, 64), build_partner(&p, 64)] {
            assert!(h.unwrap().hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn shifted_kerr_entries() {
        let p = ModelParams::kerr(0.0, 0.1, 0.5, 1);
        let h = build_h0_shifted(&p, 10).unwrap();
        for n in 0..=10 {
            let m = (n + 1) as f64;
            assert_relative_eq!(h.get(h.excited(n), h.excited(n)).re, 0.5 * m * m);
        }
        let mut flat = ModelParams::kerr(0.2, 0.1, 0.0, 2);
        assert_eq!(build_h0_shifted(&flat, 12).unwrap(), build_h0(&flat, 12).unwrap());
        flat.diagonal = Some(DiagFn::zero());
        assert_eq!(build_h0(&flat, 12).unwrap(), build_h0_shifted(&flat, 12).unwrap());
    }

    #[test]
    fn counter_rotating_pairs_excited_n_plus_k_with_ground_n() {
        let p = ModelParams::kerr(0.0, 0.1, 0.0, 2);
        let h = build_h(&p, 10).unwrap();
        for n in 0..=8 {
            let w = h.get(h.excited(n + 2), h.ground(n)).re;
            assert_relative_eq!(w, 0.1 * fock::factorial_ratio(n, 2).unwrap().sqrt());
            assert_eq!(h.get(h.excited(n), h.ground(n + 2)).re, 0.0);
        }
        let kerr = build_h(&ModelParams::kerr(0.0, 0.0, 0.5, 1), 6).unwrap();
        for n in 0..=6 {
            let d = n as f64;
            assert_eq!(kerr.get(kerr.excited(n), kerr.excited(n)).re, 0.5 * d * d);
            assert_eq!(kerr.get(kerr.ground(n), kerr.ground(n)).re, 0.5 * d * d);
        }
    }

    #[test]
    fn bk_examples() {
        let b = build_bk(1, 6).unwrap();
        assert_eq!(b.get(b.excited(1), b.excited(0)).re, 1.0);
        // B|g,0> = a|0> = 0: the whole column vanishes.
        let col = b.ground(0);
        assert!((0..b.dim()).all(|r| b.get(r, col).norm() == 0.0));
        let b2 = build_bk(2, 8).unwrap();
        assert_relative_eq!(b2.get(b2.ground(3), b2.ground(5)).re, 20f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn intertwining_examples() {
        assert!(intertwining_residual(&collapse_params(), 128, 4).unwrap() < 1e-10);
        assert!(intertwining_residual(&ModelParams::kerr(0.0, 0.0, 0.3, 2), 40, 2).unwrap() < 1e-12);
        assert!(intertwining_residual(&ModelParams::kerr(0.0, 0.1, 0.5, 1), 64, 2).unwrap() < 1e-10);
        assert!(matches!(
            intertwining_residual(&collapse_params(), 10, 9),
            Err(Error::EmptyInterior { .. })
        ));
        assert!(intertwining_residual(&collapse_params(), 10, 1).is_err());
    }

    #[test]
    fn general_partner_intertwines_with_general_h0() {
        let p = ModelParams {
            delta: 0.2,
            g: 0.07,
            chi: 0.0,
            k: 2,
            stark: Some("poly(0.1, 0.3)".parse().unwrap()),
            diagonal: Some("parity(0.4)".parse().unwrap()),
            coupling_profile: Some("poly(1, 0.05)".parse().unwrap()),
        };
        let h0 = build_h0(&p, 40).unwrap();
        let h = build_partner(&p, 40).unwrap();
        let scale = h0.max_abs().max(1.0);
        assert!(intertwining_residual_of(&h0, &h, 2, 4).unwrap() < 1e-12 * scale * 100.0);
    }

    #[test]
    fn constants_of_motion() {
        let c = constant_of_motion(Conserved::C, 2, 6);
        assert_eq!(c.get(c.excited(0), c.excited(0)).re, -1.0);
        let c0 = constant_of_motion(Conserved::C0, 1, 6);
        assert_eq!(c0.get(c0.ground(3), c0.ground(3)).re, 2.5);

        let p = collapse_params();
        let n = 64;
        let h = build_h(&p, n).unwrap();
        let h0 = build_h0_shifted(&p, n).unwrap();
        let lim = n - 2 * p.k;
        assert!(commutator_interior(&h, &constant_of_motion(Conserved::C, 2, n), lim) < 1e-12);
        assert!(commutator_interior(&h0, &constant_of_motion(Conserved::C0, 2, n), lim) < 1e-12);
    }

    #[test]
    fn small_cutoff_rejected() {
        assert!(matches!(
            build_h(&ModelParams::kerr(0.0, 0.1, 0.0, 3), 4),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
