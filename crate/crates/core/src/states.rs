//! Joint qubit-field states, the `B^k` map between the rotating and
//! counter-rotating pictures, and the initial-state grammar used by scenarios.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector};

/// `|e> (x) excited + |g> (x) ground`.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitFieldState {
    excited: FockVector,
    ground: FockVector,
}

impl QubitFieldState {
    pub fn new(excited: FockVector, ground: FockVector) -> Result<Self> {
        if excited.cutoff() != ground.cutoff() {
            return Err(Error::Dimension(format!(
                "branch cutoffs differ ({} vs {})",
                excited.cutoff(),
                ground.cutoff()
            )));
        }
        Ok(Self { excited, ground })
    }

    /// `|branch> (x) |n>`.
    pub fn fock(branch: Branch, n: usize, cutoff: usize) -> Result<Self> {
        let v = FockVector::basis(cutoff, n)?;
        let z = FockVector::zeros(cutoff);
        Ok(match branch {
            Branch::Excited => Self { excited: v, ground: z },
            Branch::Ground => Self { excited: z, ground: v },
        })
    }

    pub fn excited(&self) -> &FockVector {
        &self.excited
    }

    pub fn ground(&self) -> &FockVector {
        &self.ground
    }

    pub fn into_parts(self) -> (FockVector, FockVector) {
        (self.excited, self.ground)
    }

    pub fn cutoff(&self) -> usize {
        self.excited.cutoff()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited.norm_sqr() + self.ground.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < 1e-10
    }

    pub fn inner(&self, other: &QubitFieldState) -> C64 {
        self.excited.inner(&other.excited) + self.ground.inner(&other.ground)
    }

    pub fn scaled(&self, factor: C64) -> QubitFieldState {
        Self {
            excited: self.excited.scaled(factor),
            ground: self.ground.scaled(factor),
        }
    }

    pub fn max_abs_diff(&self, other: &QubitFieldState) -> f64 {
        self.excited
            .max_abs_diff(&other.excited)
            .max(self.ground.max_abs_diff(&other.ground))
    }

    /// Max difference restricted to Fock levels `<= limit` in both branches.
    pub fn max_abs_diff_below(&self, other: &QubitFieldState, limit: usize) -> f64 {
        let lim = limit.min(self.cutoff()).min(other.cutoff());
        (0..=lim)
            .map(|n| {
                (self.excited[n] - other.excited[n])
                    .norm()
                    .max((self.ground[n] - other.ground[n]).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Amplitudes in joint-basis order (excited block, then ground block).
    pub fn to_joint(&self) -> Vec<C64> {
        self.excited.iter().chain(self.ground.iter()).copied().collect()
    }

    pub fn from_joint(amps: &[C64]) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!("joint vector of odd length {}", amps.len())));
        }
        let m = amps.len() / 2;
        Self::new(
            FockVector::from_amps(amps[..m].to_vec())?,
            FockVector::from_amps(amps[m..].to_vec())?,
        )
    }

    /// Highest Fock level carrying amplitude above `threshold` in either branch.
    pub fn support_top(&self, threshold: f64) -> usize {
        let e = self.excited.support_top(threshold).unwrap_or(0);
        let g = self.ground.support_top(threshold).unwrap_or(0);
        e.max(g)
    }

    /// Mean photon number `<n>` (unnormalized).
    pub fn mean_photons(&self) -> f64 {
        self.excited
            .iter()
            .chain(self.ground.iter())
            .enumerate()
            .map(|(i, a)| (i % (self.cutoff() + 1)) as f64 * a.norm_sqr())
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Excited,
    Ground,
}

/// An initial condition `(alpha_e |e> (x) c + alpha_g |g> (x) d) / N_eg` with
/// unit-norm `c` and `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    pub alpha_e: C64,
    pub alpha_g: C64,
    pub c: FockVector,
    pub d: FockVector,
}

const UNIT_NORM_TOL: f64 = 1e-8;

impl InitialCondition {
    pub fn new(alpha_e: C64, alpha_g: C64, c: FockVector, d: FockVector) -> Result<Self> {
        if c.cutoff() != d.cutoff() {
            return Err(Error::Dimension(format!(
                "c and d cutoffs differ ({} vs {})",
                c.cutoff(),
                d.cutoff()
            )));
        }
        if alpha_e.norm_sqr() + alpha_g.norm_sqr() == 0.0 {
            return Err(Error::InvalidParameter("alpha_e and alpha_g are both zero".into()));
        }
        for (name, v, weight) in [("c", &c, alpha_e), ("d", &d, alpha_g)] {
            // A branch with zero weight never enters the state.
            if weight.norm() > 0.0 && (v.norm_sqr() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be unit-norm (|{name}|^2 = {:.12})",
                    v.norm_sqr()
                )));
            }
        }
        Ok(Self { alpha_e, alpha_g, c, d })
    }

    pub fn cutoff(&self) -> usize {
        self.c.cutoff()
    }

    /// `N_eg = sqrt(|alpha_e|^2 + |alpha_g|^2)`.
    pub fn n_eg(&self) -> f64 {
        (self.alpha_e.norm_sqr() + self.alpha_g.norm_sqr()).sqrt()
    }

    pub fn state(&self) -> QubitFieldState {
        let n = self.n_eg();
        QubitFieldState {
            excited: self.c.scaled(self.alpha_e / n),
            ground: self.d.scaled(self.alpha_g / n),
        }
    }

    /// The common field state when the condition is a product state
    /// (`c = d`, or one of the qubit weights vanishes).
    pub fn separable_field(&self) -> Option<&FockVector> {
        if self.alpha_g.norm() == 0.0 {
            Some(&self.c)
        } else if self.alpha_e.norm() == 0.0 {
            Some(&self.d)
        } else if self.c.max_abs_diff(&self.d) <= 1e-14 {
            Some(&self.c)
        } else {
            None
        }
    }
}

pub fn build_initial(alpha_e: C64, alpha_g: C64, c: FockVector, d: FockVector) -> Result<QubitFieldState> {
    Ok(InitialCondition::new(alpha_e, alpha_g, c, d)?.state())
}

/// Bookkeeping attached to every state mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct MappingReport {
    /// Squared amplitude raised past the cutoff.
    pub leakage: f64,
    /// Squared amplitude discarded because the map is undefined there.
    pub dropped_mass: f64,
    /// Squared norm of the output.
    pub norm_sqr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mapped {
    pub state: QubitFieldState,
    pub report: MappingReport,
}

/// `B^k |psi> = ((a^dagger)^k excited, a^k ground)`; not renormalized.
pub fn susy_map(state: &QubitFieldState, k: usize) -> Mapped {
    let raised = fock::apply_raise_k(&state.excited, k);
    let lowered = fock::apply_lower_k(&state.ground, k);
    let out = QubitFieldState {
        excited: raised.value,
        ground: lowered,
    };
    Mapped {
        report: MappingReport {
            leakage: raised.leakage,
            dropped_mass: 0.0,
            norm_sqr: out.norm_sqr(),
        },
        state: out,
    }
}

/// Rotating-picture preimage: `a^k (n-k)!/n!` on the excited branch and
/// `(a^dagger)^k n!/(n+k)!` on the ground branch.
///
/// `(n-k)!` is undefined for `n < k`; those excited components are dropped
/// and their mass reported. Ground components raised past the cutoff are
/// reported as leakage.
pub fn rotating_preimage(state: &QubitFieldState, k: usize) -> Mapped {
    let cutoff = state.cutoff();
    let mut excited = FockVector::zeros(cutoff);
    let mut ground = FockVector::zeros(cutoff);
    let mut dropped = 0.0;
    let mut leakage = 0.0;
    for n in 0..=cutoff {
        let c = state.excited[n];
        if n < k {
            dropped += c.norm_sqr();
        } else {
            // a^k |n> = sqrt(n!/(n-k)!) |n-k>, then times (n-k)!/n!
            excited[n - k] = c / fock::sqrt_shifted_product((n - k) as i64, k);
        }
        let d = state.ground[n] / fock::sqrt_shifted_product(n as i64, k);
        if n + k <= cutoff {
            ground[n + k] = d;
        } else {
            leakage += d.norm_sqr();
        }
    }
    let out = QubitFieldState { excited, ground };
    Mapped {
        report: MappingReport {
            leakage,
            dropped_mass: dropped,
            norm_sqr: out.norm_sqr(),
        },
        state: out,
    }
}

/// Schmidt coefficients of the qubit-field bipartition, largest first,
/// normalized so their squares sum to one.
///
/// The determinant of the 2x2 Gram matrix is formed through the Lagrange
/// identity to avoid the cancellation of `|e|^2 |g|^2 - |<e|g>|^2`.
pub fn schmidt_coefficients(state: &QubitFieldState) -> [f64; 2] {
    let e = state.excited.amps();
    let g = state.ground.amps();
    let total = state.norm_sqr();
    if total == 0.0 {
        return [0.0, 0.0];
    }
    let mut det = 0.0;
    for i in 0..e.len() {
        if e[i].norm_sqr() == 0.0 && g[i].norm_sqr() == 0.0 {
            continue;
        }
        for j in (i + 1)..e.len() {
            det += (e[i] * g[j] - e[j] * g[i]).norm_sqr();
        }
    }
    let disc = (total * total - 4.0 * det).max(0.0).sqrt();
    let big = (total + disc) / 2.0;
    let small = det / big;
    [(big / total).sqrt(), (small / total).sqrt()]
}

/// Split `head(arg, arg, ...)` at top-level commas.
pub(crate) fn split_call(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::parse("call syntax", format!("expected name(args...) in '{s}'")))?;
    if !s.ends_with(')') {
        return Err(Error::parse("call syntax", format!("missing ')' in '{s}'")));
    }
    let head = s[..open].trim();
    let body = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::parse("call syntax", format!("unbalanced ')' in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(Error::parse("call syntax", format!("unbalanced '(' in '{s}'")));
    }
    if !body.trim().is_empty() {
        args.push(body[start..].trim());
    }
    Ok((head, args))
}

/// Parse a real number, also accepting `sqrt(x)`.
pub(crate) fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let x = parse_real(inner)?;
        if x < 0.0 {
            return Err(Error::parse("number", format!("sqrt of negative value in '{s}'")));
        }
        return Ok(x.sqrt());
    }
    if let Some(inner) = s.strip_prefix("-sqrt(") {
        return Ok(-parse_real(&format!("sqrt({inner}"))?);
    }
    s.parse::<f64>()
        .map_err(|_| Error::parse("number", format!("cannot parse '{s}' as a real number")))
}

/// Parse `a`, `bi`, `a+bi` or `a-bi` (`sqrt(x)` allowed for real parts).
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse_real(&t)?, 0.0));
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'('));
    let imag = |part: &str| -> Result<f64> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => parse_real(p),
        }
    };
    match split {
        Some(i) => Ok(C64::new(parse_real(&body[..i])?, imag(&body[i..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Inverse of [`parse_complex`], exact under round trip.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.re == 0.0 {
        format!("{:?}i", z.im)
    } else if z.im < 0.0 || z.im.is_sign_negative() {
        format!("{:?}{:?}i", z.re, z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Textual initial-state description.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    /// `|e> (x) |gamma>`
    ExcitedCoherent(C64),
    /// `|g> (x) |gamma>`
    GroundCoherent(C64),
    /// `(alpha_e |e>|gamma_e> + alpha_g |g>|gamma_g>) / N_eg`
    Superposition {
        alpha_e: C64,
        alpha_g: C64,
        gamma_e: C64,
        gamma_g: C64,
    },
    Fock(Branch, usize),
}

/// An initial condition together with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct RealizedInitial {
    pub condition: InitialCondition,
    /// Largest coherent tail mass on `n > N - 2k` (plus mass beyond `N`).
    pub tail_mass: f64,
    pub tail_exceeded: bool,
    /// Smallest cutoff that satisfies the tail tolerance.
    pub suggested_cutoff: usize,
}

impl InitialSpec {
    pub fn realize(&self, cutoff: usize, k: usize, tail_tolerance: f64) -> Result<RealizedInitial> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let (alpha_e, alpha_g, gammas) = match *self {
            InitialSpec::ExcitedCoherent(g) => (one, zero, [Some(g), None]),
            InitialSpec::GroundCoherent(g) => (zero, one, [None, Some(g)]),
            InitialSpec::Superposition {
                alpha_e,
                alpha_g,
                gamma_e,
                gamma_g,
            } => (alpha_e, alpha_g, [Some(gamma_e), Some(gamma_g)]),
            InitialSpec::Fock(branch, n) => {
                let basis = FockVector::basis(cutoff, n)?;
                let (ae, ag) = match branch {
                    Branch::Excited => (one, zero),
                    Branch::Ground => (zero, one),
                };
                let top = n + 2 * k;
                let exceeded = top > cutoff;
                return Ok(RealizedInitial {
                    condition: InitialCondition::new(ae, ag, basis.clone(), basis)?,
                    tail_mass: if exceeded { 1.0 } else { 0.0 },
                    tail_exceeded: exceeded,
                    suggested_cutoff: top.max(cutoff),
                });
            }
        };
        let mut tail_mass: f64 = 0.0;
        let mut suggested = cutoff;
        let mut vecs = Vec::new();
        for gamma in gammas {
            match gamma {
                Some(g) => {
                    let coh = fock::coherent_with_guard(g, cutoff, k, tail_tolerance);
                    tail_mass = tail_mass.max(coh.tail_mass);
                    if coh.tail_exceeded {
                        suggested = suggested.max(fock::suggest_cutoff(g, k, tail_tolerance));
                    }
                    vecs.push(Some(coh.amps));
                }
                None => vecs.push(None),
            }
        }
        let exceeded = tail_mass > tail_tolerance;
        let c = vecs[0].clone().or_else(|| vecs[1].clone()).expect("one branch present");
        let d = vecs[1].clone().unwrap_or_else(|| c.clone());
        let condition = InitialCondition::new(alpha_e, alpha_g, c, d).map_err(|e| {
            if exceeded {
                let msg = match e {
                    Error::InvalidParameter(m) => m,
                    other => other.to_string(),
                };
                Error::InvalidParameter(format!(
                    "{msg}; coherent tail mass {tail_mass:.3e} exceeds tolerance, try cutoff >= {suggested}"
                ))
            } else {
                e
            }
        })?;
        Ok(RealizedInitial {
            condition,
            tail_mass,
            tail_exceeded: exceeded,
            suggested_cutoff: suggested,
        })
    }
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialSpec::ExcitedCoherent(g) => write!(f, "excited-coherent({})", format_complex(*g)),
            InitialSpec::GroundCoherent(g) => write!(f, "ground-coherent({})", format_complex(*g)),
            InitialSpec::Superposition {
                alpha_e,
                alpha_g,
                gamma_e,
                gamma_g,
            } => write!(
                f,
                "superposition({}, {}, {}, {})",
                format_complex(*alpha_e),
                format_complex(*alpha_g),
                format_complex(*gamma_e),
                format_complex(*gamma_g)
            ),
            InitialSpec::Fock(branch, n) => {
                let b = match branch {
                    Branch::Excited => "e",
                    Branch::Ground => "g",
                };
                write!(f, "fock({b}, {n})")
            }
        }
    }
}

impl FromStr for InitialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = split_call(s)?;
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    "initial state",
                    format!("{head} takes {n} argument(s), got {}", args.len()),
                ))
            }
        };
        match head {
            "excited-coherent" => {
                arity(1)?;
                Ok(InitialSpec::ExcitedCoherent(parse_complex(args[0])?))
            }
            "ground-coherent" => {
                arity(1)?;
                Ok(InitialSpec::GroundCoherent(parse_complex(args[0])?))
            }
            "superposition" => {
                arity(4)?;
                Ok(InitialSpec::Superposition {
                    alpha_e: parse_complex(args[0])?,
                    alpha_g: parse_complex(args[1])?,
                    gamma_e: parse_complex(args[2])?,
                    gamma_g: parse_complex(args[3])?,
                })
            }
            "fock" => {
                arity(2)?;
                let branch = match args[0] {
                    "e" | "excited" => Branch::Excited,
                    "g" | "ground" => Branch::Ground,
                    other => {
                        return Err(Error::parse(
                            "initial state",
                            format!("fock branch must be 'e' or 'g', got '{other}'"),
                        ))
                    }
                };
                let n = args[1].parse::<usize>().map_err(|_| {
                    Error::parse("initial state", format!("fock level '{}' is not a non-negative integer", args[1]))
                })?;
                Ok(InitialSpec::Fock(branch, n))
            }
            other => Err(Error::parse(
                "initial state",
                format!(
                    "unknown form '{other}' (expected excited-coherent, ground-coherent, superposition or fock)"
                ),
            )),
        }
    }
}

impl Serialize for InitialSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitialSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn build_initial_examples() {
        let coh = fock::coherent_amplitudes(c(2.0, 0.0), 60);
        let s = build_initial(c(1.0, 0.0), c(0.0, 0.0), coh.clone(), FockVector::zeros(60)).unwrap();
        assert_eq!(s.excited(), &coh);
        assert!(s.ground().norm_sqr() == 0.0);

        let plus = build_initial(c(1.0, 0.0), c(1.0, 0.0), coh.clone(), coh.clone()).unwrap();
        assert_abs_diff_eq!(plus.norm_sqr(), 1.0, epsilon = 1e-10);
        assert!(schmidt_coefficients(&plus)[1] < 1e-10);

        let other = fock::coherent_amplitudes(c(-1.0, 0.5), 60);
        let cat = build_initial(c(0.6, 0.0), c(0.0, 0.8), coh.clone(), other).unwrap();
        assert!(schmidt_coefficients(&cat)[1] > 1e-3);

        assert!(build_initial(c(0.0, 0.0), c(0.0, 0.0), coh.clone(), coh.clone()).is_err());
        assert!(build_initial(c(1.0, 0.0), c(1.0, 0.0), coh.clone(), fock::coherent_amplitudes(c(2.0, 0.0), 30)).is_err());
        assert!(build_initial(c(1.0, 0.0), c(1.0, 0.0), coh.scaled(c(2.0, 0.0)), coh).is_err());
    }

    #[test]
    fn susy_map_examples() {
        let e0 = QubitFieldState::fock(Branch::Excited, 0, 8).unwrap();
        assert_eq!(susy_map(&e0, 1).state, QubitFieldState::fock(Branch::Excited, 1, 8).unwrap());
        let g0 = QubitFieldState::fock(Branch::Ground, 0, 8).unwrap();
        assert_eq!(susy_map(&g0, 1).state.norm_sqr(), 0.0);
        let top = QubitFieldState::fock(Branch::Excited, 8, 8).unwrap();
        assert_eq!(susy_map(&top, 1).report.leakage, 9.0);
    }

    #[test]
    fn preimage_examples() {
        let e1 = QubitFieldState::fock(Branch::Excited, 1, 8).unwrap();
        let pre = rotating_preimage(&e1, 1);
        assert_eq!(pre.state, QubitFieldState::fock(Branch::Excited, 0, 8).unwrap());
        assert_eq!(susy_map(&pre.state, 1).state, e1);

        let g0 = QubitFieldState::fock(Branch::Ground, 0, 8).unwrap();
        assert_eq!(susy_map(&rotating_preimage(&g0, 1).state, 1).state, g0);

        let pre2 = rotating_preimage(&e1, 2);
        assert_eq!(pre2.state.excited().norm_sqr(), 0.0);
        assert_eq!(pre2.report.dropped_mass, 1.0);
    }

    #[test]
    fn separable_to_entangled_under_map() {
        let coh = fock::coherent_amplitudes(c(1.5, 0.0), 60);
        let plus = build_initial(c(1.0, 0.0), c(1.0, 0.0), coh.clone(), coh).unwrap();
        let mapped = susy_map(&plus, 1).state;
        let norm = mapped.norm();
        assert!(schmidt_coefficients(&mapped.scaled(c(1.0 / norm, 0.0)))[1] > 1e-3);
    }

    #[test]
    fn complex_literals() {
        for (text, z) in [
            ("1.5", c(1.5, 0.0)),
            ("1.5+0.5i", c(1.5, 0.5)),
            ("-2i", c(0.0, -2.0)),
            ("i", c(0.0, 1.0)),
            ("1e-3-2.5e+1i", c(1e-3, -25.0)),
            ("sqrt(14)", c(14f64.sqrt(), 0.0)),
        ] {
            assert_eq!(parse_complex(text).unwrap(), z, "{text}");
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert!(parse_complex("1+").is_err() || parse_complex("1+").unwrap() != c(1.0, 0.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn spec_grammar_round_trip() {
        for text in [
            "excited-coherent(3.1)",
            "ground-coherent(1+2i)",
            "superposition(1, 0.5i, 2, -1.5)",
            "fock(g, 5)",
            "fock(e, 0)",
        ] {
            let spec: InitialSpec = text.parse().unwrap();
            assert_eq!(spec.to_string().parse::<InitialSpec>().unwrap(), spec);
        }
        assert!("fock(x, 1)".parse::<InitialSpec>().is_err());
        assert!("coherent(2)".parse::<InitialSpec>().is_err());
        assert!("excited-coherent(1, 2)".parse::<InitialSpec>().is_err());
    }

    #[test]
    fn realize_reports_tail() {
        let spec = InitialSpec::ExcitedCoherent(c(4.0, 0.0));
        let ok = spec.realize(120, 2, 1e-12).unwrap();
        assert!(!ok.tail_exceeded);
        let bad = spec.realize(24, 2, 1e-12);
        match bad {
            Ok(r) => assert!(r.tail_exceeded && r.suggested_cutoff > 24),
            Err(e) => assert!(e.to_string().contains("try cutoff")),
        }
    }
}
