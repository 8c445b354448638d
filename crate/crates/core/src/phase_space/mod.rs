//! Cavity-field reduced density, Wigner functions on rectangular grids and
//! lobe counting along circles.
//!
//! Wigner values use the `1/pi` prefactor, `W = (1/pi) sum_s (-1)^s <s|D^dagger rho D|s>`,
//! so a normalized state integrates to 1/2 over the plane.

mod io;
mod lobes;
mod parity;
mod series;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::model::ModelParams;
use crate::states::{parse_real, InitialCondition, QubitFieldState};

pub use io::{pgm_string, write_csv, write_pgm, csv_string};
pub use lobes::{count_lobes, sample_circle, LOBE_SAMPLES, LOBE_THRESHOLD};
pub use parity::{wigner_oracle, OracleWigner};
pub use series::{wigner_closed, wigner_closed_with, MuRoute, SeriesCoefficients};

/// Rectangular sampling domain in the complex plane, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, n_re: usize, n_im: usize) -> Result<Self> {
        let g = Self {
            re_min,
            re_max,
            im_min,
            im_max,
            n_re,
            n_im,
        };
        g.validate()?;
        Ok(g)
    }

    /// `[-half, half]^2` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidParameter(format!("grid bounds must satisfy min < max: {self}")));
        }
        if self.n_re < 2 || self.n_im < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points per axis: {self}")));
        }
        Ok(())
    }

    pub fn d_re(&self) -> f64 {
        (self.re_max - self.re_min) / (self.n_re - 1) as f64
    }

    pub fn d_im(&self) -> f64 {
        (self.im_max - self.im_min) / (self.n_im - 1) as f64
    }

    pub fn re(&self, i: usize) -> f64 {
        self.re_min + i as f64 * self.d_re()
    }

    pub fn im(&self, j: usize) -> f64 {
        self.im_min + j as f64 * self.d_im()
    }

    pub fn len(&self) -> usize {
        self.n_re * self.n_im
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point with flat index `idx` (row-major, imaginary axis outer).
    pub fn point(&self, idx: usize) -> C64 {
        C64::new(self.re(idx % self.n_re), self.im(idx / self.n_re))
    }

    /// Largest `|alpha|` on the grid.
    pub fn max_radius(&self) -> f64 {
        let re = self.re_min.abs().max(self.re_max.abs());
        let im = self.im_min.abs().max(self.im_max.abs());
        re.hypot(im)
    }
}

/// `re_min:re_max:n_re,im_min:im_max:n_im`
impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}:{:?}:{},{:?}:{:?}:{}",
            self.re_min, self.re_max, self.n_re, self.im_min, self.im_max, self.n_im
        )
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse("grid", format!("expected 're_min:re_max:n_re,im_min:im_max:n_im', got '{s}'"));
        let axes: Vec<&str> = s.split(',').map(str::trim).collect();
        if axes.len() != 2 {
            return Err(bad());
        }
        let mut parsed = Vec::new();
        for axis in axes {
            let parts: Vec<&str> = axis.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo = parse_real(parts[0])?;
            let hi = parse_real(parts[1])?;
            let n = parts[2].parse::<usize>().map_err(|_| bad())?;
            parsed.push((lo, hi, n));
        }
        Self::new(parsed[0].0, parsed[0].1, parsed[1].0, parsed[1].1, parsed[0].2, parsed[1].2)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Samples of `W` on a grid; `values[j * n_re + i]` sits at `(re(i), im(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.n_re + i]
    }

    /// Riemann sum of `W` over the grid cells.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.d_re() * self.spec.d_im()
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Reduced density matrix of the cavity field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDensity {
    matrix: DMatrix<C64>,
}

impl FieldDensity {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension("density matrix must be square and non-empty".into()));
        }
        Ok(Self { matrix })
    }

    /// `|v><v|`
    pub fn pure(v: &FockVector) -> Self {
        let col = nalgebra::DVector::from_column_slice(v.amps());
        Self {
            matrix: &col * col.adjoint(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn mean_photons(&self) -> f64 {
        self.matrix
            .diagonal()
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.re)
            .sum()
    }

    /// `<v| rho |v>`
    pub fn expectation(&self, v: &FockVector) -> Result<C64> {
        if v.dim() != self.matrix.nrows() {
            return Err(Error::Dimension("vector and density dimensions differ".into()));
        }
        let col = nalgebra::DVector::from_column_slice(v.amps());
        Ok((col.adjoint() * &self.matrix * &col)[(0, 0)])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
    }

    /// Hermitian to 1e-10, unit trace to 1e-8, eigenvalues above -1e-8.
    pub fn check(&self) -> Result<()> {
        let h = self.hermiticity_residual();
        if h > 1e-10 {
            return Err(Error::InvalidDensity(format!("not Hermitian (residual {h:.3e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidDensity(format!("trace {tr:.12} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// Partial trace over the qubit.
pub fn reduced_density(state: &QubitFieldState) -> FieldDensity {
    let e = nalgebra::DVector::from_column_slice(state.excited().amps());
    let g = nalgebra::DVector::from_column_slice(state.ground().amps());
    FieldDensity {
        matrix: &e * e.adjoint() + &g * g.adjoint(),
    }
}

/// What a Wigner method may draw on: the initial condition and model for
/// closed forms, and the already-evolved state for generic routes.
pub struct WignerInput<'a> {
    pub initial: &'a InitialCondition,
    pub params: &'a ModelParams,
    pub t: f64,
    pub evolved: &'a QubitFieldState,
}

pub struct WignerOutput {
    pub grid: WignerGrid,
    pub warnings: Vec<String>,
}

pub trait WignerMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, input: &WignerInput<'_>, grid: &GridSpec) -> Result<WignerOutput>;
}

struct Series;

impl WignerMethod for Series {
    fn name(&self) -> &'static str {
        SERIES
    }

    fn evaluate(&self, input: &WignerInput<'_>, grid: &GridSpec) -> Result<WignerOutput> {
        Ok(WignerOutput {
            grid: wigner_closed(input.initial, input.params, input.t, grid)?,
            warnings: Vec::new(),
        })
    }
}

struct DisplacedParity;

impl WignerMethod for DisplacedParity {
    fn name(&self) -> &'static str {
        DISPLACED_PARITY
    }

    fn evaluate(&self, input: &WignerInput<'_>, grid: &GridSpec) -> Result<WignerOutput> {
        let out = wigner_oracle(&reduced_density(input.evolved), grid)?;
        let mut warnings = Vec::new();
        if out.near_cutoff {
            warnings.push(format!(
                "displaced support reaches within 20% of the cutoff N = {} on part of the grid",
                input.evolved.cutoff()
            ));
        }
        Ok(WignerOutput { grid: out.grid, warnings })
    }
}

pub const SERIES: &str = "series";
pub const DISPLACED_PARITY: &str = "displaced-parity";

pub struct WignerRegistry {
    methods: BTreeMap<&'static str, Box<dyn WignerMethod>>,
}

impl WignerRegistry {
    pub fn empty() -> Self {
        Self {
            methods: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, method: Box<dyn WignerMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn WignerMethod> {
        self.methods
            .get(name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "wigner method",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

impl Default for WignerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Series));
        r.register(Box::new(DisplacedParity));
        r
    }
}
