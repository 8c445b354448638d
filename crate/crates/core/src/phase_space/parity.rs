//! Wigner function as the expectation of the displaced parity operator,
//! evaluated without the Laguerre kernel.
//!
//! With `alpha = |alpha| e^{i theta}`, `R = e^{i theta n}` and `T = diag(i^n)`,
//! the displacement factors as `D^dagger(alpha) = R T exp(i |alpha| X) T^dagger R^dagger`
//! where `X = a + a^dagger` is real, symmetric and tridiagonal. Diagonalizing
//! `X = V diag(lambda) V^T` once on a padded space gives every displacement on
//! the grid; the diagonal phases `R T` drop out of `|<s|D^dagger|v>|^2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::series::s_limit;
use super::{FieldDensity, GridSpec, WignerGrid};
use crate::error::Result;

pub struct OracleWigner {
    pub grid: WignerGrid,
    /// Some grid point has `|alpha|^2 + <n>` above 80% of the cutoff.
    pub near_cutoff: bool,
}

/// Components of `rho` with weight below this are skipped.
const WEIGHT_FLOOR: f64 = 1e-14;

pub fn wigner_oracle(rho: &FieldDensity, grid: &GridSpec) -> Result<OracleWigner> {
    grid.validate()?;
    let dim = rho.matrix().nrows();
    let eig = rho.matrix().clone().symmetric_eigen();
    let comps: Vec<(f64, DVector<C64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(w, _)| w.abs() > WEIGHT_FLOOR)
        .map(|(w, v)| (*w, v.into_owned()))
        .collect();

    let support = (0..dim)
        .rev()
        .find(|&n| rho.matrix()[(n, n)].re.abs() > 1e-40)
        .unwrap_or(0)
        + 1;
    let r_max = grid.max_radius();
    let padded = {
        let r = (dim as f64).sqrt() + r_max + 12.0;
        ((r * r).ceil() as usize).max(dim + 1)
    };
    let mut x = DMatrix::<f64>::zeros(padded, padded);
    for n in 0..padded - 1 {
        let v = ((n + 1) as f64).sqrt();
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    let xe = x.symmetric_eigen();
    let v = xe.eigenvectors;
    let lambda = xe.eigenvalues;
    // Only the first `dim` columns of V^T act on the input vectors.
    let vt_in = v.rows(0, dim).transpose();

    let mean_n = rho.mean_photons();
    let near_cutoff = (0..grid.len()).any(|i| grid.point(i).norm_sqr() + mean_n > 0.8 * (dim - 1) as f64);

    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let alpha = grid.point(idx);
            let radius = alpha.norm();
            let theta = alpha.arg();
            let s_max = s_limit(support, radius).min(padded - 1);
            let mut w = 0.0;
            for (weight, comp) in &comps {
                // z = T^dagger R^dagger v
                let z: Vec<C64> = comp
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a * C64::from_polar(1.0, -(n as f64) * (theta + std::f64::consts::FRAC_PI_2)))
                    .collect();
                let y: Vec<C64> = (0..padded)
                    .map(|m| {
                        let col = vt_in.row(m);
                        let dot: C64 = col.iter().zip(&z).map(|(v, z)| z * *v).sum();
                        dot * C64::from_polar(1.0, radius * lambda[m])
                    })
                    .collect();
                let mut acc = 0.0;
                for s in 0..=s_max {
                    let row = v.row(s);
                    let u: C64 = row.iter().zip(&y).map(|(v, y)| y * *v).sum();
                    if s % 2 == 0 {
                        acc += u.norm_sqr();
                    } else {
                        acc -= u.norm_sqr();
                    }
                }
                w += weight * acc;
            }
            w / std::f64::consts::PI
        })
        .collect();
    Ok(OracleWigner {
        grid: WignerGrid { spec: *grid, values },
        near_cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{self, FockVector};

    #[test]
    fn vacuum_gaussian() {
        let rho = FieldDensity::pure(&FockVector::basis(40, 0).unwrap());
        let grid = GridSpec::square(3.0, 13).unwrap();
        let w = wigner_oracle(&rho, &grid).unwrap();
        for idx in 0..grid.len() {
            let want = (-2.0 * grid.point(idx).norm_sqr()).exp() / std::f64::consts::PI;
            assert!((w.grid.values[idx] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn single_photon_negative_at_origin() {
        let rho = FieldDensity::pure(&FockVector::basis(20, 1).unwrap());
        let grid = GridSpec::square(1.0, 3).unwrap();
        let w = wigner_oracle(&rho, &grid).unwrap();
        assert!((w.grid.at(1, 1) + 1.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn coherent_gaussian_and_cutoff_flag() {
        let c = fock::coherent_amplitudes(C64::new(1.0, -2.0), 60);
        let rho = FieldDensity::pure(&c);
        let grid = GridSpec::square(5.0, 11).unwrap();
        let w = wigner_oracle(&rho, &grid).unwrap();
        for idx in 0..grid.len() {
            let a = grid.point(idx) - C64::new(1.0, -2.0);
            let want = (-2.0 * a.norm_sqr()).exp() / std::f64::consts::PI;
            assert!((w.grid.values[idx] - want).abs() < 1e-10);
        }
        assert!(w.near_cutoff);
        let small = wigner_oracle(&rho, &GridSpec::square(1.0, 3).unwrap()).unwrap();
        assert!(!small.near_cutoff);
    }
}
