//! Counting lobes of a Wigner function along a circle `|alpha| = radius`.

use std::f64::consts::TAU;

use super::WignerGrid;
use crate::error::{Error, Result};

pub const LOBE_SAMPLES: usize = 720;
/// Default fraction of the circle maximum a sample must exceed.
pub const LOBE_THRESHOLD: f64 = 0.5;

/// Bilinear interpolation of `W` at `(re, im)`; `None` outside the grid.
fn interpolate(grid: &WignerGrid, re: f64, im: f64) -> Option<f64> {
    let spec = &grid.spec;
    let fx = (re - spec.re_min) / spec.d_re();
    let fy = (im - spec.im_min) / spec.d_im();
    let eps = 1e-9;
    if fx < -eps || fy < -eps || fx > (spec.n_re - 1) as f64 + eps || fy > (spec.n_im - 1) as f64 + eps {
        return None;
    }
    let i = (fx.floor().max(0.0) as usize).min(spec.n_re - 2);
    let j = (fy.floor().max(0.0) as usize).min(spec.n_im - 2);
    let tx = (fx - i as f64).clamp(0.0, 1.0);
    let ty = (fy - j as f64).clamp(0.0, 1.0);
    let w00 = grid.at(i, j);
    let w10 = grid.at(i + 1, j);
    let w01 = grid.at(i, j + 1);
    let w11 = grid.at(i + 1, j + 1);
    Some((w00 * (1.0 - tx) + w10 * tx) * (1.0 - ty) + (w01 * (1.0 - tx) + w11 * tx) * ty)
}

/// `W` at `LOBE_SAMPLES` equally spaced angles on the circle, starting on the positive real axis.
pub fn sample_circle(grid: &WignerGrid, radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("lobe radius must be positive, got {radius}")));
    }
    (0..LOBE_SAMPLES)
        .map(|j| {
            let phi = TAU * j as f64 / LOBE_SAMPLES as f64;
            interpolate(grid, radius * phi.cos(), radius * phi.sin()).ok_or_else(|| {
                Error::InvalidParameter(format!("circle of radius {radius} leaves the grid {}", grid.spec))
            })
        })
        .collect()
}

/// Number of contiguous arcs (with wrap-around) where `W > threshold * max_circle(W)`.
pub fn count_lobes(grid: &WignerGrid, radius: f64, threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!("lobe threshold must lie in (0, 1), got {threshold}")));
    }
    let samples = sample_circle(grid, radius)?;
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Ok(0);
    }
    let cut = threshold * max;
    let above: Vec<bool> = samples.iter().map(|&w| w > cut).collect();
    if above.iter().all(|&a| a) {
        return Ok(1);
    }
    let n = above.len();
    Ok((0..n).filter(|&j| above[j] && !above[(j + n - 1) % n]).count())
}
