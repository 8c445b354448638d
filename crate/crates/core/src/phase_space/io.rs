//! Text output of Wigner grids.

use std::fmt::Write as _;
use std::path::Path;

use super::WignerGrid;
use crate::error::Result;

/// `re,im,W` with one line per grid point, imaginary axis outermost.
pub fn csv_string(grid: &WignerGrid) -> String {
    let spec = &grid.spec;
    let mut out = String::with_capacity(grid.values.len() * 72 + 8);
    out.push_str("re,im,W\n");
    for j in 0..spec.n_im {
        for i in 0..spec.n_re {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", spec.re(i), spec.im(j), grid.at(i, j));
        }
    }
    out
}

pub fn write_csv(grid: &WignerGrid, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(grid))?;
    Ok(())
}

/// Plain (P2) graymap, top row at `im_max`. Gray levels map `W` linearly:
/// `gray = round(255 (W - w_min) / (w_max - w_min))`, recorded in the header.
pub fn pgm_string(grid: &WignerGrid) -> String {
    let spec = &grid.spec;
    let lo = grid.min();
    let hi = grid.max();
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    let _ = writeln!(out, "P2");
    let _ = writeln!(
        out,
        "# grid re_min={:.16e} re_max={:.16e} n_re={} im_min={:.16e} im_max={:.16e} n_im={}",
        spec.re_min, spec.re_max, spec.n_re, spec.im_min, spec.im_max, spec.n_im
    );
    let _ = writeln!(out, "# gray = round(255 * (W - w_min) / (w_max - w_min))");
    let _ = writeln!(out, "# w_min={lo:.16e} w_max={hi:.16e}");
    let _ = writeln!(out, "{} {}", spec.n_re, spec.n_im);
    let _ = writeln!(out, "255");
    for j in (0..spec.n_im).rev() {
        let row: Vec<String> = (0..spec.n_re)
            .map(|i| (((grid.at(i, j) - lo) / span * 255.0).round() as u8).to_string())
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn write_pgm(grid: &WignerGrid, path: &Path) -> Result<()> {
    std::fs::write(path, pgm_string(grid))?;
    Ok(())
}
