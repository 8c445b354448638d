//! Closed-form Wigner series built from the block scalars and the kernel `mu`.
//!
//! With `r1..r4` the four amplitude sums
//!
//! ```text
//! r1(s) = sum_n c_n     E_{n-k} conj(F_{n-k})     mu(alpha, n,   s)
//! r2(s) = sum_n c_{n+k} E_n G_n sqrt((n+k)!/n!)   mu(alpha, n,   s)
//! r3(s) = sum_n d_n     E_n G_n sqrt((n+k)!/n!)   mu(alpha, n+k, s)
//! r4(s) = sum_n d_n     E_n F_n                   mu(alpha, n,   s)
//! ```
//!
//! the Wigner function is `exp(-|alpha|^2) / (pi N_eg^2) sum_s (-1)^s (|a_e r1 + a_g r3|^2 + |a_e r2 + a_g r4|^2)`,
//! the grouped form of the expansion in `|r_i|^2` and `Re[a_e conj(a_g) (r1 conj(r3) + r2 conj(r4))]`.
//!
//! The `s` sum runs past the Fock cutoff: displacing a state supported on
//! `n <= n_top` by `alpha` spreads it to roughly `(sqrt(n_top) + |alpha|)^2`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{GridSpec, WignerGrid};
use crate::error::Result;
use crate::fock;
use crate::model::ModelParams;
use crate::propagator::efg;
use crate::states::InitialCondition;

/// How `mu(alpha, n, s)` is obtained for `n < s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuRoute {
    /// Three-term recurrence along each diagonal `n - s = const`, using
    /// `mu(alpha, n, s) = conj(mu(-alpha, s, n))` below the main diagonal.
    Recurrence,
    /// Point-wise evaluation with the literal negative Laguerre superscript
    /// below the main diagonal. Slow; kept as a cross-check.
    Direct,
}

/// Amplitudes entering the four `r` sums at one time.
#[derive(Clone, Debug)]
pub struct SeriesCoefficients {
    pub k: usize,
    pub alpha_e: C64,
    pub alpha_g: C64,
    pub n_eg: f64,
    pub r1: Vec<C64>,
    pub r2: Vec<C64>,
    pub r3: Vec<C64>,
    pub r4: Vec<C64>,
    /// Highest `n` with a non-negligible coefficient in any sum.
    pub n_top: usize,
}

/// Coefficients below this magnitude are treated as zero.
const SUPPORT_THRESHOLD: f64 = 1e-20;

impl SeriesCoefficients {
    pub fn new(ic: &InitialCondition, params: &ModelParams, t: f64) -> Result<Self> {
        params.require_kerr_family()?;
        let k = params.k;
        let cutoff = ic.cutoff();
        let (c, d) = (ic.c.amps(), ic.d.amps());
        let zero = C64::new(0.0, 0.0);
        let mut r1 = vec![zero; cutoff + 1];
        let mut r2 = vec![zero; cutoff + 1];
        let mut r3 = vec![zero; cutoff + 1];
        let mut r4 = vec![zero; cutoff + 1];
        for n in 0..=cutoff {
            let ni = n as i64;
            let low = efg(ni - k as i64, t, params);
            let here = efg(ni, t, params);
            let eg = here.e * here.g * fock::sqrt_shifted_product(ni, k);
            r1[n] = c[n] * low.e * low.f.conj();
            r2[n] = if n + k <= cutoff { c[n + k] * eg } else { zero };
            r3[n] = d[n] * eg;
            r4[n] = d[n] * here.e * here.f;
        }
        let top = |v: &[C64]| v.iter().rposition(|z| z.norm() > SUPPORT_THRESHOLD).unwrap_or(0);
        let n_top = [top(&r1), top(&r2), top(&r3), top(&r4)].into_iter().max().unwrap_or(0);
        Ok(Self {
            k,
            alpha_e: ic.alpha_e,
            alpha_g: ic.alpha_g,
            n_eg: ic.n_eg(),
            r1,
            r2,
            r3,
            r4,
            n_top,
        })
    }

    /// Rows of the `mu` table needed: `n <= n_top + k` (the `r3` sum is shifted).
    fn rows(&self) -> usize {
        self.n_top + self.k + 1
    }
}

/// Upper end of the `s` sum for a state supported on `n < rows` at `|alpha|`.
pub(crate) fn s_limit(rows: usize, radius: f64) -> usize {
    let r = (rows as f64).sqrt() + radius + 6.0;
    (r * r).ceil() as usize
}

/// `exp(-|alpha|^2/2) mu(alpha, n, s)` for `n < rows`, `s <= s_max`,
/// stored at `s * rows + n`.
fn fill_mu_recurrence(alpha: C64, rows: usize, s_max: usize, table: &mut Vec<C64>) {
    table.clear();
    table.resize(rows * (s_max + 1), C64::new(0.0, 0.0));
    let x = alpha.norm_sqr();
    let scale = (-x / 2.0).exp();
    // Upper triangle (n >= s) from alpha, lower (n < s) from -alpha, conjugated.
    for (beta, conj, d_range) in [(alpha, false, 0..rows), (-alpha, true, 1..s_max + 1)] {
        let bc = beta.conj();
        let mut head = C64::new(scale, 0.0);
        for d in 0..d_range.end {
            if d > 0 {
                head *= bc / (d as f64).sqrt();
            }
            if d < d_range.start {
                continue;
            }
            // Along the diagonal, the smaller index p runs over 0.. and the
            // larger one is p + d.
            let p_max = if conj {
                (rows - 1).min(s_max - d)
            } else {
                (rows - 1 - d).min(s_max)
            };
            let df = d as f64;
            let mut prev = C64::new(0.0, 0.0);
            let mut cur = head;
            for p in 0..=p_max {
                let (n, s) = if conj { (p, p + d) } else { (p + d, p) };
                table[s * rows + n] = if conj { cur.conj() } else { cur };
                let pf = p as f64;
                let next = if p == 0 {
                    cur * (1.0 + df - x) / (df + 1.0).sqrt()
                } else {
                    (cur * (2.0 * pf + 1.0 + df - x) - prev * (pf * (pf + df)).sqrt())
                        / ((pf + 1.0) * (pf + df + 1.0)).sqrt()
                };
                prev = cur;
                cur = next;
            }
        }
    }
}

fn fill_mu_direct(alpha: C64, rows: usize, s_max: usize, table: &mut Vec<C64>) -> Result<()> {
    table.clear();
    table.resize(rows * (s_max + 1), C64::new(0.0, 0.0));
    let scale = (-alpha.norm_sqr() / 2.0).exp();
    for s in 0..=s_max {
        for n in 0..rows {
            let m = if n >= s {
                fock::mu(alpha, n, s)
            } else {
                fock::mu_negative_superscript(alpha, n, s)?
            };
            table[s * rows + n] = m * scale;
        }
    }
    Ok(())
}

fn point_value(co: &SeriesCoefficients, alpha: C64, route: MuRoute, table: &mut Vec<C64>) -> Result<f64> {
    let rows = co.rows();
    let s_max = s_limit(rows, alpha.norm());
    match route {
        MuRoute::Recurrence => fill_mu_recurrence(alpha, rows, s_max, table),
        MuRoute::Direct => fill_mu_direct(alpha, rows, s_max, table)?,
    }
    let k = co.k;
    let top = co.n_top;
    let mut total = 0.0;
    for s in 0..=s_max {
        let row = &table[s * rows..(s + 1) * rows];
        let mut r = [C64::new(0.0, 0.0); 4];
        for n in 0..=top {
            let mu_n = row[n];
            r[0] += co.r1[n] * mu_n;
            r[1] += co.r2[n] * mu_n;
            r[2] += co.r3[n] * row[n + k];
            r[3] += co.r4[n] * mu_n;
        }
        let e = co.alpha_e * r[0] + co.alpha_g * r[2];
        let g = co.alpha_e * r[1] + co.alpha_g * r[3];
        let term = e.norm_sqr() + g.norm_sqr();
        if s % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total / (std::f64::consts::PI * co.n_eg * co.n_eg))
}

pub fn wigner_closed_with(
    ic: &InitialCondition,
    params: &ModelParams,
    t: f64,
    grid: &GridSpec,
    route: MuRoute,
) -> Result<WignerGrid> {
    grid.validate()?;
    let co = SeriesCoefficients::new(ic, params, t)?;
    let values = (0..grid.len())
        .into_par_iter()
        .map_init(Vec::new, |table, idx| point_value(&co, grid.point(idx), route, table))
        .collect::<Result<Vec<f64>>>()?;
    Ok(WignerGrid { spec: *grid, values })
}

/// Closed-form Wigner function of the field at time `t` (counter-rotating evolution).
pub fn wigner_closed(ic: &InitialCondition, params: &ModelParams, t: f64, grid: &GridSpec) -> Result<WignerGrid> {
    wigner_closed_with(ic, params, t, grid, MuRoute::Recurrence)
}
