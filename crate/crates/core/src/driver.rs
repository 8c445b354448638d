//! Runs scenarios and writes their data files.
//!
//! Every file is produced by one writer after all values are computed, so the
//! bytes depend only on the scenario and the crate version.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolver::{Evolver, EvolverConfig, EvolverRegistry, CLOSED_FORM};
use crate::fidelity::{fidelity_closed, fidelity_pure_vs_state};
use crate::model::ModelParams;
use crate::observables::{expect_diagonal_direct, first_local_min, mandel_q_from_moments, BlockScalars, DiagonalObservable};
use crate::phase_space::{reduced_density, write_csv, write_pgm, WignerInput, WignerRegistry};
use crate::propagator::Frame;
use crate::scenario::{Scenario, Series};
use crate::states::{InitialCondition, InitialSpec, QubitFieldState};

pub const TIMESERIES: &str = "timeseries.csv";
pub const META: &str = "run.meta";
pub const SUMMARY: &str = "summary.csv";

/// Values at one sample time. Unrequested entries are left at `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub sigma_z: Option<f64>,
    pub n_mean: Option<f64>,
    /// `Some(None)` when requested but undefined (`<n>` near zero).
    pub mandel_q: Option<Option<f64>>,
    pub fidelity: Option<f64>,
    pub c_expect: Option<f64>,
    pub norm_drift: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub samples: Vec<Sample>,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub tail_exceeded: bool,
    pub suggested_cutoff: usize,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    version: &'a str,
    propagator: &'a str,
    cutoff: usize,
    tail_mass: f64,
    tail_exceeded: bool,
    suggested_cutoff: usize,
    warnings: &'a [String],
}

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// The `wigner_t<value>` stem for a snapshot time.
pub fn snapshot_stem(t: f64) -> String {
    format!("wigner_t{t}")
}

struct Context {
    ic: InitialCondition,
    params: ModelParams,
    evolver: Box<dyn Evolver>,
    closed: bool,
}

impl Context {
    fn evolve(&self, t: f64) -> Result<QubitFieldState> {
        Ok(self.evolver.evolve(&self.ic.state(), t)?.value)
    }

    fn sample(&self, wanted: &[Series], t: f64) -> Result<Sample> {
        let want = |s| wanted.contains(&s);
        let needs_moments = want(Series::SigmaZ) || want(Series::NMean) || want(Series::MandelQ) || want(Series::CExpect);
        let needs_state =
            want(Series::NormDrift) || (!self.closed && (needs_moments || want(Series::Fidelity)));
        let state = if needs_state { Some(self.evolve(t)?) } else { None };

        let (mut sz, mut n1, mut n2) = (0.0, 0.0, 0.0);
        if needs_moments {
            let sz_obs = DiagonalObservable::sigma_z();
            let n1_obs = DiagonalObservable::number_power(1);
            let n2_obs = DiagonalObservable::number_power(2);
            if self.closed {
                let b = BlockScalars::new(&self.params, self.ic.cutoff(), t)?;
                sz = b.expect(&self.ic, &sz_obs);
                n1 = b.expect(&self.ic, &n1_obs);
                n2 = b.expect(&self.ic, &n2_obs);
            } else {
                let s = state.as_ref().expect("state evolved");
                sz = expect_diagonal_direct(s, &sz_obs);
                n1 = expect_diagonal_direct(s, &n1_obs);
                n2 = expect_diagonal_direct(s, &n2_obs);
            }
        }
        let fidelity = if want(Series::Fidelity) {
            Some(if self.closed {
                fidelity_closed(&self.ic, &self.params, t)?
            } else {
                let phi = self.ic.separable_field().expect("checked before the run");
                fidelity_pure_vs_state(phi, &reduced_density(state.as_ref().expect("state evolved")))?
            })
        } else {
            None
        };
        let k = self.params.k as f64;
        Ok(Sample {
            t,
            sigma_z: want(Series::SigmaZ).then_some(sz),
            n_mean: want(Series::NMean).then_some(n1),
            mandel_q: want(Series::MandelQ).then(|| mandel_q_from_moments(n1, n2)),
            fidelity,
            c_expect: want(Series::CExpect).then_some(n1 - 0.5 * k * sz),
            norm_drift: state.as_ref().map(|s| s.norm_sqr() - self.ic.state().norm_sqr()).filter(|_| want(Series::NormDrift)),
        })
    }
}

fn timeseries_csv(wanted: &[Series], samples: &[Sample]) -> String {
    let mut out = String::from("t");
    for s in Series::ALL.iter().filter(|s| wanted.contains(s)) {
        out.push(',');
        out.push_str(s.column());
    }
    out.push('\n');
    for row in samples {
        out.push_str(&format_number(row.t));
        let cells = [
            row.sigma_z,
            row.n_mean,
            row.mandel_q.map(|q| q.unwrap_or(f64::NAN)),
            row.fidelity,
            row.c_expect,
            row.norm_drift,
        ];
        for (series, cell) in Series::ALL.iter().zip(cells) {
            if wanted.contains(series) {
                out.push(',');
                out.push_str(&format_number(cell.unwrap_or(f64::NAN)));
            }
        }
        out.push('\n');
    }
    out
}

/// Runs a scenario and writes its files into `out_dir`.
pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<RunOutput> {
    run_with(scenario, out_dir, &EvolverRegistry::default(), &WignerRegistry::default())
}

pub fn run_with(
    scenario: &Scenario,
    out_dir: &Path,
    evolvers: &EvolverRegistry,
    wigners: &WignerRegistry,
) -> Result<RunOutput> {
    scenario.validate()?;
    let params = scenario.model.clone();
    let n = scenario.numerics.cutoff;
    let realized = scenario
        .initial
        .state
        .realize(n, params.k, scenario.numerics.tail_tolerance)?;
    let mut warnings = Vec::new();
    if realized.tail_exceeded {
        warnings.push(format!(
            "initial tail mass {:.3e} exceeds tolerance {:.1e} at cutoff N = {n}; suggested cutoff N >= {}",
            realized.tail_mass, scenario.numerics.tail_tolerance, realized.suggested_cutoff
        ));
    }
    let ic = realized.condition;
    let wanted = &scenario.outputs.series;
    if wanted.contains(&Series::Fidelity) && ic.separable_field().is_none() {
        return Err(Error::Scenario(
            "fidelity output needs a product initial state (equal field states or a single qubit branch)".into(),
        ));
    }
    let config = EvolverConfig::new(params.clone(), Frame::CounterRotating, n);
    let evolver = evolvers.build(&scenario.numerics.propagator, &config)?;
    let closed = scenario.numerics.propagator == CLOSED_FORM;
    let ctx = Context {
        ic,
        params,
        evolver,
        closed,
    };
    let wigner_method = match &scenario.outputs.wigner {
        Some(w) if !w.times.is_empty() => Some(wigners.get(&w.method)?),
        _ => None,
    };

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let mut samples = Vec::new();
    if !wanted.is_empty() {
        samples = scenario
            .time
            .samples()
            .into_par_iter()
            .map(|t| ctx.sample(wanted, t))
            .collect::<Result<Vec<_>>>()?;
        let path = out_dir.join(TIMESERIES);
        fs::write(&path, timeseries_csv(wanted, &samples))?;
        files.push(path);
    }

    if let (Some(method), Some(w)) = (wigner_method, &scenario.outputs.wigner) {
        for &t in &w.times {
            let evolved = ctx.evolve(t)?;
            let input = WignerInput {
                initial: &ctx.ic,
                params: &ctx.params,
                t,
                evolved: &evolved,
            };
            let out = method.evaluate(&input, &w.grid)?;
            for msg in out.warnings {
                warnings.push(format!("t = {t}: {msg}"));
            }
            let stem = snapshot_stem(t);
            let csv = out_dir.join(format!("{stem}.csv"));
            let pgm = out_dir.join(format!("{stem}.pgm"));
            write_csv(&out.grid, &csv)?;
            write_pgm(&out.grid, &pgm)?;
            files.push(csv);
            files.push(pgm);
        }
    }

    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION"),
        propagator: ctx.evolver.name(),
        cutoff: n,
        tail_mass: realized.tail_mass,
        tail_exceeded: realized.tail_exceeded,
        suggested_cutoff: realized.suggested_cutoff,
        warnings: &warnings,
    };
    let path = out_dir.join(META);
    fs::write(&path, toml::to_string(&meta).expect("meta serializes"))?;
    files.push(path);

    Ok(RunOutput {
        samples,
        files,
        warnings,
        tail_exceeded: realized.tail_exceeded,
        suggested_cutoff: realized.suggested_cutoff,
    })
}

/// Parameters a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Gamma,
    K,
    G,
    Chi,
    Delta,
    Cutoff,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma" => Axis::Gamma,
            "k" => Axis::K,
            "g" => Axis::G,
            "chi" => Axis::Chi,
            "delta" => Axis::Delta,
            "cutoff" => Axis::Cutoff,
            other => {
                return Err(Error::parse(
                    "sweep axis",
                    format!("unknown axis '{other}' (expected gamma, k, g, chi, delta or cutoff)"),
                ))
            }
        })
    }
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Gamma => "gamma",
            Axis::K => "k",
            Axis::G => "g",
            Axis::Chi => "chi",
            Axis::Delta => "delta",
            Axis::Cutoff => "cutoff",
        }
    }

    fn integer(value: f64, what: &str) -> Result<usize> {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::Scenario(format!("{what} must be a non-negative integer, got {value}")))
        }
    }

    /// A copy of `template` with this axis set to `value`.
    pub fn apply(self, template: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = template.clone();
        match self {
            Axis::Gamma => {
                let g = num_complex::Complex64::new(value, 0.0);
                s.initial.state = match s.initial.state {
                    InitialSpec::ExcitedCoherent(_) => InitialSpec::ExcitedCoherent(g),
                    InitialSpec::GroundCoherent(_) => InitialSpec::GroundCoherent(g),
                    InitialSpec::Superposition { alpha_e, alpha_g, .. } => InitialSpec::Superposition {
                        alpha_e,
                        alpha_g,
                        gamma_e: g,
                        gamma_g: g,
                    },
                    InitialSpec::Fock(..) => {
                        return Err(Error::Scenario("a gamma sweep needs a coherent initial state".into()))
                    }
                };
            }
            Axis::K => s.model.k = Self::integer(value, "k")?,
            Axis::G => s.model.g = value,
            Axis::Chi => s.model.chi = value,
            Axis::Delta => s.model.delta = value,
            Axis::Cutoff => s.numerics.cutoff = Self::integer(value, "cutoff")?,
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub dir: PathBuf,
    /// First local minimum of Mandel Q as `(t, Q)`.
    pub first_min: Option<(f64, f64)>,
    pub warnings: Vec<String>,
}

/// Sub-directory name for one sweep value.
pub fn sweep_dir_name(axis: Axis, value: f64) -> String {
    format!("{}={value}", axis.name())
}

/// Runs `template` once per value, concurrently, and writes `summary.csv`.
/// Mandel Q is added to the requested series so the summary is always defined.
pub fn sweep(template: &Scenario, axis: Axis, values: &[f64], out_dir: &Path) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Scenario("sweep needs at least one value".into()));
    }
    let mut base = template.clone();
    if !base.outputs.series.contains(&Series::MandelQ) {
        base.outputs.series.push(Series::MandelQ);
    }
    let scenarios = values
        .iter()
        .map(|&v| axis.apply(&base, v))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out_dir)?;
    let points = values
        .par_iter()
        .zip(scenarios.par_iter())
        .map(|(&value, s)| {
            let dir = out_dir.join(sweep_dir_name(axis, value));
            let out = run(s, &dir)?;
            let (times, q): (Vec<f64>, Vec<f64>) = out
                .samples
                .iter()
                .map(|r| (r.t, r.mandel_q.flatten().unwrap_or(f64::NAN)))
                .unzip();
            Ok(SweepPoint {
                value,
                dir,
                first_min: first_local_min(&times, &q),
                warnings: out.warnings,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = format!("{},t_min,q_min\n", axis.name());
    for p in &points {
        let (t, q) = p.first_min.unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(csv, "{},{},{}", format_number(p.value), format_number(t), format_number(q));
    }
    fs::write(out_dir.join(SUMMARY), csv)?;
    Ok(points)
}

/// Parses `a,b,c` or an inclusive range `start:stop:step`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::parse("values", format!("'{}' is not a number", s.trim())))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse("values", "range must be start:stop:step"));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || b < a {
            return Err(Error::parse("values", "range needs step > 0 and stop >= start"));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize;
        // Round to the step's decimal places so 2.0:4.0:0.1 yields 2.1, not 2.1000000000000001.
        let decimals = parts[2].trim().split('.').nth(1).map_or(0, str::len) as i32;
        let scale = 10f64.powi(decimals.max(parts[0].trim().split('.').nth(1).map_or(0, str::len) as i32));
        return Ok((0..=count).map(|i| ((a + i as f64 * h) * scale).round() / scale).collect());
    }
    let values = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(num)
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::parse("values", "empty list"));
    }
    Ok(values)
}

/// Replaces the outputs of `scenario` with Wigner snapshots only.
pub fn wigner_only(scenario: &Scenario, times: Vec<f64>, grid: crate::phase_space::GridSpec, method: Option<String>) -> Scenario {
    let mut s = scenario.clone();
    let method = method
        .or_else(|| s.outputs.wigner.as_ref().map(|w| w.method.clone()))
        .unwrap_or_else(|| crate::phase_space::SERIES.to_string());
    s.outputs.series.clear();
    s.outputs.wigner = Some(crate::scenario::WignerOutputs { times, grid, method });
    s
}
