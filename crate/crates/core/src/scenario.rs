//! Run descriptions stored as TOML.
//!
//! ```toml
//! [model]
//! delta = 0.0
//! g = 0.1
//! chi = 0.0
//! k = 2
//!
//! [initial]
//! state = "excited-coherent(sqrt(14))"
//!
//! [numerics]
//! cutoff = 350
//! propagator = "closed-form"
//! tail_tolerance = 1e-12
//!
//! [time]
//! start = 0.0
//! end = 100.0
//! steps = 2000
//!
//! [outputs]
//! series = ["sigma_z", "n_mean", "mandel_q"]
//!
//! [outputs.wigner]
//! times = [0.0, 0.28]
//! grid = "-6:6:241,-6:6:241"
//! method = "series"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolver::CLOSED_FORM;
use crate::model::ModelParams;
use crate::phase_space::{GridSpec, SERIES};
use crate::states::InitialSpec;

pub const DEFAULT_CUTOFF: usize = 350;
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelParams,
    pub initial: Initial,
    #[serde(default)]
    pub numerics: Numerics,
    pub time: TimeGrid,
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub state: InitialSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default = "default_propagator")]
    pub propagator: String,
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}

fn default_propagator() -> String {
    CLOSED_FORM.to_string()
}

fn default_tail_tolerance() -> f64 {
    DEFAULT_TAIL_TOLERANCE
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            propagator: default_propagator(),
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

/// Samples `start + i (end - start) / steps` for `i = 0..=steps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn samples(&self) -> Vec<f64> {
        let dt = (self.end - self.start) / self.steps as f64;
        (0..=self.steps)
            .map(|i| if i == self.steps { self.end } else { self.start + i as f64 * dt })
            .collect()
    }
}

/// Time-series columns, in output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    #[serde(alias = "inversion")]
    SigmaZ,
    NMean,
    MandelQ,
    Fidelity,
    #[serde(alias = "c_expectation")]
    CExpect,
    NormDrift,
}

impl Series {
    pub const ALL: [Series; 6] = [
        Series::SigmaZ,
        Series::NMean,
        Series::MandelQ,
        Series::Fidelity,
        Series::CExpect,
        Series::NormDrift,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Series::SigmaZ => "sigma_z",
            Series::NMean => "n_mean",
            Series::MandelQ => "mandel_q",
            Series::Fidelity => "fidelity",
            Series::CExpect => "c_expect",
            Series::NormDrift => "norm_drift",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerOutputs>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerOutputs {
    pub times: Vec<f64>,
    pub grid: GridSpec,
    #[serde(default = "default_method")]
    pub method: String,
}

fn default_method() -> String {
    SERIES.to_string()
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::parse("scenario", e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let s: Scenario = toml::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("scenario values are always representable")
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let k = self.model.k;
        let n = self.numerics.cutoff;
        if n < 2 * k + 2 {
            return Err(Error::Scenario(format!("numerics.cutoff = {n} must be at least 2k+2 = {}", 2 * k + 2)));
        }
        if !(self.numerics.tail_tolerance > 0.0) {
            return Err(Error::Scenario("numerics.tail_tolerance must be positive".into()));
        }
        let t = &self.time;
        if !t.start.is_finite() || !t.end.is_finite() || t.start > t.end {
            return Err(Error::Scenario(format!("time.start = {} must not exceed time.end = {}", t.start, t.end)));
        }
        if t.steps < 1 {
            return Err(Error::Scenario("time.steps must be at least 1".into()));
        }
        let wigner_empty = self.outputs.wigner.as_ref().is_none_or(|w| w.times.is_empty());
        if self.outputs.series.is_empty() && wigner_empty {
            return Err(Error::Scenario("outputs requests nothing (empty series and no wigner times)".into()));
        }
        if let Some(w) = &self.outputs.wigner {
            w.grid.validate()?;
            if w.times.iter().any(|t| !t.is_finite()) {
                return Err(Error::Scenario("outputs.wigner.times must be finite".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COLLAPSE: &str = r#"
[model]
g = 0.1
k = 2

[initial]
state = "excited-coherent(sqrt(14))"

[numerics]
cutoff = 128

[time]
start = 0.0
end = 10.0
steps = 4

[outputs]
series = ["inversion", "n_mean", "mandel_q"]

[outputs.wigner]
times = [0.0, 0.28]
grid = "-6:6:41,-6:6:41"
"#;

    #[test]
    fn parse_defaults_and_round_trip() {
        let s = Scenario::parse(COLLAPSE).unwrap();
        assert_eq!(s.model.chi, 0.0);
        assert_eq!(s.numerics.propagator, CLOSED_FORM);
        assert_eq!(s.outputs.series[0], Series::SigmaZ);
        assert_eq!(s.outputs.wigner.as_ref().unwrap().method, SERIES);
        assert_eq!(s.time.samples(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        let again = Scenario::parse(&s.emit()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn rejects_bad_configs() {
        let empty = COLLAPSE.replace(r#"series = ["inversion", "n_mean", "mandel_q"]"#, "series = []")
            .replace("times = [0.0, 0.28]", "times = []");
        assert!(matches!(Scenario::parse(&empty), Err(Error::Scenario(_))));
        let unknown = COLLAPSE.replace("g = 0.1", "g = 0.1\ngamma = 3");
        let err = Scenario::parse(&unknown).unwrap_err().to_string();
        assert!(err.contains("gamma"), "{err}");
        let small = COLLAPSE.replace("cutoff = 128", "cutoff = 5");
        assert!(Scenario::parse(&small).is_err());
        let backwards = COLLAPSE.replace("end = 10.0", "end = -1.0");
        assert!(Scenario::parse(&backwards).is_err());
        let bad_state = COLLAPSE.replace("excited-coherent(sqrt(14))", "coherent(2)");
        let err = Scenario::parse(&bad_state).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }
}
