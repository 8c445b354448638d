//! Named time-evolution strategies.
//!
//! Scenarios select an evolver by name; the registry maps names to
//! constructors so that new methods plug in without touching the driver.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::WithLeakage;
use crate::model::{build_h, build_h0_shifted, ModelParams};
use crate::oracle::{oracle_for, EigenOracle};
use crate::propagator::{BlockPropagator, Fault, Frame};
use crate::states::QubitFieldState;

pub trait Evolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn frame(&self) -> Frame;
    fn cutoff(&self) -> usize;
    fn evolve(&self, state: &QubitFieldState, t: f64) -> Result<WithLeakage<QubitFieldState>>;
}

/// Everything a constructor needs.
#[derive(Clone, Debug)]
pub struct EvolverConfig {
    pub params: ModelParams,
    pub frame: Frame,
    pub cutoff: usize,
    #[doc(hidden)]
    pub fault: Fault,
}

impl EvolverConfig {
    pub fn new(params: ModelParams, frame: Frame, cutoff: usize) -> Self {
        Self {
            params,
            frame,
            cutoff,
            fault: Fault::None,
        }
    }
}

pub type EvolverBuilder = fn(&EvolverConfig) -> Result<Box<dyn Evolver>>;

pub struct EvolverRegistry {
    builders: BTreeMap<&'static str, EvolverBuilder>,
}

pub const CLOSED_FORM: &str = "closed-form";
pub const EIGEN_ORACLE: &str = "eigen-oracle";

impl EvolverRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, builder: EvolverBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, name: &str, config: &EvolverConfig) -> Result<Box<dyn Evolver>> {
        let builder = self.builders.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "propagator",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        builder(config)
    }
}

impl Default for EvolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(CLOSED_FORM, ClosedForm::build);
        r.register(EIGEN_ORACLE, Eigen::build);
        r
    }
}

struct ClosedForm {
    config: EvolverConfig,
}

impl ClosedForm {
    fn build(config: &EvolverConfig) -> Result<Box<dyn Evolver>> {
        config.params.require_kerr_family()?;
        Ok(Box::new(Self { config: config.clone() }))
    }
}

impl Evolver for ClosedForm {
    fn name(&self) -> &'static str {
        CLOSED_FORM
    }

    fn frame(&self) -> Frame {
        self.config.frame
    }

    fn cutoff(&self) -> usize {
        self.config.cutoff
    }

    fn evolve(&self, state: &QubitFieldState, t: f64) -> Result<WithLeakage<QubitFieldState>> {
        let c = &self.config;
        BlockPropagator::with_fault(c.frame, &c.params, c.cutoff, t, c.fault)?.apply(state)
    }
}

struct Eigen {
    frame: Frame,
    oracle: Arc<EigenOracle>,
}

impl Eigen {
    fn build(config: &EvolverConfig) -> Result<Box<dyn Evolver>> {
        let h = match config.frame {
            Frame::CounterRotating => build_h(&config.params, config.cutoff)?,
            Frame::Rotating => build_h0_shifted(&config.params, config.cutoff)?,
        };
        Ok(Box::new(Self {
            frame: config.frame,
            oracle: oracle_for(&h)?,
        }))
    }
}

impl Evolver for Eigen {
    fn name(&self) -> &'static str {
        EIGEN_ORACLE
    }

    fn frame(&self) -> Frame {
        self.frame
    }

    fn cutoff(&self) -> usize {
        self.oracle.cutoff()
    }

    fn evolve(&self, state: &QubitFieldState, t: f64) -> Result<WithLeakage<QubitFieldState>> {
        Ok(WithLeakage {
            value: self.oracle.evolve(state, t)?,
            leakage: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::phase_align;
    use crate::states::Branch;

    #[test]
    fn registry_lists_and_rejects() {
        let r = EvolverRegistry::default();
        assert_eq!(r.names(), vec![CLOSED_FORM, EIGEN_ORACLE]);
        let cfg = EvolverConfig::new(ModelParams::kerr(0.0, 0.1, 0.0, 1), Frame::CounterRotating, 20);
        match r.build("runge-kutta", &cfg) {
            Err(Error::UnknownStrategy { available, .. }) => assert!(available.contains(CLOSED_FORM)),
            _ => panic!("expected unknown strategy"),
        }
    }

    #[test]
    fn strategies_agree() {
        let r = EvolverRegistry::default();
        for frame in [Frame::CounterRotating, Frame::Rotating] {
            let cfg = EvolverConfig::new(ModelParams::kerr(0.1, 0.1, 0.3, 1), frame, 30);
            let s = QubitFieldState::fock(Branch::Excited, 3, 30).unwrap();
            let a = r.build(CLOSED_FORM, &cfg).unwrap().evolve(&s, 2.5).unwrap().value;
            let b = r.build(EIGEN_ORACLE, &cfg).unwrap().evolve(&s, 2.5).unwrap().value;
            assert!(phase_align(&b, &a).1 < 1e-10);
        }
    }

    #[test]
    fn fault_is_detectable() {
        let mut cfg = EvolverConfig::new(ModelParams::kerr(0.0, 0.1, 0.0, 1), Frame::CounterRotating, 20);
        cfg.fault = Fault::FlipGSign;
        let r = EvolverRegistry::default();
        let s = crate::states::build_initial(
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(1.0, 0.0),
            crate::fock::FockVector::basis(20, 2).unwrap(),
            crate::fock::FockVector::basis(20, 2).unwrap(),
        )
        .unwrap();
        let a = r.build(CLOSED_FORM, &cfg).unwrap().evolve(&s, 3.0).unwrap().value;
        let b = r.build(EIGEN_ORACLE, &cfg).unwrap().evolve(&s, 3.0).unwrap().value;
        assert!(phase_align(&b, &a).1 > 1e-3);
    }
}
