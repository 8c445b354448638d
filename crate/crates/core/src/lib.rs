//! Closed-form dynamics of the counter-rotating multiphoton and Kerr
//! Jaynes-Cummings family on a truncated Fock space.

pub mod driver;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod phase_space;
pub mod evolver;
pub mod propagator;
pub mod scenario;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
