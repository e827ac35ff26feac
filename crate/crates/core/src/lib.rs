//! Rigorous integration of scalar delay differential equations
//! `x'(t) = f(x(t - τ), x(t))` and computer-assisted proofs of periodic orbits.

pub mod error;
pub mod integrator;
pub mod interval;
pub mod lohner;
pub mod pnrep;
pub mod proof;
pub mod poincare;
pub mod section_finder;
pub mod taylor;

pub use error::{Error, Result};
