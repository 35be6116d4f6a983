//! Conditional phase gates in a cavity: a six-level atom driven by two
//! classical fields and coupled to three quantised modes.
//!
//! The crate evolves the joint atom–field system, extracts the conditional
//! Kraus field operators for each atomic detection outcome, checks them
//! against the closed-form resonant solution, and certifies the three-qubit
//! phase gate, its CCNOT composition and an EPR-generating jump branch.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fock;
pub mod gates;
pub mod model;
pub mod propagator;

pub use error::{CpsError, Result};
pub use fock::{AtomLevel, FockLabel, FockSpace, ModeId};
pub use model::{build_hamiltonian, PhysParams};
pub use propagator::{extract_kraus, propagate, FieldOperator, KrausSet};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

/// Largest entry modulus of a complex matrix.
pub fn max_abs<R, C, S>(m: &nalgebra::Matrix<C64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, C>,
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
