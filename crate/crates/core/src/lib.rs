//! Thermodynamics of the quantum switch.
//!
//! A system `S` passes through two unitaries `U1`, `U2` whose order is set by a
//! control qubit `C`. The crate builds the switched state, measures energy
//! changes before and after a projective measurement of the control, and
//! checks passivity. Hilbert spaces are ordered system ⊗ control throughout.

pub mod cvcase;
pub mod error;
pub mod optim;
pub mod qmat;
pub mod qubitcase;
pub mod sample;
pub mod states;
pub mod switchcore;
pub mod tolerance;

pub use error::{Error, Result};
