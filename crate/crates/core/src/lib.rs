//! Numerics for SU(1,1) number coherent states.
//!
//! The crate builds truncated discrete-series representations of su(1,1),
//! displaces excited Fock states with the group displacement operator, uses
//! the resulting states to diagonalize the general coherence-preserving
//! Hamiltonian, and specializes everything to the non-degenerate parametric
//! amplifier through the two-mode oscillator realization.
//!
//! Every closed formula has an independent numerical route next to it
//! (matrix exponential, conjugation, eigensolve, quadrature, finite
//! differences); [`verify`] runs those comparisons as a suite.

pub mod algebra;
pub mod amplifier;
pub mod displacement;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod output;
pub mod special;
pub mod verify;

pub use algebra::{BargmannIndex, StateVector, TruncatedRep};
pub use displacement::{DisplacementParams, PncsResult};
pub use dynamics::{Su11Hamiltonian, TiltResult};
pub use error::{Error, Result};

pub use num_complex::Complex64;
