//! Simulation toolkit for Hamiltonians in permutation matrix representation.
//!
//! * [`pauli`] and [`pmr`]: Pauli-string Hamiltonians and their decomposition
//!   into diagonal-times-permutation form.
//! * [`divdiff`]: divided differences of the exponential and their subdivision
//!   approximations.
//! * [`lcu`]: parameter selection and dense LCU / amplitude-amplification operators.
//! * [`circuit`]: gate-level compilation, evaluation and counting.
//! * [`models`]: benchmark Hamiltonians and resource estimates.

#![allow(clippy::needless_range_loop)]

pub mod circuit;
pub mod divdiff;
pub mod error;
pub mod lcu;
pub mod linalg;
pub mod models;
pub mod pauli;
pub mod pmr;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pauli::{Mask, PauliHamiltonian, PauliTerm};
pub use pmr::{DiagonalOperator, PmrHamiltonian, PmrTerm};
