//! Benchmark Hamiltonians and resource estimates.
//!
//! Both generators return the Pauli form and its PMR decomposition with the
//! identity part removed; the removed constant is kept in
//! [`ModelHamiltonian::dropped_constant`].

mod dipolar;
mod report;
mod rydberg;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pauli::{PauliHamiltonian, PauliSum};
use crate::pmr::{pmr_decompose, PmrHamiltonian};

pub use dipolar::{dipolar_jwt_hamiltonian, Boundary, DipolarSpec};
pub use report::{
    format_table, resource_report, ModelFamily, ResourceReport, ResourceSummary, ScalingFit, SlopeFits,
};
pub use rydberg::{rydberg_hamiltonian, Geometry, RydbergSpec, TRAP_SIDE};

/// A generated model in both representations.
#[derive(Debug, Clone)]
pub struct ModelHamiltonian {
    pub pauli: PauliHamiltonian,
    pub pmr: PmrHamiltonian,
    /// Identity coefficient removed from both forms.
    pub dropped_constant: f64,
}

/// Pauli-string baseline cost figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliBaseline {
    /// Non-identity terms after merging.
    pub m_prime: usize,
    /// Sum of their coefficient magnitudes.
    pub gamma_prime: f64,
}

pub fn pauli_baseline(h: &PauliHamiltonian) -> PauliBaseline {
    let ops = h.terms.iter().filter(|t| t.x_mask != 0 || t.z_mask != 0);
    PauliBaseline {
        m_prime: ops.clone().count(),
        gamma_prime: ops.map(|t| t.coeff.norm()).sum(),
    }
}

fn finish(n: usize, mut sum: PauliSum) -> Result<ModelHamiltonian> {
    let dropped = sum.terms.remove(&(0, 0)).map(|c| c.re).unwrap_or(0.0);
    let pauli = sum.into_hamiltonian(n)?;
    let pmr = pmr_decompose(&pauli)?;
    Ok(ModelHamiltonian {
        pauli,
        pmr,
        dropped_constant: dropped,
    })
}
