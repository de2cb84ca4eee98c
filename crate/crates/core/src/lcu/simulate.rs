use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{build_u_tilde, exact_step_unitary};
use super::params::{choose_params, SimParams};
use crate::divdiff::DEFAULT_TERM_BUDGET;
use crate::error::{contract, Result};
use crate::linalg::{spectral_distance, spectral_norm, CVec, DEFAULT_DENSE_LIMIT};
use crate::pmr::PmrHamiltonian;

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub dense_limit: usize,
    pub term_budget: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dense_limit: DEFAULT_DENSE_LIMIT,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// `None` when `t = 0` and nothing was applied.
    pub params: Option<SimParams>,
    /// Measured `||U~ - exp(-i H dt)||` for one step.
    pub step_error: f64,
    /// Per-step errors, one entry per step (all steps share the same operator).
    pub step_errors: Vec<f64>,
    /// `r * step_error`.
    pub accumulated_error: f64,
    /// `r * (tail + dd error)` from the parameter choice.
    pub a_priori_bound: f64,
    /// `||U~||_2`.
    pub u_tilde_norm: f64,
    pub final_norm: f64,
}

/// Apply `U~` for `r` steps to `psi0`.
pub fn simulate(h: &PmrHamiltonian, psi0: &CVec, eps: f64, t: f64, opts: &SimOptions) -> Result<(CVec, SimReport)> {
    let dim = 1usize << h.n;
    if psi0.len() != dim {
        return Err(contract(format!(
            "state has length {} but the Hamiltonian needs {dim}",
            psi0.len()
        )));
    }
    if t == 0.0 {
        let norm = psi0.norm();
        return Ok((
            psi0.clone(),
            SimReport {
                params: None,
                step_error: 0.0,
                step_errors: vec![],
                accumulated_error: 0.0,
                a_priori_bound: 0.0,
                u_tilde_norm: 1.0,
                final_norm: norm,
            },
        ));
    }
    let p = choose_params(eps, t, h)?;
    let ut = build_u_tilde(h, &p, opts.term_budget, opts.dense_limit)?;
    let exact = exact_step_unitary(h, p.dt, opts.dense_limit)?;
    let step_error = spectral_distance(&ut, &exact)?;
    let mut psi = psi0.clone();
    for _ in 0..p.r {
        psi = &ut * psi;
    }
    let report = SimReport {
        step_error,
        step_errors: vec![step_error; p.r],
        accumulated_error: step_error * p.r as f64,
        a_priori_bound: p.step_bound() * p.r as f64,
        u_tilde_norm: spectral_norm(&ut)?,
        final_norm: psi.norm(),
        params: Some(p),
    };
    Ok((psi, report))
}

/// Parse `[[re, im], ...]` into a state vector.
pub fn state_from_pairs(v: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|p| Complex64::new(p[0], p[1])))
}

pub fn state_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliHamiltonian;
    use crate::pmr::pmr_decompose;

    #[test]
    fn rabi() {
        let om = 1.3;
        let h = pmr_decompose(&PauliHamiltonian::from_labels(&[("X", Complex64::new(om, 0.0))]).unwrap())
            .unwrap();
        let psi0 = state_from_pairs(&[[1.0, 0.0], [0.0, 0.0]]);
        let t = 3.0 / om;
        let (psi, rep) = simulate(&h, &psi0, 1e-3, t, &SimOptions::default()).unwrap();
        assert!((psi[0] - Complex64::new((om * t).cos(), 0.0)).norm() < 1e-3);
        assert!((psi[1] - Complex64::new(0.0, -(om * t).sin())).norm() < 1e-3);
        assert!(rep.accumulated_error <= 1e-3);
        let r = rep.params.unwrap().r as i32;
        assert!(rep.final_norm <= rep.u_tilde_norm.powi(r) + 1e-13);
        assert!((rep.final_norm - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn zero_time_is_identity() {
        let h = pmr_decompose(&PauliHamiltonian::from_labels(&[("X", Complex64::new(1.0, 0.0))]).unwrap())
            .unwrap();
        let psi0 = state_from_pairs(&[[0.6, 0.0], [0.0, 0.8]]);
        let (psi, _) = simulate(&h, &psi0, 1e-3, 0.0, &SimOptions::default()).unwrap();
        assert_eq!(psi, psi0);
    }
}
