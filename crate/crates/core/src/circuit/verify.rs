//! Checks of compiled circuits against the dense LCU operators.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::compile::{compile_alpha_unit, compile_step, AlphaMode, CircuitLayout};
use super::eval::{restricted_matrix, run_dense, run_reversible};
use super::ir::Circuit;
use crate::divdiff::{alpha_coeffs, for_each_ktuple, KTuple};
use crate::error::{contract, Error, Result};
use crate::lcu::{AncillaLayout, SimParams};
use crate::linalg::{kron, CMat};
use crate::pauli::{Mask, PauliHamiltonian};
use crate::pmr::{pmr_decompose, PmrHamiltonian};

/// Dense matrices of a compiled step on the system-plus-LCU-ancilla space, with
/// every other work qubit held at zero.
#[derive(Debug, Clone)]
pub struct CompiledOperators {
    pub n_low: usize,
    /// Preparation on the ancilla space only.
    pub b: CMat,
    /// Select restricted to zero work qubits.
    pub select: CMat,
    /// `B^dagger select B` with `B` extended by the system identity.
    pub w: CMat,
}

/// Restrict the preparation circuit to the low qubits (it acts nowhere else).
fn low_circuit(c: &Circuit, n_low: usize) -> Circuit {
    Circuit {
        n_qubits: n_low,
        registers: c.registers.iter().filter(|r| r.offset + r.width <= n_low).cloned().collect(),
        gates: c.gates.clone(),
    }
}

pub fn compiled_operators(h: &PmrHamiltonian, p: &SimParams, mode: AlphaMode, limit: usize) -> Result<CompiledOperators> {
    let step = compile_step(h, p, mode)?;
    let anc = step.layout.anc;
    let n_low = anc.n_total();
    if n_low > limit {
        return Err(Error::DenseLimit {
            required: n_low,
            limit,
        });
    }
    let select = restricted_matrix(&step.select, n_low, limit)?;
    let full_b = run_dense(&low_circuit(&step.prep, n_low), limit)?;
    // Qubits 0..n_sys are the low bits, so the full matrix is B (x) I_sys in index order.
    let ds = 1usize << anc.n_sys;
    let na = anc.n_ancilla();
    let mut b = CMat::zeros(1 << na, 1 << na);
    for c in 0..(1usize << na) {
        for r in 0..(1usize << na) {
            b[(r, c)] = full_b[(r * ds, c * ds)];
        }
    }
    let bj = kron(&b, &CMat::identity(ds, ds));
    let w = bj.adjoint() * &select * &bj;
    Ok(CompiledOperators { n_low, b, select, w })
}

/// Result of an exhaustive weight-unit sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    pub mode: AlphaMode,
    pub q_max: usize,
    pub kappa: u32,
    pub cases: usize,
    /// Largest deviation between decoded and rational weights.
    pub max_error: f64,
    /// Inputs whose output bitstring differed from the input.
    pub dirty: usize,
}

fn probe_hamiltonian() -> Result<PmrHamiltonian> {
    pmr_decompose(&PauliHamiltonian::from_labels(&[
        ("Z", Complex64::new(1.0, 0.0)),
        ("X", Complex64::new(1.0, 0.0)),
    ])?)
}

/// Run the weight unit on every branch `(q <= Q, k in [K]^q)` and every position
/// `s <= Q`, decoding `alpha_s` from the phase on a one-qubit `Z` probe.
pub fn alpha_sweep(q_max: usize, kappa: u32, mode: AlphaMode) -> Result<AlphaSweep> {
    let h = probe_hamiltonian()?;
    let anc = AncillaLayout::new(1, q_max, 1, kappa, false);
    let lay = CircuitLayout::new(anc, true, mode);
    if lay.n_qubits > crate::pauli::MAX_QUBITS {
        return Err(contract("weight unit exceeds the basis-state width"));
    }
    let big_k = 1u32 << kappa;
    let delta = 0.1;
    let units: Vec<Circuit> = (0..=q_max)
        .map(|s| compile_alpha_unit(&h, &lay, (s > 0).then(|| lay.q.bit(s - 1)), delta))
        .collect();
    let mut cases = 0;
    let mut max_error = 0.0f64;
    let mut dirty = 0;
    for q in 0..=q_max {
        let mut err = None;
        for_each_ktuple(q, big_k, |k| {
            let kt = match KTuple::new(k.to_vec(), big_k) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            let want = alpha_coeffs(&kt);
            let iq = vec![0usize; q];
            let code = anc.codeword(&iq, k, &[]) << anc.n_sys;
            for (s, unit) in units.iter().enumerate() {
                let expect = if s <= q { want.alpha[s].to_f64().unwrap() } else { 0.0 };
                for z in [0 as Mask, 1] {
                    let input = code | z | 1 << lay.counter.bit(s);
                    let (out, ph) = match run_reversible(unit, input) {
                        Ok(v) => v,
                        Err(e) => {
                            err = Some(e);
                            return;
                        }
                    };
                    if out != input {
                        dirty += 1;
                    }
                    let sgn = if z == 1 { -1.0 } else { 1.0 };
                    let got = -ph.arg() / (delta * sgn);
                    max_error = max_error.max((got - expect).abs()).max((ph.norm() - 1.0).abs());
                    cases += 1;
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(AlphaSweep {
        mode,
        q_max,
        kappa,
        cases,
        max_error,
        dirty,
    })
}

/// Forward search outputs `(lmin, lmax, occupancy at lmin, occupancy at lmax, lmax > lmin)`
/// for a basis input; block labels are 1-based.
pub fn search_outputs(k: &[u32], q_max: usize, kappa: u32, s: usize) -> Result<(usize, usize, usize, usize, bool)> {
    use super::compile::{compile_alpha_search_forward, AlphaRegs};
    if k.len() > q_max || s > q_max {
        return Err(contract("tuple or position exceeds Q"));
    }
    let anc = AncillaLayout::new(1, q_max, 1, kappa, false);
    let lay = CircuitLayout::new(anc, true, AlphaMode::BinarySearch);
    let c = compile_alpha_search_forward(&lay)?;
    let code = anc.codeword(&vec![0; k.len()], k, &[]) << anc.n_sys;
    let (out, _) = run_reversible(&c, code | 1 << lay.counter.bit(s))?;
    let Some(AlphaRegs::Search(r)) = &lay.alpha else { unreachable!() };
    let val = |reg: &super::ir::Register| -> usize {
        (0..reg.width).map(|j| ((out >> reg.bit(j) & 1) as usize) << j).sum()
    };
    Ok((val(&r.l) + 1, val(&r.h) + 1, val(&r.bl) - 1, val(&r.bh) - 1, out >> r.f & 1 == 1))
}
