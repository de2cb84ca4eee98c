use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::compile::{prep_gates, select_gates, AlphaMode, AncillaTally, CircuitLayout};
use super::ir::{Circuit, Gate, GateSink};
use crate::error::Result;
use crate::lcu::{lcu_weights, SimParams};
use crate::pauli::PauliHamiltonian;
use crate::pmr::{pmr_decompose, PmrHamiltonian};

/// Per-kind gate counts with macros expanded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub by_kind: BTreeMap<String, u64>,
    pub total: u64,
    /// Number of macro invocations (not included in `total`).
    pub macro_calls: u64,
}

impl GateCounts {
    pub fn get(&self, kind: &str) -> u64 {
        self.by_kind.get(kind).copied().unwrap_or(0)
    }

    fn add(&mut self, g: &Gate, times: u64) {
        if let Gate::Macro { body, .. } = g {
            self.macro_calls += times;
            for b in body {
                self.add(b, times);
            }
        } else {
            *self.by_kind.entry(g.kind().to_string()).or_default() += times;
            self.total += times;
        }
    }

    pub fn merge(&mut self, other: &GateCounts, times: u64) {
        for (k, v) in &other.by_kind {
            *self.by_kind.entry(k.clone()).or_default() += v * times;
        }
        self.total += other.total * times;
        self.macro_calls += other.macro_calls * times;
    }
}

impl GateSink for GateCounts {
    fn push(&mut self, g: Gate) {
        self.add(&g, 1);
    }
}

pub fn gate_count(c: &Circuit) -> GateCounts {
    let mut n = GateCounts::default();
    for g in &c.gates {
        n.add(g, 1);
    }
    n
}

/// Counts for one step `prep, select, prep^dagger`, computed without storing gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCounts {
    pub prep: GateCounts,
    pub select: GateCounts,
    pub step: GateCounts,
    pub qubits: usize,
    pub tally: AncillaTally,
}

pub fn count_step(h: &PmrHamiltonian, p: &SimParams, mode: AlphaMode) -> Result<StepCounts> {
    let lay = CircuitLayout::for_hamiltonian(h, p, mode);
    let mut prep = GateCounts::default();
    prep_gates(&lay.anc, &lcu_weights(h, p), &mut prep);
    let mut select = GateCounts::default();
    select_gates(h, p, &lay, &mut select)?;
    let mut step = GateCounts::default();
    step.merge(&prep, 2);
    step.merge(&select, 1);
    Ok(StepCounts {
        prep,
        select,
        step,
        qubits: lay.n_qubits,
        tally: lay.tally,
    })
}

/// Ordinary least squares `y = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit {
        intercept,
        slope,
        r_squared,
    }
}

/// One grid point of the gate-count law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "Q")]
    pub q_max: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub kappa: u32,
    /// `Q (M + kappa)`.
    pub x: f64,
    pub step_gates: u64,
    pub select_gates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCountLaw {
    pub points: Vec<GridPoint>,
    pub fit: LinearFit,
}

/// Reference family for count sweeps: `M` qubits, `H = 0.5 Z_0 + sum_i 0.3 X_i`,
/// so `M` off-diagonal terms and one diagonal term.
pub fn count_family(m: usize) -> Result<PmrHamiltonian> {
    let n = m.max(1);
    let mut labels: Vec<(String, Complex64)> = Vec::new();
    let pad = |pos: usize, ch: char| -> String {
        (0..n).map(|p| if p == pos { ch } else { 'I' }).collect()
    };
    labels.push((pad(n - 1, 'Z'), Complex64::new(0.5, 0.0)));
    for i in 0..m {
        labels.push((pad(n - 1 - i, 'X'), Complex64::new(0.3, 0.0)));
    }
    let refs: Vec<(&str, Complex64)> = labels.iter().map(|(s, c)| (s.as_str(), *c)).collect();
    pmr_decompose(&PauliHamiltonian::from_labels(&refs)?)
}

/// Count compiled per-step gates over a `{Q, M, kappa}` grid and fit them linearly in `Q (M + kappa)`.
pub fn gate_count_law(qs: &[usize], ms: &[usize], kappas: &[u32], mode: AlphaMode) -> Result<GateCountLaw> {
    let mut points = Vec::new();
    for &m in ms {
        let h = count_family(m)?;
        for &q_max in qs {
            for &kappa in kappas {
                let p = SimParams {
                    eps: 0.01,
                    t: 1.0,
                    gamma: h.gamma_total,
                    delta_e: h.delta_e,
                    r: 1,
                    dt: 0.5,
                    q_max,
                    big_k: 1 << kappa,
                    kappa,
                    mu: h.delta_e / h.gamma_total,
                    tail: 0.0,
                    dd_error: 0.0,
                    step_budget: 0.005,
                };
                let c = count_step(&h, &p, mode)?;
                points.push(GridPoint {
                    q_max,
                    m,
                    kappa,
                    x: (q_max * (m + kappa as usize)) as f64,
                    step_gates: c.step.total,
                    select_gates: c.select.total,
                });
            }
        }
    }
    let x: Vec<f64> = points.iter().map(|p| p.x).collect();
    let y: Vec<f64> = points.iter().map(|p| p.step_gates as f64).collect();
    Ok(GateCountLaw {
        fit: linear_fit(&x, &y),
        points,
    })
}
