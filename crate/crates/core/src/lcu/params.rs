use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::divdiff::worst_case_closed_forms;
use crate::error::{contract, Result};
use crate::pmr::PmrHamiltonian;

/// Largest subdivision depth `kappa` considered.
pub const MAX_KAPPA: u32 = 40;

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub eps: f64,
    pub t: f64,
    pub gamma: f64,
    pub delta_e: f64,
    pub r: usize,
    pub dt: f64,
    #[serde(rename = "Q")]
    pub q_max: usize,
    #[serde(rename = "K")]
    pub big_k: u32,
    pub kappa: u32,
    /// `delta_e / gamma` (zero when `gamma = 0`).
    pub mu: f64,
    /// `sum_{q > Q} (gamma dt)^q / q!`.
    pub tail: f64,
    /// Worst-case divided-difference error summed over orders, per step.
    pub dd_error: f64,
    /// Per-step error budget `eps / (2r)`.
    pub step_budget: f64,
}

impl SimParams {
    pub fn gamma_dt(&self) -> f64 {
        self.gamma * self.dt
    }

    /// `s = sum_{q <= Q} (gamma dt)^q / q!`.
    pub fn s(&self) -> f64 {
        partial_exp(self.q_max, self.gamma_dt())
    }

    /// A priori per-step spectral error: truncation tail plus divided-difference term.
    pub fn step_bound(&self) -> f64 {
        self.tail + self.dd_error
    }
}

/// `sum_{m <= q} x^m / m!`.
pub fn partial_exp(q: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    for m in 1..=q {
        term *= x / m as f64;
        acc += term;
    }
    acc
}

/// `sum_{m > q} x^m / m!` by direct summation.
pub fn tail(q: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for m in 1..=q + 1 {
        term *= x / m as f64;
    }
    let mut acc = 0.0;
    let mut m = q + 1;
    loop {
        acc += term;
        m += 1;
        term *= x / m as f64;
        if term <= acc * 1e-18 || term == 0.0 {
            return acc;
        }
    }
}

/// Worst-case divided-difference error summed over orders with `gamma^q` weights.
pub fn worst_case_dd_error(gamma: f64, dt: f64, de: f64, q_max: usize, big_k: u32) -> f64 {
    if de == 0.0 {
        return 0.0;
    }
    (0..=q_max)
        .map(|q| gamma.powi(q as i32) * worst_case_closed_forms(q, dt, de, big_k).error())
        .sum()
}

/// Select `r`, `dt`, `Q` and `K` for target error `eps` at time `t`.
pub fn choose_params(eps: f64, t: f64, h: &PmrHamiltonian) -> Result<SimParams> {
    params_from_norms(eps, t, h.gamma_total, h.delta_e)
}

pub fn params_from_norms(eps: f64, t: f64, gamma: f64, delta_e: f64) -> Result<SimParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(contract(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(contract(format!("t = {t} must be positive and finite")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) || !(delta_e >= 0.0 && delta_e.is_finite()) {
        return Err(contract("gamma and delta_e must be finite and nonnegative"));
    }
    let r = if gamma == 0.0 {
        1
    } else {
        ((t * gamma / LN_2).ceil() as usize).max(1)
    };
    let dt = t / r as f64;
    let budget = eps / (2.0 * r as f64);
    let x = gamma * dt;
    let mut q_max = 0;
    while tail(q_max, x) > budget {
        q_max += 1;
    }
    let mut kappa = 0u32;
    if delta_e > 0.0 {
        while (dt * delta_e).powi(2) / (2.0 * 4f64.powi(kappa as i32)) > budget {
            kappa += 1;
            if kappa > MAX_KAPPA {
                return Err(contract("no subdivision depth meets the error budget"));
            }
        }
        // A posteriori check on the equally spaced worst case.
        while worst_case_dd_error(gamma, dt, delta_e, q_max, 1 << kappa) > budget {
            kappa += 1;
            if kappa > MAX_KAPPA {
                return Err(contract("no subdivision depth meets the error budget"));
            }
        }
    }
    let big_k = 1u32 << kappa;
    Ok(SimParams {
        eps,
        t,
        gamma,
        delta_e,
        r,
        dt,
        q_max,
        big_k,
        kappa,
        mu: if gamma > 0.0 { delta_e / gamma } else { 0.0 },
        tail: tail(q_max, x),
        dd_error: worst_case_dd_error(gamma, dt, delta_e, q_max, big_k),
        step_budget: budget,
    })
}
