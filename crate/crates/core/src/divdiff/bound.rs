use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dd_exp_exact, ehat_partition_with, factorial};
use crate::error::{contract, Result};

/// `(dt^q / q!) (dt dE / (2K))^2`.
pub fn dd_error_bound(q: usize, dt: f64, de: f64, big_k: u32) -> f64 {
    dt.powi(q as i32) / factorial(q) * (dt * de / (2.0 * big_k as f64)).powi(2)
}

/// The same bound with `K^2` inside the square; reported for comparison only.
pub fn dd_error_bound_k2_variant(q: usize, dt: f64, de: f64, big_k: u32) -> f64 {
    let k = big_k as f64;
    dt.powi(q as i32) / factorial(q) * (dt * de / (2.0 * k * k)).powi(2)
}

/// Equally spaced inputs `0, dE, 2 dE, ..., q dE`.
pub fn equally_spaced(q: usize, de: f64) -> Vec<f64> {
    (0..=q).map(|j| j as f64 * de).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub exact: Complex64,
    pub ehat: Complex64,
    /// `exact / ehat = (sin(theta)/theta)^q`, `theta = dt dE / (2K)`.
    pub ratio: f64,
}

impl WorstCase {
    pub fn error(&self) -> f64 {
        (self.exact - self.ehat).norm()
    }
}

/// Closed forms for equally spaced inputs with spacing `dE > 0`.
pub fn worst_case_closed_forms(q: usize, dt: f64, de: f64, big_k: u32) -> WorstCase {
    let qf = factorial(q);
    let k = big_k as f64;
    let half = dt * de / 2.0;
    let theta = half / k;
    let base_phase = Complex64::new(0.0, -2.0) * Complex64::from_polar(1.0, -half);
    let exact = (base_phase / de * half.sin()).powi(q as i32) / qf;
    let ehat = (base_phase * dt / (2.0 * k * theta.sin()) * half.sin()).powi(q as i32) / qf;
    let ratio = (theta.sin() / theta).powi(q as i32);
    WorstCase { exact, ehat, ratio }
}

/// Settings for a randomized check of [`dd_error_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    pub q_max: usize,
    pub ks: Vec<u32>,
    pub dt: f64,
    pub de: f64,
    pub instances: usize,
    pub seed: u64,
    pub term_budget: f64,
}

impl Default for BoundSweep {
    fn default() -> Self {
        Self {
            q_max: 6,
            ks: vec![1, 2, 4, 8],
            dt: 1.0,
            de: 1.0,
            instances: 50,
            seed: 0,
            term_budget: super::DEFAULT_TERM_BUDGET,
        }
    }
}

/// One `(q, K)` cell of a bound sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub q: usize,
    #[serde(rename = "K")]
    pub big_k: u32,
    pub bound: f64,
    /// Largest `|exact - ehat_K|` over random inputs with consecutive gaps at most `dE`.
    pub max_error: f64,
    /// `max_error / bound` (0 when both vanish).
    pub ratio: f64,
    /// Error on equally spaced inputs.
    pub worst_error: f64,
    /// Deviation of the closed-form worst case from direct evaluation.
    pub closed_form_mismatch: f64,
}

/// Inputs `x_0 = 0`, `x_{j+1} = x_j + g_j` with `g_j` uniform in `[-dE, dE]`.
pub fn random_gapped_inputs<R: Rng>(rng: &mut R, q: usize, de: f64) -> Vec<f64> {
    let mut x = vec![0.0];
    for _ in 0..q {
        let last = *x.last().unwrap();
        x.push(last + rng.gen_range(-de..=de));
    }
    x
}

pub fn bound_sweep(cfg: &BoundSweep) -> Result<Vec<BoundRow>> {
    if !(cfg.dt > 0.0 && cfg.de >= 0.0) || cfg.ks.contains(&0) {
        return Err(contract("bound sweep needs dt > 0, dE >= 0 and positive K"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for q in 1..=cfg.q_max {
        let inputs: Vec<Vec<f64>> = (0..cfg.instances).map(|_| random_gapped_inputs(&mut rng, q, cfg.de)).collect();
        for &k in &cfg.ks {
            let bound = dd_error_bound(q, cfg.dt, cfg.de, k);
            let mut max_error = 0.0f64;
            for x in &inputs {
                let e = (dd_exp_exact(x, cfg.dt)? - ehat_partition_with(x, cfg.dt, k, cfg.term_budget)?).norm();
                max_error = max_error.max(e);
            }
            let xs = equally_spaced(q, cfg.de);
            let direct = (dd_exp_exact(&xs, cfg.dt)?, ehat_partition_with(&xs, cfg.dt, k, cfg.term_budget)?);
            let closed = worst_case_closed_forms(q, cfg.dt, cfg.de, k);
            let mismatch = if cfg.de > 0.0 {
                (closed.exact - direct.0).norm().max((closed.ehat - direct.1).norm())
            } else {
                0.0
            };
            rows.push(BoundRow {
                q,
                big_k: k,
                bound,
                max_error,
                ratio: if bound > 0.0 { max_error / bound } else { 0.0 },
                worst_error: (direct.0 - direct.1).norm(),
                closed_form_mismatch: mismatch,
            });
        }
    }
    Ok(rows)
}
