//! Divided differences of `f(x) = exp(-i tau x)`, their K-fold subdivision
//! approximations, and the alpha-coefficient machinery.

mod alpha;
mod approx;
mod bound;
mod exact;
mod oracle;
mod sum;

pub use alpha::{alpha_coeffs, alpha_table, for_each_ktuple, AlphaWorkspace, KTuple, Rational};
pub use approx::{
    ehat_ktuple, ehat_ktuple_with, ehat_partition, ehat_partition_with, leibniz_kfold_split,
    leibniz_kfold_split_with, mean_phase_approx, DEFAULT_TERM_BUDGET,
};
pub use bound::{
    bound_sweep, dd_error_bound, dd_error_bound_k2_variant, equally_spaced, random_gapped_inputs,
    worst_case_closed_forms, BoundRow, BoundSweep, WorstCase,
};
pub use exact::{dd_exp_exact, dd_exp_ratio};
pub use oracle::dd_exp_oracle;
pub use sum::PairwiseSum;

use serde::{Deserialize, Serialize};

/// Inputs `x_0..x_q` and time parameter `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdInput {
    pub inputs: Vec<f64>,
    pub tau: f64,
}

impl DdInput {
    pub fn new(inputs: Vec<f64>, tau: f64) -> Self {
        Self { inputs, tau }
    }

    pub fn q(&self) -> usize {
        self.inputs.len().saturating_sub(1)
    }
}

/// `ln(n!)`.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(-i)^q`.
pub fn neg_i_pow(q: usize) -> num_complex::Complex64 {
    use num_complex::Complex64;
    match q % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}
