//! Parameter selection, dense LCU operators and amplitude amplification.

mod oaa;
mod operators;
mod params;
mod simulate;
mod weights;

pub use oaa::{
    branch_unitary, build_oaa_operator, hop_factor, prep_unitary, reflection, select_operator,
    OaaOperators, DEFAULT_OAA_LIMIT,
};
pub use operators::{build_u_series_exact, build_u_tilde, build_v, build_v_ratio, exact_step_unitary};
pub use params::{
    choose_params, params_from_norms, partial_exp, tail, worst_case_dd_error, SimParams, MAX_KAPPA,
};
pub use simulate::{simulate, state_from_pairs, state_to_pairs, SimOptions, SimReport};
pub use weights::{lcu_weights, weights_from, AncillaLayout, Branch, LcuWeights};

pub use crate::linalg::spectral_distance;
