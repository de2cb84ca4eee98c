//! Gate-level compilation of the LCU step, evaluators and gate counting.
//!
//! Qubit order: system qubits first, then the LCU ancillas in the order of
//! [`AncillaLayout`](crate::lcu::AncillaLayout), then the s-counter and the
//! weight-unit workspace.

mod compile;
mod count;
mod eval;
mod ir;
mod qasm;
mod text;
mod verify;

pub use compile::{
    bits_for, compile_alpha_search_forward, compile_alpha_unit, compile_diag_phase, compile_select,
    compile_state_prep, compile_step, select_gates, AlphaMode, AlphaRegs, AncillaTally, CircuitLayout,
    CompiledStep, MemberRegs, SearchRegs, WALSH_SUPPORT_LIMIT,
};
pub use count::{
    count_family, count_step, gate_count, gate_count_law, linear_fit, GateCountLaw, GateCounts, GridPoint,
    LinearFit, StepCounts,
};
pub use eval::{apply_gate, restricted_matrix, run_dense, run_reversible, run_state, DEFAULT_CIRCUIT_DENSE_LIMIT};
pub use ir::{inverse_gates, Circuit, Gate, GateSink, Register, RegisterAlloc};
pub use qasm::to_qasm;
pub use text::{from_text, to_text};
pub use verify::{alpha_sweep, compiled_operators, search_outputs, AlphaSweep, CompiledOperators};
