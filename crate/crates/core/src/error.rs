use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-Hermitian input: term {term} has coefficient {coeff} but its adjoint requires {expected}")]
    NonHermitian {
        term: String,
        coeff: String,
        expected: String,
    },

    #[error("operation needs {required} qubits but the dense limit is {limit}")]
    DenseLimit { required: usize, limit: usize },

    #[error("term budget exceeded: {what} needs {count} terms, budget is {budget}; try a larger eps or a smaller time")]
    Budget {
        what: String,
        count: f64,
        budget: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical range exceeded: {0}")]
    Range(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("gate `{gate}` is not basis-preserving")]
    NotBasisPreserving { gate: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
