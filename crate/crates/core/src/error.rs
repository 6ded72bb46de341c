use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KsError {
    #[error("grid needs at least 4 cells, got {0}")]
    InvalidGrid(usize),

    #[error("{kind} is undefined at u = {value:e} (admissible: {domain})")]
    Domain {
        kind: &'static str,
        domain: &'static str,
        value: f64,
    },

    #[error("tridiagonal elimination hit pivot {pivot:e} at row {row}")]
    Pivot { row: usize, pivot: f64 },

    #[error("Neumann problem is incompatible: mass of u is {mass}, expected {expected}")]
    Compatibility { mass: f64, expected: f64 },

    #[error("{0} is not one of the critical nonlinearities 1/u, 1/(1+u)")]
    NotCritical(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = KsError> = std::result::Result<T, E>;
