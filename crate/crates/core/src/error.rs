use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |h - h^dagger| = {max_dev:e})")]
    NotHermitian { max_dev: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "full backend needs {factors} Hilbert factors (joint dimension {}), cap is {cap} factors",
        dim_text(*.dim)
    )]
    CapExceeded { factors: usize, dim: usize, cap: usize },

    #[error("numerical integrity lost at step {step}: minimum eigenvalue {min_eig:e}")]
    Integrity { step: usize, min_eig: f64 },

    #[error("steady state not reached: last drift {drift:e}")]
    NotConverged { drift: f64 },

    #[error("thermodynamic ledger violated at step {step}: {what}")]
    Ledger { step: usize, what: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("trajectory has no state snapshots")]
    MissingSnapshots,
}

/// Joint dimensions saturate at `usize::MAX`.
fn dim_text(dim: usize) -> String {
    if dim == usize::MAX {
        format!("over {}", usize::MAX)
    } else {
        dim.to_string()
    }
}
