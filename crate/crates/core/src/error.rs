use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix required to be Hermitian deviated from its adjoint by more than the tolerance.
    #[error("matrix not Hermitian: max |M - M'| = {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    /// The eigensolver did not converge; `info` is the LAPACK status code.
    #[error("Hermitian eigensolver failed to converge (lapack info = {info})")]
    NoConvergence { info: i32 },
    /// A NaN or infinity appeared where a finite value is required.
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    /// A matrix or index had the wrong size for the operation.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    DomainError(String),
    /// The truncated Fock basis cannot hold the requested state within the tail tolerance.
    #[error("cutoff {cutoff} too small for the requested state; use at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },
    /// A mixture expansion failed to converge within the term cap.
    #[error("mixture weights failed to decay within {cap} terms")]
    MethodDiverged { cap: usize },
    /// The analytic propagator only covers the resonant interaction.
    #[error("analytic propagator requires zero detuning, got {delta}")]
    ResonantOnly { delta: f64 },
    /// A time window selected too few series rows to be meaningful.
    #[error("window [{lo}, {hi}] covers {found} rows, need at least {min_rows}")]
    EmptyWindow { lo: f64, hi: f64, found: usize, min_rows: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
