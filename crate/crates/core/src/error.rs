use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("{op} did not converge after {sweeps} sweeps")]
    NotConverged { op: &'static str, sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("reflector {index} is degenerate (norm {norm:e})")]
    DegenerateReflector { index: usize, norm: f64 },
    #[error("matrix is not orthogonal (orthogonality error {error:e})")]
    NotOrthogonal { error: f64 },
    #[error("rank {rank} is invalid for a {rows}x{cols} projector")]
    InvalidRank { rank: usize, rows: usize, cols: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("correlation is undefined: zero variance")]
    ZeroVariance,
    #[error("training diverged at step {step}")]
    Diverged { step: usize },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
