use thiserror::Error;

/// Errors surfaced by the symbolic and numeric layers.
#[derive(Debug, Error)]
pub enum NcError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("undeclared variable {0}")]
    UndeclaredVariable(String),

    #[error("variable declarations do not match: {0}")]
    DeclMismatch(String),

    #[error("multilinearity violation: {0}")]
    Grading(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("slot {0} already occurs in the polynomial")]
    SlotCollision(usize),

    #[error("operand is not scalar-valued: {0}")]
    NotScalar(String),

    #[error("degree {got} exceeds basis cutoff {cutoff}")]
    DegreeOverflow { got: usize, cutoff: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("inverse verification failed: {0}")]
    InverseCheck(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, NcError>;
