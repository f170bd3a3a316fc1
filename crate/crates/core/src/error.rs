use thiserror::Error;

/// Failures raised by constructions and contractions in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("site tensor breaks the Z2 gauge symmetry (violation {0:e})")]
    GaugeViolation(f64),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("null operator")]
    NullOperator,
    #[error("null state: normalization vanishes")]
    NullState,
    #[error("iterative eigensolver did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("numerical integrity: eigenvalue {0:e} below tolerance")]
    NegativeEigenvalue(f64),
    #[error("thermodynamic formula unreliable: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
