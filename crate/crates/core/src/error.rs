use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants split roughly into two families: malformed input (shapes, labels,
/// schemas) and violated mathematical preconditions (a relation that is not a
/// partial function, an operator that is not self-adjoint, ...). The CLI maps
/// the latter to exit code 1 and the former to exit code 2, see
/// [`Error::is_input_error`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("duplicate atom label `{0}`")]
    DuplicateLabel(String),

    #[error("atom `{label}` has invalid dimension {dim}")]
    InvalidDimension { label: String, dim: usize },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("quantum set mismatch: {0}")]
    SetMismatch(String),

    #[error("not a subset: {0}")]
    NotSubset(String),

    #[error("not a partial function (coinjectivity residual {residual:.3e})")]
    NotPartialFunction { residual: f64 },

    #[error("not a function (coinjectivity residual {coinjective:.3e}, cosurjectivity residual {cosurjective:.3e})")]
    NotFunction { coinjective: f64, cosurjective: f64 },

    #[error("not injective (residual {residual:.3e})")]
    NotInjective { residual: f64 },

    #[error("operator is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("operator on atom `{label}` is not a projection (residual {residual:.3e})")]
    NotProjection { label: String, residual: f64 },

    #[error("generator images do not form a *-homomorphism (residual {residual:.3e})")]
    NotHomomorphism { residual: f64 },

    #[error("invalid fission: {0}")]
    InvalidFission(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coloring family: {0}")]
    InvalidFamily(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for malformed input, false for a failed mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ShapeMismatch { .. }
                | Error::EmptyInput(_)
                | Error::NonFinite { .. }
                | Error::InvalidTolerance(_)
                | Error::DuplicateLabel(_)
                | Error::InvalidDimension { .. }
                | Error::UnknownAtom(_)
                | Error::InvalidGraph(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
