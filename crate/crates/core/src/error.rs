use thiserror::Error;

use crate::coeff::Coefficient;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in different algebras or use different backends.
    #[error("structural mismatch: {0}")]
    Structure(String),

    /// Matrix or tuple dimensions disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not invertible: body determinant is {det}")]
    NotInvertible { det: Coefficient },

    #[error("parity error: {0}")]
    Parity(String),

    /// A derivative was requested where the function is not smooth or not defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomials are not coprime: common factor of degree {degree}")]
    NotCoprime { degree: usize },

    /// The exact path could not split the characteristic polynomial over ℚ.
    #[error("eigenvalues of matrix {matrix} are not rational; supply eigen hints or use the numeric backend")]
    NeedsHint { matrix: usize },

    /// Some body eigenvalue is not real.
    #[error("matrix {matrix} has a non-real body eigenvalue")]
    NonRealSpectrum { matrix: usize },

    #[error("invalid eigen data: {0}")]
    EigenData(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A construction produced something its invariants forbid.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An input document is well-formed but violates the schema at `field`.
    #[error("invalid field `{field}`: {message}")]
    Schema { field: String, message: String },
}
