pub mod azumaya;
pub mod coeff;
pub mod error;
pub mod grassmann;
pub mod jet_eval;
pub mod linalg;
pub mod poly;
pub mod sample;
pub mod serial;
pub mod smoothfn;
pub mod spectral;
pub mod supermatrix;

pub use coeff::{Backend, Coefficient, GaussRational};
pub use error::{Error, Result};
pub use grassmann::{merge, AlgebraSignature, GrassmannElement, MergeConvention, Monomial, Parity};
pub use supermatrix::{CharPoly, CommutationClass, SuperMatrix, DEFAULT_TOLERANCE};
pub use smoothfn::{FunctionKind, JetOracle, Jets, MPoly, MultiIndex, SmoothFunction, SuperFunction, Unary};
pub use jet_eval::{eval_even, eval_even_composition_check, TaylorOperand};
pub use spectral::{EigenData, IdempotentSystem, PrimaryDecomposition, Provenance, SpectralOptions};
pub use azumaya::{build, cinfty_hull_eval, check_admissibility_axioms, validate, AssignmentEta, CInftyHull, MapHandle, SpectralLocusReport, ValidationReport, Violation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/grassmann.md")]
    mod grassmann {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
