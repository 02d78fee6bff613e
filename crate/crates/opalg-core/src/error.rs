//! Error type shared by every module in the crate.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix orders do not agree.
    DimMismatch { left: usize, right: usize },
    /// A constructor received NaN or infinite entries.
    NonFinite,
    /// An iterative factorization did not converge within its cap.
    NoConvergence { iterations: usize },
    /// Adjacent Schur swap requested across a numerically equal-but-distinct
    /// eigenvalue pair with large coupling.
    IllConditionedSwap {
        index: usize,
        first: Complex64,
        second: Complex64,
    },
    /// Input failed the idempotency check `‖e² − e‖_F ≤ tol`.
    NotIdempotent { residual: f64 },
    /// The operation has no meaning for the zero matrix.
    ZeroMatrix,
    /// A matrix required to be invertible is numerically singular.
    Singular,
    /// A map required to be bijective has rank-deficient operator matrix.
    NotBijective,
    /// Eigenvalues within boundary tolerance of the region boundary.
    BoundaryAmbiguous { eigenvalues: Vec<Complex64> },
    /// The projection is not invariant under the matrix: `‖xp − pxp‖_F` too large.
    NotInvariant { residual: f64 },
    /// The grid does not cover the spectrum with the required margin.
    GridCoverage { eigenvalue: Complex64 },
    /// Matrix-unit transport found no usable column.
    Degenerate,
    /// Malformed arguments.
    Usage(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::NonFinite => write!(f, "non-finite entries"),
            Error::NoConvergence { iterations } => {
                write!(
                    f,
                    "factorization failed to converge after {iterations} iterations"
                )
            }
            Error::IllConditionedSwap {
                index,
                first,
                second,
            } => write!(
                f,
                "ill-conditioned eigenvalue swap at position {index}: {first} vs {second}"
            ),
            Error::NotIdempotent { residual } => {
                write!(f, "idempotency violation: residual {residual:e}")
            }
            Error::ZeroMatrix => write!(f, "zero matrix has no invertible normalizer"),
            Error::Singular => write!(f, "matrix is numerically singular"),
            Error::NotBijective => write!(f, "map is not bijective"),
            Error::BoundaryAmbiguous { eigenvalues } => write!(
                f,
                "{} eigenvalue(s) within boundary tolerance of the region boundary",
                eigenvalues.len()
            ),
            Error::NotInvariant { residual } => {
                write!(f, "projection is not invariant: residual {residual:e}")
            }
            Error::GridCoverage { eigenvalue } => {
                write!(f, "grid does not cover eigenvalue {eigenvalue} with margin")
            }
            Error::Degenerate => write!(f, "matrix-unit transport degenerated"),
            Error::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for Error {}
