//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} fermionic sites")]
    DimensionMismatch { left: usize, right: usize },

    #[error("site {site} out of range for an algebra with {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("algebra with {0} sites exceeds the supported maximum of 16")]
    TooManySites(usize),

    #[error("nilpotent exponential requires a vanishing scalar part (found {0})")]
    NonzeroScalarPart(Complex64),

    #[error("generator of the derivation must have even parity")]
    OddGenerator,

    #[error("star exponential did not converge after {terms} terms (last term norm {norm:.3e})")]
    NonConvergence { terms: usize, norm: f64 },

    #[error("matrix is not antisymmetric: max |α + αᵀ| entry is {0:.3e}")]
    NotAntisymmetric(f64),

    #[error("matrix is not square: {rows} rows vs {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("singular linear system in normal-order decomposition")]
    SingularSystem,

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("incompatible bosonic representations")]
    RepresentationMismatch,

    #[error("transformed generators are not of odd parity; substitution is undefined")]
    OddParityLost,

    #[error("element does not fit in an algebra with {target} sites")]
    NotRestrictable { target: usize },

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("bosonic token `{0}` is not available in a pure fermionic session")]
    BosonicTokenInFermionicSession(String),

    #[error("unknown suite `{0}` (expected fermionic, covariance, oscillator, susy or all)")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
