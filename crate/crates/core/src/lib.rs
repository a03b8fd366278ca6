//! Exact synthesis of diagonal decoupling controllers for nonsquare
//! state-space systems by state feedback with a singular input
//! transformation.
//!
//! The crate is layered: [`exactalg`] and [`paramalg`] provide exact
//! rational and parametric algebra, [`canonical`] brings a system to its
//! pencil form, [`admissible`] enumerates the finite search space,
//! [`squaring`] handles a single configuration, [`decouple`] drives the
//! search and [`zeros`] reports the fixed poles.

pub mod admissible;
pub mod canonical;
pub mod decouple;
pub mod exactalg;
pub mod paramalg;
pub mod squaring;
pub mod zeros;

use paramalg::ParamId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("entry degree exceeds declared degree {declared} at index {index}")]
    DegreeExceeded { index: usize, declared: usize },
    #[error("matrix of size {n} exceeds the limit {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("the pair (A, B) is not controllable (rank {rank} < {n})")]
    NotControllable { rank: usize, n: usize },
    #[error("B does not have full column rank")]
    RankDeficientInput,
    #[error("inconsistent constraint: {0}")]
    Inconsistent(String),
    #[error("no value for parameter {0}")]
    MissingParameter(ParamId),
    #[error("the decoupling matrix is singular")]
    SingularBstar,
    #[error("closed loop entry ({row}, {col}) is {entry}, expected {expected}")]
    VerificationFailed {
        row: usize,
        col: usize,
        entry: String,
        expected: String,
    },
    #[error("target polynomial has degree {got}, expected {expected}")]
    TargetDegreeMismatch { expected: usize, got: usize },
    #[error("no invertible completion of the basis matrix")]
    SingularQ,
    #[error("feedback row system has no solution")]
    NotSolvable,
    #[error("determinant of the numerator matrix is identically zero")]
    DegenerateNumerator,
    #[error("{0}")]
    NoSolutionWithinScope(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
