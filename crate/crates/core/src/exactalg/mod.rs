//! Exact arithmetic over the rationals: scalars, polynomials in `s`,
//! constant and polynomial matrices, and the resolvent.

pub mod matrix;
pub mod poly;
pub mod polymatrix;
pub mod rational;
pub mod resolvent;

pub use matrix::RationalMatrix;
pub use poly::{Degree, Poly, RationalFunction};
pub use polymatrix::PolyMatrix;
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use resolvent::{
    charpoly, resolvent, resolvent_with_limit, transfer_function, Resolvent, TransferMatrix,
};

/// Exact rank of a rational matrix.
pub fn rank(m: &RationalMatrix) -> usize {
    m.rank()
}

/// Determinant of a square polynomial matrix.
pub fn det(m: &PolyMatrix) -> Poly {
    m.det()
}

/// Monic gcd of two polynomials.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    Poly::gcd(a, b)
}
