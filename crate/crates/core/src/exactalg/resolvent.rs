//! Resolvent `(sI - A)^{-1}` via the Faddeev-LeVerrier recurrence, and the
//! exact transfer functions built on it.

use num_traits::{One, Zero};

use super::matrix::RationalMatrix;
use super::poly::{Poly, RationalFunction};
use super::polymatrix::PolyMatrix;
use super::rational::{rat, Rational};
use crate::Error;

/// Default size cap for [`resolvent`].
pub const DEFAULT_RESOLVENT_LIMIT: usize = 64;

/// Adjugate of `sI - A` together with `det(sI - A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolvent {
    /// `adj(sI - A) = sum_k coeffs[k] s^k`, `coeffs.len() == n`.
    pub adjugate_coeffs: Vec<RationalMatrix>,
    pub charpoly: Poly,
}

impl Resolvent {
    pub fn adjugate(&self) -> PolyMatrix {
        PolyMatrix::from_coefficients(&self.adjugate_coeffs)
    }
}

pub fn resolvent(a: &RationalMatrix) -> Result<Resolvent, Error> {
    resolvent_with_limit(a, DEFAULT_RESOLVENT_LIMIT)
}

pub fn resolvent_with_limit(a: &RationalMatrix, limit: usize) -> Result<Resolvent, Error> {
    if !a.is_square() {
        return Err(Error::Dimension("resolvent of a non-square matrix".into()));
    }
    let n = a.rows();
    if n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    // M_1 = I, c_{n-1} = -tr(A); M_{k+1} = A M_k + c_{n-k} I, c_{n-k-1} = -tr(A M_{k+1}) / (k+1)
    let mut charpoly = vec![Rational::zero(); n + 1];
    charpoly[n] = Rational::one();
    let mut adj_desc = Vec::with_capacity(n);
    let mut m = RationalMatrix::identity(n);
    for k in 1..=n {
        let am = a * &m;
        let c = -am.trace() / rat(k as i64);
        let next = if k < n {
            &am + &RationalMatrix::identity(n).scale(&c)
        } else {
            RationalMatrix::zeros(0, 0)
        };
        charpoly[n - k] = c;
        adj_desc.push(std::mem::replace(&mut m, next));
    }
    adj_desc.reverse();
    Ok(Resolvent {
        adjugate_coeffs: adj_desc,
        charpoly: Poly::from_coeffs(charpoly),
    })
}

/// Characteristic polynomial `det(sI - A)`.
pub fn charpoly(a: &RationalMatrix) -> Poly {
    resolvent_with_limit(a, usize::MAX)
        .expect("square matrix")
        .charpoly
}

/// Entry-wise reduced transfer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalFunction>,
}

impl TransferMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &RationalFunction {
        &self.entries[r * self.cols + c]
    }

    /// First nonzero off-diagonal entry, if any.
    pub fn first_off_diagonal(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .find(|&(r, c)| r != c && !self.entry(r, c).is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.first_off_diagonal().is_none()
    }

    pub fn diagonal(&self) -> Vec<RationalFunction> {
        (0..self.rows.min(self.cols))
            .map(|i| self.entry(i, i).clone())
            .collect()
    }
}

/// `H(s) = C (sI - A - BF)^{-1} B G`, exact and reduced entry by entry.
pub fn transfer_function(
    a: &RationalMatrix,
    b: &RationalMatrix,
    c: &RationalMatrix,
    f: &RationalMatrix,
    g: &RationalMatrix,
) -> Result<TransferMatrix, Error> {
    let n = a.rows();
    if !a.is_square()
        || b.rows() != n
        || c.cols() != n
        || f.rows() != b.cols()
        || f.cols() != n
        || g.rows() != b.cols()
    {
        return Err(Error::Dimension(
            "inconsistent dimensions in transfer_function".into(),
        ));
    }
    let acl = a + &(b * f);
    let bg = b * g;
    let res = resolvent(&acl)?;
    let numer: Vec<RationalMatrix> = res.adjugate_coeffs.iter().map(|m| &(c * m) * &bg).collect();
    let (rows, cols) = (c.rows(), g.cols());
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for k in 0..cols {
            let num = Poly::from_coeffs(numer.iter().map(|m| m[(r, k)].clone()).collect());
            entries.push(RationalFunction::new(num, res.charpoly.clone()));
        }
    }
    Ok(TransferMatrix {
        rows,
        cols,
        entries,
    })
}
