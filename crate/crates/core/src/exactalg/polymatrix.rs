//! Matrices of polynomials in `s`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use super::matrix::RationalMatrix;
use super::poly::{Degree, Poly};
use super::rational::Rational;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    pub fn constant(m: &RationalMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |r, c| Poly::constant(m[(r, c)].clone()))
    }

    /// `s * e - a` for constant matrices of equal shape.
    pub fn pencil(e: &RationalMatrix, a: &RationalMatrix) -> Self {
        assert_eq!((e.rows(), e.cols()), (a.rows(), a.cols()));
        Self::from_fn(e.rows(), e.cols(), |r, c| {
            Poly::from_coeffs(vec![-a[(r, c)].clone(), e[(r, c)].clone()])
        })
    }

    /// `sI - a`.
    pub fn resolvent_pencil(a: &RationalMatrix) -> Self {
        Self::pencil(&RationalMatrix::identity(a.rows()), a)
    }

    /// `sum_k coeffs[k] s^k`.
    pub fn from_coefficients(coeffs: &[RationalMatrix]) -> Self {
        let (rows, cols) = coeffs.first().map_or((0, 0), |m| (m.rows(), m.cols()));
        Self::from_fn(rows, cols, |r, c| {
            Poly::from_coeffs(coeffs.iter().map(|m| m[(r, c)].clone()).collect())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |r, c| self[(idx[r], c)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self[(r, idx[c])].clone())
    }

    pub fn row_degree(&self, r: usize) -> Degree {
        (0..self.cols)
            .map(|c| self[(r, c)].degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn col_degree(&self, c: usize) -> Degree {
        (0..self.rows)
            .map(|r| self[(r, c)].degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn max_degree(&self) -> Degree {
        self.data
            .iter()
            .map(Poly::degree)
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Coefficient matrix of `s^k`.
    pub fn coefficient(&self, k: usize) -> RationalMatrix {
        RationalMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].coeff(k))
    }

    pub fn eval(&self, x: &Rational) -> RationalMatrix {
        RationalMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].eval(x))
    }

    /// Row highest-order coefficient matrix for the declared row degrees.
    pub fn high_row_coeff(&self, row_degrees: &[usize]) -> Result<RationalMatrix, Error> {
        assert_eq!(row_degrees.len(), self.rows);
        for (r, &d) in row_degrees.iter().enumerate() {
            if self.row_degree(r) > Degree::Finite(d) {
                return Err(Error::DegreeExceeded {
                    index: r,
                    declared: d,
                });
            }
        }
        Ok(RationalMatrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].coeff(row_degrees[r])
        }))
    }

    /// Column highest-order coefficient matrix for the declared column degrees.
    pub fn high_col_coeff(&self, col_degrees: &[usize]) -> Result<RationalMatrix, Error> {
        assert_eq!(col_degrees.len(), self.cols);
        for (c, &d) in col_degrees.iter().enumerate() {
            if self.col_degree(c) > Degree::Finite(d) {
                return Err(Error::DegreeExceeded {
                    index: c,
                    declared: d,
                });
            }
        }
        Ok(RationalMatrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].coeff(col_degrees[c])
        }))
    }

    /// True when the highest column coefficient matrix at the actual column
    /// degrees has full column rank.
    pub fn is_column_reduced(&self) -> bool {
        let degs: Option<Vec<usize>> = (0..self.cols)
            .map(|c| self.col_degree(c).finite())
            .collect();
        match degs {
            None => false,
            Some(d) => self.high_col_coeff(&d).expect("actual degrees").rank() == self.cols,
        }
    }

    /// Monic gcd of the entries of row `r`.
    pub fn row_gcd(&self, r: usize) -> Poly {
        (0..self.cols).fold(Poly::zero(), |g, c| Poly::gcd(&g, &self[(r, c)]))
    }

    /// Determinant by fraction-free elimination over `Q[s]`; every division
    /// is exact.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = Poly::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[(r, k)].is_zero()) else {
                return Poly::zero();
            };
            if p != k {
                for c in 0..n {
                    m.data.swap(p * n + c, k * n + c);
                }
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&m[(k, k)] * &m[(i, j)]) - &(&m[(i, k)] * &m[(k, j)]);
                    m[(i, j)] = v.exact_div(&prev).expect("Bareiss division is exact");
                }
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    pub fn mul_constant_left(&self, a: &RationalMatrix) -> Self {
        (&PolyMatrix::constant(a)) * self
    }

    pub fn mul_constant_right(&self, a: &RationalMatrix) -> Self {
        self * &PolyMatrix::constant(a)
    }
}

impl Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (r, c): (usize, usize)) -> &Poly {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Poly {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        PolyMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(Poly::zero(), |acc, k| {
                let a = &self[(r, k)];
                let b = &rhs[(k, c)];
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        })
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::rat;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn det_of_jordan_pencil() {
        let m = PolyMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) | (1, 1) => Poly::s(),
            (0, 1) => Poly::one(),
            _ => Poly::zero(),
        });
        assert_eq!(m.det(), p(&[0, 0, 1]));
    }

    #[test]
    fn det_matches_charpoly_of_companion() {
        // companion of s^3 - 2s + 5
        let a = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[-5, 2, 0]]);
        assert_eq!(PolyMatrix::resolvent_pencil(&a).det(), p(&[5, -2, 0, 1]));
    }

    #[test]
    fn high_coefficients() {
        let m = PolyMatrix::from_fn(1, 2, |_, c| if c == 0 { p(&[1, 0, 1]) } else { p(&[0, 2]) });
        assert_eq!(
            m.high_row_coeff(&[2]).unwrap(),
            RationalMatrix::from_i64(&[&[1, 0]])
        );
        assert!(matches!(
            m.high_row_coeff(&[1]),
            Err(Error::DegreeExceeded { .. })
        ));
        let col = PolyMatrix::from_fn(2, 1, |r, _| if r == 0 { Poly::s() } else { Poly::one() });
        assert_eq!(
            col.high_col_coeff(&[1]).unwrap(),
            RationalMatrix::from_i64(&[&[1], &[0]])
        );
        let z = PolyMatrix::zeros(1, 1);
        assert_eq!(z.high_col_coeff(&[0]).unwrap(), RationalMatrix::zeros(1, 1));
        assert_eq!(z.high_row_coeff(&[3]).unwrap(), RationalMatrix::zeros(1, 1));
    }

    #[test]
    fn row_gcd_of_common_factor() {
        let m = PolyMatrix::from_fn(1, 2, |_, c| if c == 0 { p(&[0, 1, 1]) } else { p(&[0, 2]) });
        assert_eq!(m.row_gcd(0), p(&[0, 1]));
        assert_eq!(m.eval(&rat(1)), RationalMatrix::from_i64(&[&[2, 2]]));
    }
}
