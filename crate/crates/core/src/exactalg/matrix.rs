//! Dense matrices over the rationals.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::{denominator_lcm, format_rational, rat, Rational};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Builds from row vectors; all rows must share a length. An empty row
    /// list yields a `0 x cols` matrix only through [`RationalMatrix::zeros`].
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_rows(r).expect("rectangular literal")
    }

    pub fn column(v: &[Rational]) -> Self {
        RationalMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn row_vector(v: &[Rational]) -> Self {
        RationalMatrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |r, c| self[(idx[r], c)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self[(r, idx[c])].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                other[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|c| (0..self.rows).fold(Rational::zero(), |acc, r| acc + &v[r] * &self[(r, c)]))
            .collect()
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        (0..k).fold(Self::identity(self.rows), |acc, _| &acc * self)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// `p(A)` by Horner's scheme.
    pub fn poly_eval(&self, p: &Poly) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::identity(n).scale(c);
        }
        acc
    }

    /// Rows scaled to integers, used by the fraction-free routines.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = Rational::from_integer(denominator_lcm(row.iter()));
                row.iter().map(|v| (v * &l).to_integer()).collect()
            })
            .collect()
    }

    /// Exact rank by fraction-free (Bareiss) elimination over the integers.
    pub fn rank(&self) -> usize {
        let mut m = self.integer_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..rows {
                for k in c + 1..cols {
                    let v = &m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k];
                    m[r][k] = v / &prev;
                }
                m[r][c] = BigInt::zero();
            }
            prev = m[rank][c].clone();
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, c)].recip();
            for k in c..self.cols {
                let v = &m[(row, k)] * &inv;
                m[(row, k)] = v;
            }
            for r in 0..self.rows {
                if r == row || m[(r, c)].is_zero() {
                    continue;
                }
                let f = m[(r, c)].clone();
                for k in c..self.cols {
                    let v = &f * &m[(row, k)];
                    m[(r, k)] -= v;
                }
            }
            pivots.push(c);
            row += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the right null space, one vector per free column, with the
    /// free variable set to one.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// A particular solution of `self * x = b` (free variables zero), or
    /// `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Self::column(b));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Solves `self * X = B` column by column.
    pub fn solve_matrix(&self, b: &Self) -> Option<Self> {
        let cols: Option<Vec<Vec<Rational>>> = (0..b.cols).map(|c| self.solve(&b.col(c))).collect();
        let cols = cols?;
        Some(Self::from_fn(self.cols, b.cols, |r, c| cols[c][r].clone()))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let mut m = self.clone();
        let mut sign = Rational::one();
        let mut prev = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[(r, k)].is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    /// Orthogonal-free basis of the column space: the pivot columns.
    pub fn column_basis(&self) -> Self {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;
    fn neg(self) -> RationalMatrix {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(format_rational).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[r * self.cols + c])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::ratio;

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(RationalMatrix::identity(2).rank(), 2);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        let m = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_with_fractions() {
        let m = RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(3, 2), rat(1)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn inverse_and_det() {
        let m = RationalMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RationalMatrix::identity(2));
        let singular = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.det(), rat(0));
    }

    #[test]
    fn det_needs_pivoting() {
        let m = RationalMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 3]]);
        assert_eq!(m.det(), rat(-3));
    }

    #[test]
    fn nullspace_annihilates() {
        let m = RationalMatrix::from_i64(&[&[1, 2, 3, 4], &[0, 1, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = RationalMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(m.solve(&[rat(1), rat(2)]).is_none());
        let x = m.solve(&[rat(3), rat(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(3), rat(3)]);
    }
}
