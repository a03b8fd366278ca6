//! Matrices of affine forms, and polynomial matrices in `s` whose
//! coefficients are affine forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use super::{collect_params, Assignment, ConstraintSet, LinearForm, ParamId};
use crate::exactalg::{Degree, Poly, PolyMatrix, Rational, RationalMatrix};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamMatrix {
    rows: usize,
    cols: usize,
    data: Vec<LinearForm>,
}

impl ParamMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ParamMatrix {
            rows,
            cols,
            data: vec![LinearForm::zero(); rows * cols],
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LinearForm,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ParamMatrix { rows, cols, data }
    }

    pub fn constant(m: &RationalMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |r, c| {
            LinearForm::constant(m[(r, c)].clone())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LinearForm {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LinearForm) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[LinearForm] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<LinearForm>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(LinearForm::is_zero)
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        collect_params(&self.data)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    /// `a * self` for a constant matrix `a`.
    pub fn mul_left(&self, a: &RationalMatrix) -> Self {
        assert_eq!(a.cols(), self.rows, "product dimension mismatch");
        Self::from_fn(a.rows(), self.cols, |r, c| {
            let mut acc = LinearForm::zero();
            for k in 0..self.rows {
                let w = &a[(r, k)];
                if !w.is_zero() && !self.get(k, c).is_zero() {
                    acc = &acc + &self.get(k, c).scale(w);
                }
            }
            acc
        })
    }

    /// `self * a` for a constant matrix `a`.
    pub fn mul_right(&self, a: &RationalMatrix) -> Self {
        self.transpose().mul_left(&a.transpose()).transpose()
    }

    pub fn apply(&self, cs: &ConstraintSet) -> Self {
        ParamMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|f| cs.apply(f)).collect(),
        }
    }

    pub fn instantiate(&self, assignment: &Assignment) -> Result<RationalMatrix, Error> {
        let vals: Result<Vec<Rational>, Error> =
            self.data.iter().map(|f| f.eval(assignment)).collect();
        let vals = vals?;
        Ok(RationalMatrix::from_fn(self.rows, self.cols, |r, c| {
            vals[r * self.cols + c].clone()
        }))
    }
}

impl fmt::Display for ParamMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Polynomial in `s` with affine-form coefficients, trimmed of identically
/// zero leading forms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    coeffs: Vec<LinearForm>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(mut coeffs: Vec<LinearForm>) -> Self {
        while coeffs.last().is_some_and(LinearForm::is_zero) {
            coeffs.pop();
        }
        ParamPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[LinearForm] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> LinearForm {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Structural degree: highest power whose coefficient is not the zero
    /// form.
    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn apply(&self, cs: &ConstraintSet) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|f| cs.apply(f)).collect())
    }

    pub fn instantiate(&self, assignment: &Assignment) -> Result<Poly, Error> {
        let c: Result<Vec<Rational>, Error> =
            self.coeffs.iter().map(|f| f.eval(assignment)).collect();
        Ok(Poly::from_coeffs(c?))
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})s")?,
                _ => write!(f, "({c})s^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamPolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ParamPoly>,
}

impl ParamPolyMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ParamPoly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ParamPolyMatrix { rows, cols, data }
    }

    /// `sum_k coeffs[k] s^k`.
    pub fn from_coefficients(coeffs: &[ParamMatrix]) -> Self {
        let (rows, cols) = coeffs.first().map_or((0, 0), |m| (m.rows(), m.cols()));
        Self::from_fn(rows, cols, |r, c| {
            ParamPoly::from_coeffs(coeffs.iter().map(|m| m.get(r, c).clone()).collect())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &ParamPoly {
        &self.data[r * self.cols + c]
    }

    pub fn row_degree(&self, r: usize) -> Degree {
        (0..self.cols)
            .map(|c| self.get(r, c).degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn col_degree(&self, c: usize) -> Degree {
        (0..self.rows)
            .map(|r| self.get(r, c).degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn is_row_zero(&self, r: usize) -> bool {
        self.row_degree(r) == Degree::NegInfinity
    }

    /// Coefficient forms of row `r` at powers strictly above `k`.
    pub fn row_forms_above(&self, r: usize, k: usize) -> Vec<LinearForm> {
        (0..self.cols)
            .flat_map(|c| self.get(r, c).coeffs().iter().skip(k + 1).cloned())
            .filter(|f| !f.is_zero())
            .collect()
    }

    pub fn high_row_coeff(&self, row_degrees: &[usize]) -> Result<ParamMatrix, Error> {
        assert_eq!(row_degrees.len(), self.rows);
        for (r, &d) in row_degrees.iter().enumerate() {
            if self.row_degree(r) > Degree::Finite(d) {
                return Err(Error::DegreeExceeded {
                    index: r,
                    declared: d,
                });
            }
        }
        Ok(ParamMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).coeff(row_degrees[r])
        }))
    }

    pub fn high_col_coeff(&self, col_degrees: &[usize]) -> Result<ParamMatrix, Error> {
        assert_eq!(col_degrees.len(), self.cols);
        for (c, &d) in col_degrees.iter().enumerate() {
            if self.col_degree(c) > Degree::Finite(d) {
                return Err(Error::DegreeExceeded {
                    index: c,
                    declared: d,
                });
            }
        }
        Ok(ParamMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).coeff(col_degrees[c])
        }))
    }

    pub fn apply(&self, cs: &ConstraintSet) -> Self {
        ParamPolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p.apply(cs)).collect(),
        }
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        collect_params(self.data.iter().flat_map(|p| p.coeffs().iter()))
    }

    pub fn instantiate(&self, assignment: &Assignment) -> Result<PolyMatrix, Error> {
        let polys: Result<Vec<Poly>, Error> = self
            .data
            .iter()
            .map(|p| p.instantiate(assignment))
            .collect();
        let polys = polys?;
        Ok(PolyMatrix::from_fn(self.rows, self.cols, |r, c| {
            polys[r * self.cols + c].clone()
        }))
    }
}

impl fmt::Display for ParamPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Values of the substituted parameters of `cs` implied by `free`, merged
/// with `free` itself.
pub fn complete_assignment(cs: &ConstraintSet, free: &Assignment) -> Result<Assignment, Error> {
    let mut out = free.clone();
    let implied: Result<BTreeMap<ParamId, Rational>, Error> = cs
        .substitutions()
        .map(|(p, f)| f.eval(free).map(|v| (*p, v)))
        .collect();
    out.extend(implied?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn instantiate_reports_first_missing() {
        let x = ParamId::q(1, 1, 1);
        let y = ParamId::q(2, 1, 1);
        let m = ParamMatrix::from_fn(1, 2, |_, c| LinearForm::param(if c == 0 { y } else { x }));
        let a: Assignment = [(x, rat(1))].into_iter().collect();
        assert_eq!(m.instantiate(&a), Err(Error::MissingParameter(y)));
    }

    #[test]
    fn constant_matrix_instantiates_unchanged() {
        let c = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(
            ParamMatrix::constant(&c)
                .instantiate(&Assignment::new())
                .unwrap(),
            c
        );
    }

    #[test]
    fn poly_trimming_and_degree() {
        let x = LinearForm::param(ParamId::q(1, 1, 1));
        let p = ParamPoly::from_coeffs(vec![x.clone(), LinearForm::zero()]);
        assert_eq!(p.degree(), Degree::Finite(0));
        assert_eq!(ParamPoly::zero().degree(), Degree::NegInfinity);
        let m = ParamPolyMatrix::from_fn(1, 1, |_, _| {
            ParamPoly::from_coeffs(vec![LinearForm::zero(), x.clone()])
        });
        assert_eq!(m.row_forms_above(0, 0), vec![x]);
        assert!(matches!(
            m.high_row_coeff(&[0]),
            Err(Error::DegreeExceeded { .. })
        ));
    }
}
