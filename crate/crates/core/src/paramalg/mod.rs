//! Affine expressions in named free parameters, matrices of them, and the
//! generic-rank and constraint machinery built on top.

mod constraints;
mod matrix;
mod rank;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exactalg::{format_rational, Rational};
use crate::Error;

pub use constraints::{solve_zero_constraints, ConstraintSet};
pub use matrix::{complete_assignment, ParamMatrix, ParamPoly, ParamPolyMatrix};
pub use rank::{
    generic_rank, generic_rank_with, random_assignment, structural_dependency, GENERIC_RANK_REPS,
    SAMPLE_BOUND,
};

/// Concrete values for a set of parameters.
pub type Assignment = BTreeMap<ParamId, Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    /// Entries of the basis matrix of the closed-loop chains.
    Q,
    /// Free parameters of the feedback rows.
    T,
}

/// Name of a free parameter. Ordering is lexicographic on
/// `(namespace, i, j, k)` and fixes every pivot choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId {
    pub ns: Namespace,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl ParamId {
    /// `q^{i,j}_k`, 1-based.
    pub fn q(i: usize, j: usize, k: usize) -> Self {
        ParamId {
            ns: Namespace::Q,
            i,
            j,
            k,
        }
    }

    /// `t^{i}_k`, 1-based.
    pub fn t(i: usize, k: usize) -> Self {
        ParamId {
            ns: Namespace::T,
            i,
            j: 0,
            k,
        }
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ns {
            Namespace::Q => write!(f, "q^{{{},{}}}_{}", self.i, self.j, self.k),
            Namespace::T => write!(f, "t^{{{}}}_{}", self.i, self.k),
        }
    }
}

/// `constant + sum coeff * param`, with no stored zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearForm {
    constant: Rational,
    terms: BTreeMap<ParamId, Rational>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinearForm {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn param(p: ParamId) -> Self {
        Self::term(p, Rational::one())
    }

    pub fn term(p: ParamId, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(p, c);
        }
        LinearForm {
            constant: Rational::zero(),
            terms,
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<ParamId, Rational> {
        &self.terms
    }

    pub fn coeff(&self, p: &ParamId) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn params(&self) -> impl Iterator<Item = &ParamId> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinearForm {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    fn add_scaled(&mut self, other: &LinearForm, c: &Rational) {
        if c.is_zero() {
            return;
        }
        self.constant += &other.constant * c;
        for (p, v) in &other.terms {
            let e = self.terms.entry(*p).or_insert_with(Rational::zero);
            *e += v * c;
            if e.is_zero() {
                self.terms.remove(p);
            }
        }
    }

    /// Substitutes `p := value` for every listed parameter.
    pub fn substitute(&self, subs: &BTreeMap<ParamId, LinearForm>) -> Self {
        let mut out = LinearForm::constant(self.constant.clone());
        for (p, v) in &self.terms {
            match subs.get(p) {
                Some(f) => out.add_scaled(f, v),
                None => out.add_scaled(&LinearForm::param(*p), v),
            }
        }
        out
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Rational, Error> {
        let mut acc = self.constant.clone();
        for (p, v) in &self.terms {
            let x = assignment.get(p).ok_or(Error::MissingParameter(*p))?;
            acc += v * x;
        }
        Ok(acc)
    }

    /// Coefficient vector `[constant, coeff(params[0]), ...]`.
    pub fn coefficient_vector(&self, params: &[ParamId]) -> Vec<Rational> {
        std::iter::once(self.constant.clone())
            .chain(params.iter().map(|p| self.coeff(p)))
            .collect()
    }
}

impl From<Rational> for LinearForm {
    fn from(c: Rational) -> Self {
        LinearForm::constant(c)
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: &Rational) -> LinearForm {
        self.scale(rhs)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (p, v) in &self.terms {
            let neg = *v < Rational::zero();
            let a = if neg { -v.clone() } else { v.clone() };
            let body = if a.is_one() {
                p.to_string()
            } else {
                format!("{}*{}", format_rational(&a), p)
            };
            parts.push((neg, body));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            let neg = self.constant < Rational::zero();
            let a = if neg {
                -self.constant.clone()
            } else {
                self.constant.clone()
            };
            parts.push((neg, format_rational(&a)));
        }
        for (idx, (neg, body)) in parts.iter().enumerate() {
            match (idx, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Union of the parameters appearing in a collection of forms.
pub fn collect_params<'a>(forms: impl IntoIterator<Item = &'a LinearForm>) -> BTreeSet<ParamId> {
    forms
        .into_iter()
        .flat_map(|f| f.params().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};

    #[test]
    fn param_display() {
        assert_eq!(ParamId::q(1, 2, 3).to_string(), "q^{1,2}_3");
        assert_eq!(ParamId::t(2, 1).to_string(), "t^{2}_1");
    }

    #[test]
    fn param_order_is_lexicographic() {
        assert!(ParamId::q(1, 3, 1) < ParamId::q(2, 1, 1));
        assert!(ParamId::q(1, 1, 2) < ParamId::q(1, 2, 1));
        assert!(ParamId::q(9, 9, 9) < ParamId::t(1, 1));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let x = LinearForm::param(ParamId::q(1, 1, 1));
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d, LinearForm::zero());
    }

    #[test]
    fn eval_affine_form() {
        let x = ParamId::q(1, 1, 1);
        let f = &LinearForm::term(x, rat(2)) + &LinearForm::constant(rat(3));
        let a: Assignment = [(x, ratio(1, 2))].into_iter().collect();
        assert_eq!(f.eval(&a).unwrap(), rat(4));
        assert_eq!(f.eval(&Assignment::new()), Err(Error::MissingParameter(x)));
    }

    #[test]
    fn display_form() {
        let x = ParamId::q(1, 2, 1);
        let y = ParamId::q(4, 2, 1);
        let f = &LinearForm::param(x) - &LinearForm::param(y);
        assert_eq!(f.to_string(), "q^{1,2}_1 - q^{4,2}_1");
        assert_eq!(LinearForm::zero().to_string(), "0");
    }
}
