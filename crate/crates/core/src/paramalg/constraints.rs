//! Linear constraints on the parameters, kept as a fully reduced
//! substitution set.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{collect_params, LinearForm, ParamId};
use crate::exactalg::{Rational, RationalMatrix};
use crate::Error;

/// Substitutions `p := form` in increasing `ParamId` order. No substituted
/// parameter appears on any right-hand side, so applying the set once
/// fully resolves it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    subs: BTreeMap<ParamId, LinearForm>,
    generators: Vec<LinearForm>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn substitutions(&self) -> impl Iterator<Item = (&ParamId, &LinearForm)> {
        self.subs.iter()
    }

    pub fn get(&self, p: &ParamId) -> Option<&LinearForm> {
        self.subs.get(p)
    }

    pub fn contains(&self, p: &ParamId) -> bool {
        self.subs.contains_key(p)
    }

    /// Forms whose vanishing produced this set.
    pub fn generators(&self) -> &[LinearForm] {
        &self.generators
    }

    pub fn apply(&self, f: &LinearForm) -> LinearForm {
        if self.subs.is_empty() {
            f.clone()
        } else {
            f.substitute(&self.subs)
        }
    }

    /// The set obtained by additionally forcing `forms` to vanish.
    pub fn extended(&self, forms: &[LinearForm]) -> Result<ConstraintSet, Error> {
        let all: Vec<LinearForm> = self.generators.iter().chain(forms).cloned().collect();
        solve_zero_constraints(&all)
    }
}

/// Solves `f = 0` for every listed form. Pivots are chosen in increasing
/// `ParamId` order, which makes the result canonical for the spanned
/// constraint space.
pub fn solve_zero_constraints(forms: &[LinearForm]) -> Result<ConstraintSet, Error> {
    let generators: Vec<LinearForm> = forms.iter().filter(|f| !f.is_zero()).cloned().collect();
    if generators.is_empty() {
        return Ok(ConstraintSet::default());
    }
    let params: Vec<ParamId> = collect_params(&generators).into_iter().collect();
    let np = params.len();
    // columns: parameters in order, then the constant
    let rows: Vec<Vec<Rational>> = generators
        .iter()
        .map(|f| {
            params
                .iter()
                .map(|p| f.coeff(p))
                .chain(std::iter::once(f.constant_part().clone()))
                .collect()
        })
        .collect();
    let (r, pivots) = RationalMatrix::from_rows(rows)?.rref();
    let mut subs = BTreeMap::new();
    for (row, &pc) in pivots.iter().enumerate() {
        if pc == np {
            let offending = generators.iter().find(|f| f.is_constant()).map_or_else(
                || "constraints imply 1 = 0".to_string(),
                |f| format!("{f} = 0"),
            );
            return Err(Error::Inconsistent(offending));
        }
        let mut rhs = LinearForm::constant(-r[(row, np)].clone());
        for (c, p) in params.iter().enumerate().skip(pc + 1) {
            let v = &r[(row, c)];
            if !v.is_zero() {
                rhs = &rhs - &LinearForm::term(*p, v.clone());
            }
        }
        subs.insert(params[pc], rhs);
    }
    Ok(ConstraintSet { subs, generators })
}
