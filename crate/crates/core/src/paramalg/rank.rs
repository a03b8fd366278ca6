//! Generic rank by random evaluation, and exact detection of identically
//! dependent rows.

use num_bigint::BigInt;
use rand::Rng;

use super::{collect_params, Assignment, LinearForm, ParamId, ParamMatrix};
use crate::exactalg::{Rational, RationalMatrix};

/// Half-width of the integer sample set.
pub const SAMPLE_BOUND: i64 = 1_000_000;

/// Independent evaluations per generic-rank query.
pub const GENERIC_RANK_REPS: usize = 3;

/// Uniform integers in `[-bound, bound]` for every listed parameter.
pub fn random_assignment<'a, R: Rng + ?Sized>(
    params: impl IntoIterator<Item = &'a ParamId>,
    rng: &mut R,
    bound: i64,
) -> Assignment {
    params
        .into_iter()
        .map(|p| {
            (
                *p,
                Rational::from_integer(BigInt::from(rng.gen_range(-bound..=bound))),
            )
        })
        .collect()
}

pub fn generic_rank<R: Rng + ?Sized>(m: &ParamMatrix, rng: &mut R) -> usize {
    generic_rank_with(m, rng, GENERIC_RANK_REPS)
}

/// Maximum exact rank over `reps` random evaluations. Each minor has degree
/// at most `min(rows, cols)` in the parameters, so a single trial errs with
/// probability at most `min(rows, cols) / (2 * bound + 1)`.
pub fn generic_rank_with<R: Rng + ?Sized>(m: &ParamMatrix, rng: &mut R, reps: usize) -> usize {
    let params = m.params();
    let full = m.rows().min(m.cols());
    if params.is_empty() {
        return m
            .instantiate(&Assignment::new())
            .expect("constant matrix")
            .rank();
    }
    let needed = 2 * m.rows() * m.cols() * full.max(1);
    let bound = SAMPLE_BOUND.max(needed as i64);
    let mut best = 0;
    for _ in 0..reps.max(1) {
        let a = random_assignment(&params, rng, bound);
        let r = m.instantiate(&a).expect("all parameters assigned").rank();
        best = best.max(r);
        if best == full {
            break;
        }
    }
    best
}

/// Smallest `r` such that row `r` is a rational combination of rows
/// `0..r` identically in the parameters, with the combination.
pub fn structural_dependency(rows: &[Vec<LinearForm>]) -> Option<(usize, Vec<Rational>)> {
    let params: Vec<ParamId> = collect_params(rows.iter().flatten()).into_iter().collect();
    let flat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .flat_map(|f| f.coefficient_vector(&params))
                .collect()
        })
        .collect();
    for r in 0..flat.len() {
        if flat[r].iter().all(num_traits::Zero::is_zero) {
            return Some((r, vec![Rational::from_integer(0.into()); r]));
        }
        if r == 0 {
            continue;
        }
        let len = flat[r].len();
        let basis = RationalMatrix::from_fn(len, r, |i, j| flat[j][i].clone());
        if let Some(c) = basis.solve(&flat[r]) {
            return Some((r, c));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(k: usize) -> LinearForm {
        LinearForm::param(ParamId::q(1, 1, k))
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(generic_rank(&ParamMatrix::zeros(3, 3), &mut rng), 0);
    }

    #[test]
    fn distinct_parameters_are_generically_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = ParamMatrix::from_fn(2, 2, |r, c| x(2 * r + c + 1));
        assert_eq!(generic_rank(&m, &mut rng), 2);
        let dep = ParamMatrix::from_fn(2, 2, |_, c| x(c + 1));
        assert_eq!(generic_rank(&dep, &mut rng), 1);
    }

    #[test]
    fn proportional_rows() {
        let rows = vec![vec![x(1)], vec![x(1).scale(&rat(2))]];
        assert_eq!(structural_dependency(&rows), Some((1, vec![rat(2)])));
    }

    #[test]
    fn independent_rows() {
        let rows = vec![vec![x(1), x(2)], vec![x(3), x(4)]];
        assert_eq!(structural_dependency(&rows), None);
    }

    #[test]
    fn equal_rows_after_an_independent_one() {
        let a = vec![LinearForm::zero(), x(1), x(2)];
        let b = vec![x(3), x(4), x(5)];
        let rows = vec![a.clone(), b, a];
        assert_eq!(
            structural_dependency(&rows),
            Some((2, vec![rat(1), rat(0)]))
        );
    }
}
