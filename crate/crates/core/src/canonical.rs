//! Controllability indices, the controller (Popov) form with normalized
//! inputs, and the pencil layout `[L(s); sK - Lambda]`.

use crate::exactalg::{Degree, Poly, PolyMatrix, Rational, RationalMatrix};
use crate::Error;

/// The triple `(A, B, C)` with `m <= l <= n`, `B` of full column rank and
/// `(A, B)` controllable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    pub c: RationalMatrix,
}

impl StateSpace {
    pub fn new(a: RationalMatrix, b: RationalMatrix, c: RationalMatrix) -> Result<Self, Error> {
        let n = a.rows();
        if !a.is_square() || b.rows() != n || c.cols() != n {
            return Err(Error::Dimension(format!(
                "A is {}x{}, B is {}x{}, C is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        let (l, m) = (b.cols(), c.rows());
        if !(m <= l && l <= n) || m == 0 {
            return Err(Error::Dimension(format!(
                "need 0 < m <= l <= n, got m = {m}, l = {l}, n = {n}"
            )));
        }
        if b.rank() < l {
            return Err(Error::RankDeficientInput);
        }
        input_indices(&a, &b)?;
        Ok(StateSpace { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }
}

/// Controllability index of each input, in the original input order, from
/// the staircase selection of `A^k b_j` by power first and input second.
pub fn input_indices(a: &RationalMatrix, b: &RationalMatrix) -> Result<Vec<usize>, Error> {
    let n = a.rows();
    let l = b.cols();
    let mut sigma = vec![0; l];
    let mut alive = vec![true; l];
    let mut basis = RationalMatrix::zeros(n, 0);
    let mut powers: Vec<RationalMatrix> =
        (0..l).map(|j| RationalMatrix::column(&b.col(j))).collect();
    for _ in 0..n {
        for j in 0..l {
            if !alive[j] {
                continue;
            }
            let candidate = basis.hstack(&powers[j]);
            if candidate.rank() > basis.cols() {
                basis = candidate;
                sigma[j] += 1;
                powers[j] = a * &powers[j];
            } else {
                alive[j] = false;
            }
        }
        if basis.cols() == n || alive.iter().all(|x| !x) {
            break;
        }
    }
    if basis.cols() < n {
        return Err(Error::NotControllable {
            rank: basis.cols(),
            n,
        });
    }
    Ok(sigma)
}

/// Controllability indices sorted nondecreasingly.
pub fn controllability_indices(
    a: &RationalMatrix,
    b: &RationalMatrix,
) -> Result<Vec<usize>, Error> {
    let mut s = input_indices(a, b)?;
    s.sort_unstable();
    Ok(s)
}

/// 0-based state index of the last row of each chain.
pub fn block_ends(sigma: &[usize]) -> Vec<usize> {
    sigma
        .iter()
        .scan(0, |acc, &s| {
            *acc += s;
            Some(*acc - 1)
        })
        .collect()
}

/// 0-based state index of the first row of each chain.
pub fn block_starts(sigma: &[usize]) -> Vec<usize> {
    sigma
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect()
}

/// Block-diagonal matrix of power columns `[1, s, ..., s^(sigma_i - 1)]`.
pub fn build_s(sigma: &[usize]) -> PolyMatrix {
    let n: usize = sigma.iter().sum();
    let starts = block_starts(sigma);
    PolyMatrix::from_fn(n, sigma.len(), |r, c| {
        if r >= starts[c] && r < starts[c] + sigma[c] {
            Poly::monomial(Rational::from_integer(1.into()), r - starts[c])
        } else {
            Poly::zero()
        }
    })
}

/// A system in controller form together with the transformations that
/// produced it. `A_r = P^-1 A P`, `B_r = P^-1 B`, `C_r = C P`, and the
/// rows of `B_r G_I` at the chain ends are the unit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilForm {
    pub sigma: Vec<usize>,
    /// Original input feeding each chain, before normalization by `G_I`.
    pub input_order: Vec<usize>,
    pub p: RationalMatrix,
    pub p_inv: RationalMatrix,
    pub g_i: RationalMatrix,
    pub a_r: RationalMatrix,
    pub b_r: RationalMatrix,
    pub b_rg: RationalMatrix,
    pub c_r: RationalMatrix,
    /// Rows of `sI - A_r` reordered as `[L(s); sK - Lambda]`.
    pub row_perm: Vec<usize>,
    pub l: PolyMatrix,
    pub k: RationalMatrix,
    pub lambda: RationalMatrix,
}

impl PencilForm {
    pub fn n(&self) -> usize {
        self.a_r.rows()
    }

    pub fn inputs(&self) -> usize {
        self.sigma.len()
    }

    pub fn ends(&self) -> Vec<usize> {
        block_ends(&self.sigma)
    }

    /// `sK - Lambda` as a polynomial matrix.
    pub fn sk_minus_lambda(&self) -> PolyMatrix {
        PolyMatrix::pencil(&self.k, &self.lambda)
    }

    /// Builds the form from a given similarity `P` and input normalization
    /// `G_I`, checking every structural predicate.
    pub fn from_transform(
        sys: &StateSpace,
        p: RationalMatrix,
        g_i: RationalMatrix,
    ) -> Result<Self, Error> {
        let sigma = controllability_indices(&sys.a, &sys.b)?;
        let p_inv = p
            .inverse()
            .ok_or_else(|| Error::Dimension("P is singular".into()))?;
        if g_i.inverse().is_none() {
            return Err(Error::Dimension("G_I is singular".into()));
        }
        let a_r = &(&p_inv * &sys.a) * &p;
        let b_r = &p_inv * &sys.b;
        let b_rg = &b_r * &g_i;
        let c_r = &sys.c * &p;
        check_controller_structure(&sigma, &a_r, &b_rg)?;
        let input_order = (0..sigma.len()).collect();
        Ok(assemble(
            sigma,
            input_order,
            p,
            p_inv,
            g_i,
            a_r,
            b_r,
            b_rg,
            c_r,
        ))
    }
}

/// Verifies the chain rows of `A_r` are pure shifts and that `B_r G_I` has
/// unit rows at the chain ends and zeros elsewhere.
fn check_controller_structure(
    sigma: &[usize],
    a_r: &RationalMatrix,
    b_rg: &RationalMatrix,
) -> Result<(), Error> {
    let n = a_r.rows();
    let ends = block_ends(sigma);
    for (i, &e) in ends.iter().enumerate() {
        let start = e + 1 - sigma[i];
        for r in start..e {
            let shift = RationalMatrix::from_fn(1, n, |_, c| {
                Rational::from_integer(((c == r + 1) as i64).into())
            });
            if a_r.row(r) != shift.row(0) {
                return Err(Error::Dimension(format!(
                    "row {r} of A_r is not a chain shift"
                )));
            }
            if b_rg
                .row(r)
                .iter()
                .any(|v| *v != Rational::from_integer(0.into()))
            {
                return Err(Error::Dimension(format!("row {r} of B_r G_I is not zero")));
            }
        }
        for (c, v) in b_rg.row(e).iter().enumerate() {
            let want = Rational::from_integer(((c == i) as i64).into());
            if *v != want {
                return Err(Error::Dimension(format!(
                    "row {e} of B_r G_I is not a unit row"
                )));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    sigma: Vec<usize>,
    input_order: Vec<usize>,
    p: RationalMatrix,
    p_inv: RationalMatrix,
    g_i: RationalMatrix,
    a_r: RationalMatrix,
    b_r: RationalMatrix,
    b_rg: RationalMatrix,
    c_r: RationalMatrix,
) -> PencilForm {
    let n = a_r.rows();
    let ends = block_ends(&sigma);
    let chain_rows: Vec<usize> = (0..n).filter(|r| !ends.contains(r)).collect();
    let mut row_perm = chain_rows.clone();
    row_perm.extend(&ends);
    let pencil = PolyMatrix::resolvent_pencil(&a_r);
    let l = pencil.select_rows(&chain_rows);
    let k = RationalMatrix::from_fn(sigma.len(), n, |i, c| {
        Rational::from_integer(((c == ends[i]) as i64).into())
    });
    let lambda = a_r.select_rows(&ends);
    PencilForm {
        sigma,
        input_order,
        p,
        p_inv,
        g_i,
        a_r,
        b_r,
        b_rg,
        c_r,
        row_perm,
        l,
        k,
        lambda,
    }
}

/// Controller form by the classical construction: for each chain take the
/// row of the inverse Krylov basis that picks `A^(sigma_i - 1) b_i`, and
/// propagate it with powers of `A`.
pub fn to_pencil_form(sys: &StateSpace) -> Result<PencilForm, Error> {
    let (a, b) = (&sys.a, &sys.b);
    let n = a.rows();
    let per_input = input_indices(a, b)?;
    let mut input_order: Vec<usize> = (0..per_input.len()).collect();
    input_order.sort_by_key(|&j| (per_input[j], j));
    let sigma: Vec<usize> = input_order.iter().map(|&j| per_input[j]).collect();

    let mut krylov = RationalMatrix::zeros(n, 0);
    let mut top = Vec::with_capacity(sigma.len());
    for (&j, &s) in input_order.iter().zip(&sigma) {
        let mut v = RationalMatrix::column(&b.col(j));
        for k in 0..s {
            if k + 1 == s {
                top.push(krylov.cols());
            }
            krylov = krylov.hstack(&v);
            v = a * &v;
        }
    }
    let kinv = krylov.inverse().ok_or(Error::NotControllable {
        rank: krylov.rank(),
        n,
    })?;

    let mut rows = Vec::with_capacity(n);
    for (i, &s) in sigma.iter().enumerate() {
        let mut t = RationalMatrix::row_vector(kinv.row(top[i]));
        for _ in 0..s {
            rows.push(t.row(0).to_vec());
            t = &t * a;
        }
    }
    let t = RationalMatrix::from_rows(rows)?;
    let p = t
        .inverse()
        .ok_or_else(|| Error::Dimension("controller form transformation is singular".into()))?;
    let a_r = &(&t * a) * &p;
    let b_r = &t * b;
    let ends = block_ends(&sigma);
    let b_end = b_r.select_rows(&ends);
    let g_i = b_end
        .inverse()
        .ok_or_else(|| Error::Dimension("input rows of the controller form are singular".into()))?;
    let b_rg = &b_r * &g_i;
    let c_r = &sys.c * &p;
    check_controller_structure(&sigma, &a_r, &b_rg)?;
    Ok(assemble(sigma, input_order, p, t, g_i, a_r, b_r, b_rg, c_r))
}

/// Square-system decouplability test on the controller form: the row
/// highest coefficient matrix of `C_r S(s) diag(s^(max sigma - sigma_i))`
/// has full row rank.
pub fn controller_form_decouplable(pencil: &PencilForm) -> bool {
    let sigma = &pencil.sigma;
    let smax = sigma.iter().copied().max().unwrap_or(0);
    let n_s = &PolyMatrix::constant(&pencil.c_r) * &build_s(sigma);
    let shifted = PolyMatrix::from_fn(n_s.rows(), n_s.cols(), |r, c| {
        n_s[(r, c)].shift(smax - sigma[c])
    });
    let degrees: Option<Vec<usize>> = (0..shifted.rows())
        .map(|r| shifted.row_degree(r).finite())
        .collect();
    match degrees {
        None => false,
        Some(d) => shifted.high_row_coeff(&d).expect("actual degrees").rank() == shifted.rows(),
    }
}

/// Row degrees of `C_r S(s)`; `NegInfinity` for a zero output row.
pub fn output_row_degrees(pencil: &PencilForm) -> Vec<Degree> {
    let n_s = &PolyMatrix::constant(&pencil.c_r) * &build_s(&pencil.sigma);
    (0..n_s.rows()).map(|r| n_s.row_degree(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_system() -> StateSpace {
        let mut a = RationalMatrix::zeros(9, 9);
        for (r, c) in [(2, 3), (3, 4), (4, 5), (6, 2), (6, 7), (7, 8)] {
            a[(r, c)] = Rational::from_integer(1.into());
        }
        let mut b = RationalMatrix::zeros(9, 4);
        for (r, c) in [(0, 0), (1, 1), (5, 2), (8, 3)] {
            b[(r, c)] = Rational::from_integer(1.into());
        }
        let mut c = RationalMatrix::zeros(3, 9);
        for (r, col) in [(0, 0), (1, 1), (2, 0), (2, 2)] {
            c[(r, col)] = Rational::from_integer(1.into());
        }
        StateSpace::new(a, b, c).unwrap()
    }

    #[test]
    fn identity_input_gives_unit_indices() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(
            controllability_indices(&a, &RationalMatrix::identity(2)).unwrap(),
            vec![1, 1]
        );
    }

    #[test]
    fn first_system_indices() {
        let sys = first_system();
        assert_eq!(input_indices(&sys.a, &sys.b).unwrap(), vec![1, 1, 4, 3]);
        assert_eq!(
            controllability_indices(&sys.a, &sys.b).unwrap(),
            vec![1, 1, 3, 4]
        );
    }

    #[test]
    fn uncontrollable_pair_is_rejected() {
        let a = RationalMatrix::zeros(2, 2);
        let b = RationalMatrix::from_i64(&[&[1], &[0]]);
        assert_eq!(
            controllability_indices(&a, &b),
            Err(Error::NotControllable { rank: 1, n: 2 })
        );
    }

    #[test]
    fn single_input_companion_is_left_alone() {
        let a = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[2, -1, 3]]);
        let b = RationalMatrix::from_i64(&[&[0], &[0], &[1]]);
        let c = RationalMatrix::from_i64(&[&[1, 0, 0]]);
        let pf = to_pencil_form(&StateSpace::new(a.clone(), b, c).unwrap()).unwrap();
        assert_eq!(pf.p, RationalMatrix::identity(3));
        assert_eq!(pf.g_i, RationalMatrix::identity(1));
        assert_eq!(pf.a_r, a);
    }

    #[test]
    fn pencil_annihilates_power_basis() {
        let pf = to_pencil_form(&first_system()).unwrap();
        assert_eq!(pf.sigma, vec![1, 1, 3, 4]);
        let prod = &pf.l * &build_s(&pf.sigma);
        assert!(prod.is_zero());
        assert_eq!(pf.ends(), vec![0, 1, 4, 8]);
    }

    #[test]
    fn build_s_blocks() {
        let s = build_s(&[1, 2]);
        assert_eq!(s.rows(), 3);
        assert_eq!(s[(0, 0)], Poly::one());
        assert_eq!(s[(1, 1)], Poly::one());
        assert_eq!(s[(2, 1)], Poly::s());
        assert!(s[(0, 1)].is_zero() && s[(1, 0)].is_zero());
    }
}
