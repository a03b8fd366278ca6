//! Fixed poles of a decoupled closed loop: the input decoupling zeros
//! created by singular feedback, their assignment through the free
//! feedback-row parameters, and the fixed decoupling poles.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{build_s, PencilForm};
use crate::decouple::SquareSystem;
use crate::exactalg::{charpoly, Poly, PolyMatrix, Rational, RationalMatrix};
use crate::paramalg::{Assignment, ParamId};
use crate::squaring::SquaringData;
use crate::Error;

/// Random attempts for the pole placement fallback.
const PLACEMENT_ATTEMPTS: usize = 32;

/// Column basis of the controllable subspace of `(a, b)`.
pub fn controllable_subspace(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let n = a.rows();
    let mut krylov = b.clone();
    let mut block = b.clone();
    for _ in 1..n {
        block = a * &block;
        krylov = krylov.hstack(&block);
    }
    krylov.column_basis()
}

/// Column basis of the unobservable subspace of `(a, c)`.
pub fn unobservable_subspace(a: &RationalMatrix, c: &RationalMatrix) -> RationalMatrix {
    let n = a.rows();
    let mut obs = c.clone();
    let mut block = c.clone();
    for _ in 1..n {
        block = &block * a;
        obs = obs.vstack(&block);
    }
    let null = obs.nullspace();
    RationalMatrix::from_fn(n, null.len(), |r, k| null[k][r].clone())
}

/// Basis of the intersection of two column spaces.
pub fn intersect(u: &RationalMatrix, v: &RationalMatrix) -> RationalMatrix {
    let n = u.rows();
    let stacked = u.hstack(&-v);
    let null = stacked.nullspace();
    let coeffs = RationalMatrix::from_fn(u.cols(), null.len(), |r, k| null[k][r].clone());
    let x = u * &coeffs;
    if x.cols() == 0 {
        RationalMatrix::zeros(n, 0)
    } else {
        x.column_basis()
    }
}

/// Characteristic polynomial of `a` restricted to the invariant subspace
/// spanned by the columns of `basis`.
pub fn restricted_charpoly(a: &RationalMatrix, basis: &RationalMatrix) -> Poly {
    if basis.cols() == 0 {
        return Poly::one();
    }
    let image = a * basis;
    let m = basis.solve_matrix(&image).expect("subspace is invariant");
    charpoly(&m)
}

/// Monic characteristic polynomial of the uncontrollable part of `(a, b)`.
pub fn input_decoupling_zeros(a: &RationalMatrix, b: &RationalMatrix) -> Poly {
    let ctrb = controllable_subspace(a, b);
    charpoly(a)
        .exact_div(&restricted_charpoly(a, &ctrb))
        .expect("restricted characteristic polynomial divides")
        .monic()
}

/// Characteristic polynomial of `a` on the controllable and unobservable
/// subspace.
pub fn hidden_modes(a: &RationalMatrix, b: &RationalMatrix, c: &RationalMatrix) -> Poly {
    let both = intersect(&controllable_subspace(a, b), &unobservable_subspace(a, c));
    restricted_charpoly(a, &both)
}

/// The uncontrollable block `A0 - W T` of the squared system as a function
/// of the free feedback-row parameters, with `T[i][j] = t^{i+1}_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UncontrollableBlock {
    pub a0: RationalMatrix,
    pub w: RationalMatrix,
}

impl UncontrollableBlock {
    pub fn from_squaring(pencil: &PencilForm, sq: &SquaringData) -> Self {
        let base = sq.with_t(pencil, &Assignment::new());
        let a_prime = &pencil.a_r + &(&pencil.b_rg * &base.f0);
        let y = sq.y();
        let a0 = &(&y * &a_prime) * &sq.q_a();
        let ends = pencil.ends();
        let rows: Vec<usize> = sq.config.blocks.iter().map(|&a| ends[a]).collect();
        let w = y.select_cols(&rows);
        UncontrollableBlock { a0, w }
    }

    pub fn k(&self) -> usize {
        self.a0.rows()
    }

    /// `A0 - W T` for a parameter assignment; missing parameters are zero.
    pub fn at(&self, t: &Assignment) -> RationalMatrix {
        let tm = RationalMatrix::from_fn(self.w.cols(), self.k(), |i, j| {
            t.get(&ParamId::t(i + 1, j + 1))
                .cloned()
                .unwrap_or_else(Rational::zero)
        });
        &self.a0 - &(&self.w * &tm)
    }

    fn assignment_of(&self, tm: &RationalMatrix) -> Assignment {
        let mut out = Assignment::new();
        for i in 0..tm.rows() {
            for j in 0..tm.cols() {
                out.insert(ParamId::t(i + 1, j + 1), tm[(i, j)].clone());
            }
        }
        out
    }
}

/// Result of [`assign_zeros`] when no exact assignment was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestEffortReport {
    pub reason: String,
    /// The block whose characteristic polynomial gives the zeros.
    pub block: UncontrollableBlock,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroAssignment {
    Assigned(Assignment),
    BestEffort(BestEffortReport),
}

/// Companion matrix with the coefficients down the first column.
fn companion(target: &Poly) -> RationalMatrix {
    let k = target.deg().unwrap_or(0);
    RationalMatrix::from_fn(k, k, |r, c| {
        if c == 0 {
            -target.coeff(k - 1 - r)
        } else if c == r + 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Block with the target characteristic polynomial: diagonal in the roots
/// (largest first) when the target splits over the rationals, otherwise a
/// companion matrix.
pub fn target_block(target: &Poly) -> RationalMatrix {
    let k = target.deg().unwrap_or(0);
    match target.rational_roots() {
        Some(mut roots) if roots.len() == k => {
            roots.reverse();
            RationalMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    roots[r].clone()
                } else {
                    Rational::zero()
                }
            })
        }
        _ => companion(target),
    }
}

/// Chooses the free parameters so that the input decoupling zeros are the
/// roots of `target`. Exact when `W` has full row rank, by single-input
/// pole placement when `(A0, W)` is controllable, and a report otherwise.
pub fn assign_zeros(
    block: &UncontrollableBlock,
    target: &Poly,
    seed: u64,
) -> Result<ZeroAssignment, Error> {
    let k = block.k();
    let target = target.monic();
    if target.deg() != Some(k) {
        return Err(Error::TargetDegreeMismatch {
            expected: k,
            got: target.deg().unwrap_or(0),
        });
    }
    if k == 0 {
        return Ok(ZeroAssignment::Assigned(Assignment::new()));
    }
    let w = &block.w;
    let p = w.cols();
    if w.rank() == k {
        // first-fit columns of W, remaining rows of T zero
        let mut cols: Vec<usize> = Vec::new();
        for c in 0..p {
            let mut cand = cols.clone();
            cand.push(c);
            if w.select_cols(&cand).rank() == cand.len() {
                cols = cand;
            }
            if cols.len() == k {
                break;
            }
        }
        let rhs = &block.a0 - &target_block(&target);
        let sub = w
            .select_cols(&cols)
            .solve_matrix(&rhs)
            .expect("square invertible");
        let mut tm = RationalMatrix::zeros(p, k);
        for (i, &c) in cols.iter().enumerate() {
            for j in 0..k {
                tm[(c, j)] = sub[(i, j)].clone();
            }
        }
        return Ok(ZeroAssignment::Assigned(block.assignment_of(&tm)));
    }
    if controllable_subspace(&block.a0, w).cols() < k {
        return Ok(ZeroAssignment::BestEffort(BestEffortReport {
            reason: "part of the uncontrollable block is not reachable through the free parameters"
                .into(),
            block: block.clone(),
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pre = RationalMatrix::zeros(p, k);
    for attempt in 0..PLACEMENT_ATTEMPTS {
        if attempt > 0 {
            pre = RationalMatrix::from_fn(p, k, |_, _| {
                Rational::from_integer(rng.gen_range(-3i64..=3).into())
            });
        }
        let a1 = &block.a0 - &(w * &pre);
        let v: Vec<Rational> = (0..p)
            .map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into()))
            .collect();
        let b = RationalMatrix::column(&w.mul_vec(&v));
        if let Some(row) = ackermann(&a1, &b, &target) {
            let tm = &pre + &(&RationalMatrix::column(&v) * &row);
            if charpoly(&block.at(&block.assignment_of(&tm))) == target {
                return Ok(ZeroAssignment::Assigned(block.assignment_of(&tm)));
            }
        }
    }
    Ok(ZeroAssignment::BestEffort(BestEffortReport {
        reason: "no cyclic single-input reduction found".into(),
        block: block.clone(),
    }))
}

/// Row `k` with `charpoly(a - b k) = target` for a single input, if the
/// pair is controllable.
fn ackermann(a: &RationalMatrix, b: &RationalMatrix, target: &Poly) -> Option<RationalMatrix> {
    let n = a.rows();
    let mut ctrb = b.clone();
    let mut v = b.clone();
    for _ in 1..n {
        v = a * &v;
        ctrb = ctrb.hstack(&v);
    }
    let inv = ctrb.inverse()?;
    let last = RationalMatrix::row_vector(inv.row(n - 1));
    Some(&last * &a.poly_eval(target))
}

/// `C_f` restricted to the controllable coordinates times `S~(s)`.
pub fn square_numerator(square: &SquareSystem, k: usize, sigma_tilde: &[usize]) -> PolyMatrix {
    let n = square.c_f.cols();
    let cols: Vec<usize> = (k..n).collect();
    &PolyMatrix::constant(&square.c_f.select_cols(&cols)) * &build_s(sigma_tilde)
}

/// `det(N) / prod_i gcd(row i of N)`, monic, with the row gcds.
pub fn fixed_decoupling_poles_of(numerator: &PolyMatrix) -> Result<(Poly, Vec<Poly>), Error> {
    let det = numerator.det();
    if det.is_zero() {
        return Err(Error::DegenerateNumerator);
    }
    let gcds: Vec<Poly> = (0..numerator.rows())
        .map(|r| numerator.row_gcd(r).monic())
        .collect();
    let prod = gcds.iter().fold(Poly::one(), |acc, g| &acc * g);
    let f = det.exact_div(&prod).ok_or(Error::DegenerateNumerator)?;
    Ok((f.monic(), gcds))
}

pub fn fixed_decoupling_poles(
    square: &SquareSystem,
    k: usize,
    sigma_tilde: &[usize],
) -> Result<Poly, Error> {
    fixed_decoupling_poles_of(&square_numerator(square, k, sigma_tilde)).map(|(f, _)| f)
}

/// Strict Hurwitz test by the Routh array, exact.
pub fn is_hurwitz(p: &Poly) -> bool {
    let Some(n) = p.deg() else {
        return false;
    };
    if n == 0 {
        return true;
    }
    let p = p.monic();
    let c: Vec<Rational> = p.coeffs().iter().rev().cloned().collect();
    if c.iter().any(|x| *x <= Rational::zero()) {
        return false;
    }
    let mut prev: Vec<Rational> = c.iter().step_by(2).cloned().collect();
    let mut cur: Vec<Rational> = c.iter().skip(1).step_by(2).cloned().collect();
    for _ in 1..n {
        let Some(pivot) = cur.first().cloned() else {
            return false;
        };
        if pivot <= Rational::zero() {
            return false;
        }
        let next: Vec<Rational> = (0..prev.len().saturating_sub(1))
            .map(|i| {
                let a = prev.get(i + 1).cloned().unwrap_or_else(Rational::zero);
                let b = cur.get(i + 1).cloned().unwrap_or_else(Rational::zero);
                (&pivot * &a - &prev[0] * &b) / &pivot
            })
            .collect();
        prev = cur;
        cur = next;
    }
    cur.first().is_some_and(|x| *x > Rational::zero())
}

/// Fixed poles of one solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoleReport {
    pub input_dz_poly: Poly,
    pub fixed_dec_poly: Poly,
    /// Monic `det(C_f S~(s))`; it equals the fixed decoupling poles times
    /// the row gcds.
    pub numerator_det: Poly,
    pub row_gcds: Vec<Poly>,
    pub free_params: Vec<(ParamId, Rational)>,
    pub input_dz_stable: bool,
    pub fixed_dec_stable: bool,
}

pub fn fixed_pole_report(
    square: &SquareSystem,
    sq: &SquaringData,
) -> Result<FixedPoleReport, Error> {
    let input_dz_poly = input_decoupling_zeros(&square.a_f, &square.b_f);
    let numerator = square_numerator(square, sq.k, sq.tuple.as_slice());
    let (fixed_dec_poly, row_gcds) = fixed_decoupling_poles_of(&numerator)?;
    let numerator_det = row_gcds
        .iter()
        .fold(fixed_dec_poly.clone(), |acc, g| &acc * g);
    let free_params = sq
        .free_params()
        .into_iter()
        .map(|p| {
            (
                p,
                sq.t_assignment
                    .get(&p)
                    .cloned()
                    .unwrap_or_else(Rational::zero),
            )
        })
        .collect();
    Ok(FixedPoleReport {
        input_dz_stable: is_hurwitz(&input_dz_poly),
        fixed_dec_stable: is_hurwitz(&fixed_dec_poly),
        input_dz_poly,
        fixed_dec_poly,
        numerator_det,
        row_gcds,
        free_params,
    })
}
