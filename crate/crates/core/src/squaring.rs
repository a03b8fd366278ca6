//! One configuration (closed-loop index tuple, feedback-row choice): the
//! parametric basis `Q_B`, the decouplability test that derives parameter
//! constraints, and the numeric preliminary feedback `(F_0, G_0)` with the
//! similarity `Q = [Q_A | Q_B]`.

use std::collections::HashSet;

use num_traits::Zero;
use rand::Rng;

use crate::admissible::{CiTuple, RowConfig};
use crate::canonical::{block_ends, block_starts, PencilForm};
use crate::exactalg::{Degree, Rational, RationalMatrix};
use crate::paramalg::{
    complete_assignment, generic_rank, solve_zero_constraints, Assignment, ConstraintSet,
    LinearForm, ParamId, ParamMatrix, ParamPoly, ParamPolyMatrix,
};
use crate::Error;

/// Attempts at drawing a numeric instantiation before a configuration is
/// rejected.
pub const INSTANTIATION_RETRIES: usize = 32;

/// Half-width of the integer range used for numeric instantiation.
pub const INSTANTIATION_BOUND: i64 = 5;

/// Cap on deficit vectors evaluated per configuration.
pub const DEFICIT_LIMIT: usize = 4096;

/// Parametric basis of the closed-loop controllable subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QBasis {
    pub sigma: Vec<usize>,
    pub sigma_tilde: Vec<usize>,
    pub qb: ParamMatrix,
}

impl QBasis {
    /// Number of columns, `sum sigma_tilde`.
    pub fn width(&self) -> usize {
        self.sigma_tilde.iter().sum()
    }

    /// Column of entry `c` (0-based) of block `j`.
    pub fn col(&self, j: usize, c: usize) -> usize {
        block_starts(&self.sigma_tilde)[j] + c
    }

    /// Last column of every block.
    pub fn last_cols(&self) -> Vec<usize> {
        block_ends(&self.sigma_tilde)
    }

    pub fn param_count(&self) -> usize {
        self.qb.params().len()
    }
}

/// Block `(i, j)` is a Toeplitz band of `st_j - sigma_i + 1` parameters
/// when `st_j >= sigma_i` and zero otherwise, so that the chain rows of the
/// pencil annihilate `Q_B S~(s)`.
pub fn build_qb(sigma: &[usize], sigma_tilde: &[usize]) -> QBasis {
    let n: usize = sigma.iter().sum();
    let w: usize = sigma_tilde.iter().sum();
    let row_start = block_starts(sigma);
    let col_start = block_starts(sigma_tilde);
    let mut qb = ParamMatrix::zeros(n, w);
    for (i, &si) in sigma.iter().enumerate() {
        for (j, &tj) in sigma_tilde.iter().enumerate() {
            if tj < si {
                continue;
            }
            for r in 0..si {
                for c in r..=r + tj - si {
                    let k = c - r + 1;
                    qb.set(
                        row_start[i] + r,
                        col_start[j] + c,
                        LinearForm::param(ParamId::q(i + 1, j + 1, k)),
                    );
                }
            }
        }
    }
    QBasis {
        sigma: sigma.to_vec(),
        sigma_tilde: sigma_tilde.to_vec(),
        qb,
    }
}

/// `C_r Q_B S~(s) diag(s^(max st - st_j))`, square `m x m`.
pub fn numerator_hat(c_r: &RationalMatrix, qb: &QBasis, cs: &ConstraintSet) -> ParamPolyMatrix {
    let cq = qb.qb.apply(cs).mul_left(c_r);
    let st = &qb.sigma_tilde;
    let smax = st.iter().copied().max().unwrap_or(0);
    ParamPolyMatrix::from_fn(c_r.rows(), st.len(), |r, j| {
        let shift = smax - st[j];
        let mut coeffs = vec![LinearForm::zero(); smax];
        for c in 0..st[j] {
            coeffs[c + shift] = cq.get(r, qb.col(j, c)).clone();
        }
        ParamPoly::from_coeffs(coeffs)
    })
}

/// Column highest coefficient matrix of `(sK^b - Lambda^b) Q_B S~(s)`: the
/// last-column entries of `Q_B` on the chain-end rows outside the
/// configuration.
pub fn denominator_hc(qb: &QBasis, config: &RowConfig, cs: &ConstraintSet) -> ParamMatrix {
    let ends = block_ends(&qb.sigma);
    let b_rows: Vec<usize> = config
        .complement(qb.sigma.len())
        .iter()
        .map(|&b| ends[b])
        .collect();
    qb.qb
        .apply(cs)
        .select_rows(&b_rows)
        .select_cols(&qb.last_cols())
}

/// Forms that must vanish for the feedback rows to exist: `s` times a
/// chain-end row of `Q_B S~(s)` cannot have a term of degree `st_j` in
/// block `j`.
pub fn feedback_row_constraints(qb: &QBasis, config: &RowConfig) -> Vec<LinearForm> {
    let ends = block_ends(&qb.sigma);
    let last = qb.last_cols();
    config
        .blocks
        .iter()
        .flat_map(|&a| {
            let p = ends[a];
            last.iter().map(move |&c| (p, c))
        })
        .map(|(p, c)| qb.qb.get(p, c).clone())
        .filter(|f| !f.is_zero())
        .collect()
}

/// Outcome of the decouplability test for one configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplabilityReport {
    pub success: bool,
    pub constraints: ConstraintSet,
    /// Deficit per output row relative to the row degrees after the
    /// feedback-row constraints.
    pub degree_deficits: Vec<usize>,
    /// Row degrees of the constrained numerator at which `n_alpha` is read.
    pub row_degrees: Vec<usize>,
    pub n_alpha: Option<ParamMatrix>,
    pub candidates: usize,
    pub reason: String,
}

impl DecouplabilityReport {
    fn failure(constraints: ConstraintSet, candidates: usize, reason: impl Into<String>) -> Self {
        DecouplabilityReport {
            success: false,
            constraints,
            degree_deficits: Vec::new(),
            row_degrees: Vec::new(),
            n_alpha: None,
            candidates,
            reason: reason.into(),
        }
    }
}

/// Finite row degrees of every row, or the first vanishing row.
fn structural_row_degrees(m: &ParamPolyMatrix) -> Result<Vec<usize>, usize> {
    (0..m.rows())
        .map(|r| match m.row_degree(r) {
            Degree::Finite(d) => Ok(d),
            Degree::NegInfinity => Err(r),
        })
        .collect()
}

/// Vectors `d` with `0 <= d_r <= bound_r` and `sum d = total`, in
/// lexicographic order.
fn deficit_vectors(bounds: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn rec(bounds: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == bounds.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: usize = bounds[i + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for d in lo..=bounds[i].min(left) {
            cur.push(d);
            rec(bounds, left - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        bounds,
        total,
        &mut Vec::with_capacity(bounds.len()),
        &mut out,
    );
    out
}

fn dominates(d: &[usize], dead: &[usize]) -> bool {
    d.iter().zip(dead).all(|(a, b)| a >= b)
}

/// Searches degree-deficit vectors in ascending total deficit. Each vector
/// forces the coefficients of numerator row `r` above degree `deg_r - d_r`
/// to vanish; the first vector giving a full rank row highest coefficient
/// matrix with `Q_B` of full column rank and a column reduced denominator
/// wins. Vectors dominating a dead one are skipped.
pub fn decouplability_search<R: Rng + ?Sized>(
    pencil: &PencilForm,
    qb: &QBasis,
    config: &RowConfig,
    rng: &mut R,
) -> DecouplabilityReport {
    let m = qb.sigma_tilde.len();
    let w = qb.width();
    let base_forms = feedback_row_constraints(qb, config);
    let base = match solve_zero_constraints(&base_forms) {
        Ok(cs) => cs,
        Err(e) => return DecouplabilityReport::failure(ConstraintSet::new(), 0, e.to_string()),
    };
    if generic_rank(&qb.qb.apply(&base), rng) < w {
        return DecouplabilityReport::failure(
            base,
            0,
            "Q_B rank deficient under the feedback-row constraints",
        );
    }
    let n_hat = numerator_hat(&pencil.c_r, qb, &base);
    let degrees = match structural_row_degrees(&n_hat) {
        Ok(d) => d,
        Err(r) => {
            return DecouplabilityReport::failure(
                base,
                0,
                format!("output row {} vanishes", r + 1),
            );
        }
    };

    let mut dead: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<(ParamId, LinearForm)>> = HashSet::new();
    let mut candidates = 0;
    let mut last_reason = String::from("no deficit vector gives a full rank numerator");
    let max_total: usize = degrees.iter().sum();
    for total in 0..=max_total {
        for d in deficit_vectors(&degrees, total) {
            if dead.iter().any(|x| dominates(&d, x)) {
                continue;
            }
            if candidates >= DEFICIT_LIMIT {
                return DecouplabilityReport::failure(
                    base,
                    candidates,
                    "deficit search limit reached",
                );
            }
            let forms: Vec<LinearForm> = (0..m)
                .filter(|&r| d[r] > 0)
                .flat_map(|r| n_hat.row_forms_above(r, degrees[r] - d[r]))
                .collect();
            let cs = match base.extended(&forms) {
                Ok(cs) => cs,
                Err(_) => {
                    dead.push(d);
                    continue;
                }
            };
            let key: Vec<(ParamId, LinearForm)> =
                cs.substitutions().map(|(p, f)| (*p, f.clone())).collect();
            if !seen.insert(key) {
                continue;
            }
            candidates += 1;
            let constrained = n_hat.apply(&cs);
            let actual = match structural_row_degrees(&constrained) {
                Ok(a) => a,
                Err(r) => {
                    last_reason = format!("output row {} vanishes", r + 1);
                    dead.push(d);
                    continue;
                }
            };
            if generic_rank(&qb.qb.apply(&cs), rng) < w {
                last_reason = "Q_B rank deficient under the derived constraints".into();
                dead.push(d);
                continue;
            }
            if generic_rank(&denominator_hc(qb, config, &cs), rng) < m {
                last_reason = "denominator not column reduced".into();
                dead.push(d);
                continue;
            }
            let n_alpha = constrained
                .high_row_coeff(&actual)
                .expect("actual row degrees");
            if generic_rank(&n_alpha, rng) == m {
                return DecouplabilityReport {
                    success: true,
                    constraints: cs,
                    degree_deficits: d,
                    row_degrees: actual,
                    n_alpha: Some(n_alpha),
                    candidates,
                    reason: String::new(),
                };
            }
        }
    }
    DecouplabilityReport::failure(base, candidates, last_reason)
}

/// Numeric data of a configuration that passed the test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaringData {
    pub tuple: CiTuple,
    pub config: RowConfig,
    /// `[Q_A | Q_B]`, with `Q_A` the first `k` columns.
    pub q: RationalMatrix,
    pub q_inv: RationalMatrix,
    /// Number of uncontrollable states introduced, `n - sum st`.
    pub k: usize,
    /// Preliminary feedback on the normalized inputs, `l x n`.
    pub f0: RationalMatrix,
    pub g0: RationalMatrix,
    /// Constant parts `mu^i` of the feedback rows `M(s) = s e_p + mu`, at
    /// the current free parameters.
    pub mu_rows: Vec<Vec<Rational>>,
    /// Feedback rows with every free parameter at zero.
    pub mu_base: Vec<Vec<Rational>>,
    /// Values of the `Q_B` parameters, including substituted ones.
    pub q_assignment: Assignment,
    /// Values of the free feedback-row parameters.
    pub t_assignment: Assignment,
}

impl SquaringData {
    /// First `k` rows of `Q^-1`; they span the left null space of `Q_B`.
    pub fn y(&self) -> RationalMatrix {
        self.q_inv.select_rows(&(0..self.k).collect::<Vec<_>>())
    }

    pub fn q_b(&self) -> RationalMatrix {
        self.q
            .select_cols(&(self.k..self.q.cols()).collect::<Vec<_>>())
    }

    pub fn q_a(&self) -> RationalMatrix {
        self.q.select_cols(&(0..self.k).collect::<Vec<_>>())
    }

    /// Free parameters `t^i_j`: feedback row `i`, null direction `j`.
    pub fn free_params(&self) -> Vec<ParamId> {
        (1..=self.config.blocks.len())
            .flat_map(|i| (1..=self.k).map(move |j| ParamId::t(i, j)))
            .collect()
    }

    /// The same configuration with the free parameters set to `t`;
    /// unlisted parameters are zero.
    pub fn with_t(&self, pencil: &PencilForm, t: &Assignment) -> SquaringData {
        let y = self.y();
        let mut out = self.clone();
        out.t_assignment = Assignment::new();
        for (i, base) in self.mu_base.iter().enumerate() {
            let mut row = base.clone();
            for j in 0..self.k {
                let id = ParamId::t(i + 1, j + 1);
                let v = t.get(&id).cloned().unwrap_or_else(Rational::zero);
                if !v.is_zero() {
                    for (x, yv) in row.iter_mut().zip(y.row(j)) {
                        *x += &v * yv;
                    }
                }
                out.t_assignment.insert(id, v);
            }
            out.mu_rows[i] = row;
        }
        out.f0 = build_f0(pencil, &self.config, &out.mu_rows);
        out
    }
}

fn build_f0(pencil: &PencilForm, config: &RowConfig, mu_rows: &[Vec<Rational>]) -> RationalMatrix {
    let n = pencil.n();
    let ends = pencil.ends();
    let mut f0 = RationalMatrix::zeros(pencil.inputs(), n);
    for (i, &a) in config.blocks.iter().enumerate() {
        for c in 0..n {
            f0[(a, c)] = -&pencil.a_r[(ends[a], c)] - &mu_rows[i][c];
        }
    }
    f0
}

/// `I_l` without the configuration columns.
pub fn build_g0(l: usize, config: &RowConfig) -> RationalMatrix {
    let keep = config.complement(l);
    RationalMatrix::identity(l).select_cols(&keep)
}

/// Greedy completion of `Q_B` by standard basis vectors, placed first.
pub fn complete_basis(q_b: &RationalMatrix) -> Result<RationalMatrix, Error> {
    let n = q_b.rows();
    let mut q_a = RationalMatrix::zeros(n, 0);
    let mut rank = q_b.rank();
    for e in 0..n {
        if q_a.cols() + q_b.cols() == n {
            break;
        }
        let v = RationalMatrix::from_fn(n, 1, |r, _| {
            Rational::from_integer(((r == e) as i64).into())
        });
        let cand = q_a.hstack(&v);
        let r = cand.hstack(q_b).rank();
        if r > rank {
            q_a = cand;
            rank = r;
        }
    }
    let q = q_a.hstack(q_b);
    if q.rank() < n {
        return Err(Error::SingularQ);
    }
    Ok(q)
}

/// Feedback rows and `(F_0, G_0)` for a numeric `Q = [Q_A | Q_B]`. Row `i`
/// solves `Q_B^T mu = Q_mu` with `Q_mu` the negated one-step shift of the
/// chain-end row of `Q_B`; the particular solution has zero `Q_A`
/// coordinates.
pub fn assemble_squaring(
    pencil: &PencilForm,
    tuple: &CiTuple,
    config: &RowConfig,
    q: RationalMatrix,
    q_assignment: Assignment,
) -> Result<SquaringData, Error> {
    let n = pencil.n();
    let st = tuple.as_slice();
    let w: usize = st.iter().sum();
    if q.rows() != n || q.cols() != n || w > n {
        return Err(Error::Dimension(format!(
            "Q must be {n}x{n} with at least {w} columns for Q_B"
        )));
    }
    let k = n - w;
    let q_inv = q.inverse().ok_or(Error::SingularQ)?;
    let ends = pencil.ends();
    let col_start = block_starts(st);
    let mut mu_rows = Vec::with_capacity(config.blocks.len());
    for &a in &config.blocks {
        let p = ends[a];
        let mut q_mu = vec![Rational::zero(); w];
        for (j, &tj) in st.iter().enumerate() {
            let base = col_start[j];
            if !q[(p, k + base + tj - 1)].is_zero() {
                return Err(Error::NotSolvable);
            }
            for c in 1..tj {
                q_mu[base + c] = -&q[(p, k + base + c - 1)];
            }
        }
        let mu: Vec<Rational> = (0..n)
            .map(|x| {
                (0..w).fold(Rational::zero(), |acc, col| {
                    if q_mu[col].is_zero() {
                        acc
                    } else {
                        acc + &q_mu[col] * &q_inv[(k + col, x)]
                    }
                })
            })
            .collect();
        mu_rows.push(mu);
    }
    let f0 = build_f0(pencil, config, &mu_rows);
    let g0 = build_g0(pencil.inputs(), config);
    Ok(SquaringData {
        tuple: tuple.clone(),
        config: config.clone(),
        q,
        q_inv,
        k,
        f0,
        g0,
        mu_base: mu_rows.clone(),
        mu_rows,
        q_assignment,
        t_assignment: Assignment::new(),
    })
}

/// Draws small integer values for the free `Q_B` parameters until every
/// generic rank condition of the report holds exactly, then assembles the
/// preliminary feedback.
pub fn instantiate<R: Rng + ?Sized>(
    pencil: &PencilForm,
    qb: &QBasis,
    config: &RowConfig,
    report: &DecouplabilityReport,
    rng: &mut R,
) -> Result<SquaringData, Error> {
    let cs = &report.constraints;
    let m = qb.sigma_tilde.len();
    let w = qb.width();
    let tuple = CiTuple(qb.sigma_tilde.clone());
    let qbc = qb.qb.apply(cs);
    let free: Vec<ParamId> = qbc.params().into_iter().collect();
    let n_hat = numerator_hat(&pencil.c_r, qb, cs);
    let d_hc = denominator_hc(qb, config, cs);
    let mut last = Error::NotSolvable;
    for _ in 0..INSTANTIATION_RETRIES {
        let values: Assignment = free
            .iter()
            .map(|p| {
                (
                    *p,
                    Rational::from_integer(
                        rng.gen_range(-INSTANTIATION_BOUND..=INSTANTIATION_BOUND)
                            .into(),
                    ),
                )
            })
            .collect();
        let q_b = qbc.instantiate(&values)?;
        if q_b.rank() < w {
            continue;
        }
        let num = n_hat.instantiate(&values)?;
        let degrees: Vec<Degree> = (0..num.rows()).map(|r| num.row_degree(r)).collect();
        if degrees
            .iter()
            .zip(&report.row_degrees)
            .any(|(d, &e)| *d != Degree::Finite(e))
        {
            continue;
        }
        if num.high_row_coeff(&report.row_degrees)?.rank() < m {
            continue;
        }
        if d_hc.instantiate(&values)?.rank() < m {
            continue;
        }
        let q = complete_basis(&q_b)?;
        let all = complete_assignment(cs, &values)?;
        match assemble_squaring(pencil, &tuple, config, q, all) {
            Ok(data) => return Ok(data),
            Err(e) => last = e,
        }
    }
    Err(last)
}
