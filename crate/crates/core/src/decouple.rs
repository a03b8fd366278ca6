//! The search over configurations, the squared system, its static
//! decoupling law and the composition of the final feedback pair.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::admissible::{enumerate_row_configs, enumerate_tuples, CiTuple, RowConfig};
use crate::canonical::{to_pencil_form, PencilForm, StateSpace};
use crate::exactalg::{transfer_function, Poly, Rational, RationalFunction, RationalMatrix};
use crate::paramalg::Assignment;
use crate::squaring::{
    build_qb, decouplability_search, instantiate, DecouplabilityReport, SquaringData,
};
use crate::zeros::{
    assign_zeros, fixed_pole_report, FixedPoleReport, UncontrollableBlock, ZeroAssignment,
};
use crate::Error;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// The squared system `(A_f, B_f, C_f)` with its decoupling data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareSystem {
    pub a_f: RationalMatrix,
    pub b_f: RationalMatrix,
    pub c_f: RationalMatrix,
    pub rel_degrees: Vec<usize>,
    pub b_star: RationalMatrix,
}

/// Relative degree of every output row and the decoupling matrix with rows
/// `C_i A^(d_i) B`. A row with `C_i A^k B = 0` for all `k < n` gives
/// `DegenerateNumerator`.
pub fn decoupling_matrix(
    a: &RationalMatrix,
    b: &RationalMatrix,
    c: &RationalMatrix,
) -> Result<(Vec<usize>, RationalMatrix), Error> {
    let n = a.rows();
    let mut degrees = Vec::with_capacity(c.rows());
    let mut rows = Vec::with_capacity(c.rows());
    for i in 0..c.rows() {
        let mut ci = RationalMatrix::row_vector(c.row(i));
        let mut found = None;
        for k in 0..n {
            let r = &ci * b;
            if !r.is_zero() {
                found = Some((k, r.row(0).to_vec()));
                break;
            }
            ci = &ci * a;
        }
        let (k, row) = found.ok_or(Error::DegenerateNumerator)?;
        degrees.push(k);
        rows.push(row);
    }
    Ok((degrees, RationalMatrix::from_rows(rows)?))
}

/// `A_f = Q^-1 (A_r + B_r G_I F_0) Q`, `B_f = Q^-1 B_r G_I G_0`,
/// `C_f = C_r Q`.
pub fn make_square_system(pencil: &PencilForm, sq: &SquaringData) -> Result<SquareSystem, Error> {
    let a_prime = &pencil.a_r + &(&pencil.b_rg * &sq.f0);
    let a_f = &(&sq.q_inv * &a_prime) * &sq.q;
    let b_f = &(&sq.q_inv * &pencil.b_rg) * &sq.g0;
    let c_f = &pencil.c_r * &sq.q;
    let (rel_degrees, b_star) = decoupling_matrix(&a_f, &b_f, &c_f)?;
    Ok(SquareSystem {
        a_f,
        b_f,
        c_f,
        rel_degrees,
        b_star,
    })
}

/// `(s + 1)^(d_i + 1)` for every output.
pub fn default_polys(rel_degrees: &[usize]) -> Vec<Poly> {
    rel_degrees
        .iter()
        .map(|&d| (0..=d).fold(Poly::one(), |acc, _| &acc * &Poly::from_i64s(&[1, 1])))
        .collect()
}

/// Falb-Wolovich law `F = -B*^-1 [C_i p_i(A)]`, `G = B*^-1`, giving the
/// closed loop `diag(1 / p_i)`. Each `p_i` must be monic of degree
/// `d_i + 1`.
pub fn falb_wolovich(
    a: &RationalMatrix,
    c: &RationalMatrix,
    rel_degrees: &[usize],
    b_star: &RationalMatrix,
    polys: &[Poly],
) -> Result<(RationalMatrix, RationalMatrix), Error> {
    if polys.len() != rel_degrees.len() {
        return Err(Error::Dimension(format!(
            "{} diagonal polynomials for {} outputs",
            polys.len(),
            rel_degrees.len()
        )));
    }
    for (p, &d) in polys.iter().zip(rel_degrees) {
        if p.deg() != Some(d + 1) || !p.is_monic() {
            return Err(Error::TargetDegreeMismatch {
                expected: d + 1,
                got: p.deg().unwrap_or(0),
            });
        }
    }
    let g = b_star.inverse().ok_or(Error::SingularBstar)?;
    let rows: Vec<Vec<Rational>> = polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ci = RationalMatrix::row_vector(c.row(i));
            (&ci * &a.poly_eval(p)).row(0).to_vec()
        })
        .collect();
    let f = -&(&g * &RationalMatrix::from_rows(rows)?);
    Ok((f, g))
}

pub fn square_decouple(
    sys: &SquareSystem,
    polys: &[Poly],
) -> Result<(RationalMatrix, RationalMatrix), Error> {
    falb_wolovich(&sys.a_f, &sys.c_f, &sys.rel_degrees, &sys.b_star, polys)
}

/// Final pair for the original system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplingSolution {
    pub f: RationalMatrix,
    pub g: RationalMatrix,
    pub f_f: RationalMatrix,
    pub g_f: RationalMatrix,
    pub tuple: CiTuple,
    pub config: RowConfig,
    /// 1-based state positions of the feedback rows.
    pub s_positions: Vec<usize>,
    pub polys: Vec<Poly>,
    pub diagonal: Vec<RationalFunction>,
    pub fixed: FixedPoleReport,
    pub constraints: Vec<String>,
    pub squaring: SquaringData,
    pub square: SquareSystem,
}

/// Exact check that `C (sI - A - BF)^-1 B G = diag(1 / p_i)`.
pub fn verify_diagonal(
    sys: &StateSpace,
    f: &RationalMatrix,
    g: &RationalMatrix,
    polys: &[Poly],
) -> Result<Vec<RationalFunction>, Error> {
    let h = transfer_function(&sys.a, &sys.b, &sys.c, f, g)?;
    if h.rows() != h.cols() {
        return Err(Error::Dimension(format!(
            "closed loop is {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if polys.len() != h.rows() {
        return Err(Error::Dimension(format!(
            "{} polynomials for {} outputs",
            polys.len(),
            h.rows()
        )));
    }
    for (r, poly) in polys.iter().enumerate() {
        for c in 0..h.cols() {
            let want = if r == c {
                RationalFunction::reciprocal_of(poly)
            } else {
                RationalFunction::new(Poly::zero(), Poly::one())
            };
            if *h.entry(r, c) != want {
                return Err(Error::VerificationFailed {
                    row: r,
                    col: c,
                    entry: h.entry(r, c).to_string(),
                    expected: want.to_string(),
                });
            }
        }
    }
    Ok(h.diagonal())
}

/// `F = G_I (F_0 + G_0 F_f Q^-1) P^-1`, `G = G_I G_0 G_f`, verified against
/// the original system.
#[allow(clippy::too_many_arguments)]
pub fn compose_final(
    sys: &StateSpace,
    pencil: &PencilForm,
    sq: &SquaringData,
    square: &SquareSystem,
    f_f: RationalMatrix,
    g_f: RationalMatrix,
    polys: Vec<Poly>,
    constraints: Vec<String>,
) -> Result<DecouplingSolution, Error> {
    let inner = &sq.f0 + &(&(&sq.g0 * &f_f) * &sq.q_inv);
    let f = &(&pencil.g_i * &inner) * &pencil.p_inv;
    let g = &(&pencil.g_i * &sq.g0) * &g_f;
    let diagonal = verify_diagonal(sys, &f, &g, &polys)?;
    let fixed = fixed_pole_report(square, sq)?;
    Ok(DecouplingSolution {
        f,
        g,
        f_f,
        g_f,
        tuple: sq.tuple.clone(),
        s_positions: sq.config.s_positions(&pencil.sigma),
        config: sq.config.clone(),
        polys,
        diagonal,
        fixed,
        constraints,
        squaring: sq.clone(),
        square: square.clone(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    /// Evaluate every configuration instead of stopping at the first.
    pub all: bool,
    pub diag_polys: Option<Vec<Poly>>,
    pub dz_target: Option<Poly>,
    /// Worker threads; 0 or 1 runs sequentially.
    pub jobs: usize,
}

impl SolveOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolveOptions {
            seed,
            ..Default::default()
        }
    }
}

/// Audit entry for one configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigAttempt {
    pub tuple: CiTuple,
    pub config: RowConfig,
    pub s_positions: Vec<usize>,
    /// `None` on success.
    pub rejection: Option<String>,
    pub constraints: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub sigma: Vec<usize>,
    pub solutions: Vec<DecouplingSolution>,
    pub audit: Vec<ConfigAttempt>,
    /// `|I| * C(l, l - m)`.
    pub bound: usize,
}

impl SearchResult {
    pub fn solution(&self) -> Option<&DecouplingSolution> {
        self.solutions.first()
    }
}

/// Independent generator for configuration `(i, j)`.
pub fn config_rng(seed: u64, i: usize, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((i as u64) << 32) | j as u64);
    rng
}

fn constraint_strings(report: &DecouplabilityReport) -> Vec<String> {
    report
        .constraints
        .substitutions()
        .map(|(p, f)| format!("{p} = {f}"))
        .collect()
}

/// Full pipeline for one configuration. The inner `Err` is a rejection
/// with its reason; the outer one is an internal inconsistency.
fn evaluate(
    sys: &StateSpace,
    pencil: &PencilForm,
    tuple: &CiTuple,
    config: &RowConfig,
    opts: &SolveOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Result<DecouplingSolution, (String, Vec<String>)>, Error> {
    let n = pencil.n();
    let k = n - tuple.sum();
    if let Some(target) = &opts.dz_target {
        let d = target.deg().unwrap_or(0);
        if d != k {
            return Ok(Err((
                format!("zero target has degree {d} but the configuration leaves {k} uncontrollable states"),
                Vec::new(),
            )));
        }
    }
    let qb = build_qb(&pencil.sigma, tuple.as_slice());
    let report = decouplability_search(pencil, &qb, config, rng);
    let constraints = constraint_strings(&report);
    if !report.success {
        return Ok(Err((report.reason, constraints)));
    }
    let mut sq = match instantiate(pencil, &qb, config, &report, rng) {
        Ok(sq) => sq,
        Err(e) => return Ok(Err((format!("no numeric instantiation: {e}"), constraints))),
    };
    if let Some(target) = &opts.dz_target {
        let block = UncontrollableBlock::from_squaring(pencil, &sq);
        match assign_zeros(&block, target, rng_seed(rng))? {
            ZeroAssignment::Assigned(t) => sq = sq.with_t(pencil, &t),
            ZeroAssignment::BestEffort(r) => {
                return Ok(Err((
                    format!("zero target not assignable: {}", r.reason),
                    constraints,
                )));
            }
        }
    }
    let square = make_square_system(pencil, &sq)?;
    let polys = match &opts.diag_polys {
        Some(p) => {
            let fits = p.len() == square.rel_degrees.len()
                && p.iter()
                    .zip(&square.rel_degrees)
                    .all(|(p, &d)| p.deg() == Some(d + 1));
            if !fits {
                let want: Vec<String> = square
                    .rel_degrees
                    .iter()
                    .map(|d| (d + 1).to_string())
                    .collect();
                return Ok(Err((
                    format!(
                        "diagonal polynomials must have degrees ({})",
                        want.join(",")
                    ),
                    constraints,
                )));
            }
            p.iter().map(Poly::monic).collect()
        }
        None => default_polys(&square.rel_degrees),
    };
    let (f_f, g_f) = square_decouple(&square, &polys)?;
    compose_final(
        sys,
        pencil,
        &sq,
        &square,
        f_f,
        g_f,
        polys,
        constraints.clone(),
    )
    .map(Ok)
}

fn rng_seed(rng: &mut ChaCha8Rng) -> u64 {
    rand::RngCore::next_u64(rng)
}

/// Visits the configurations in order (tuples, then row configurations)
/// and returns the first that decouples, or all of them with `all`. An
/// empty solution list certifies that no configuration within the
/// implemented search decouples the system.
pub fn solve(sys: &StateSpace, opts: &SolveOptions) -> Result<SearchResult, Error> {
    let pencil = to_pencil_form(sys)?;
    let m = sys.outputs();
    let tuples = enumerate_tuples(&pencil.sigma, m);
    let configs = enumerate_row_configs(pencil.inputs(), m);
    let grid: Vec<(usize, usize)> = (0..tuples.len())
        .flat_map(|i| (0..configs.len()).map(move |j| (i, j)))
        .collect();
    let bound = grid.len();
    let run = |&(i, j): &(usize, usize)| {
        let mut rng = config_rng(opts.seed, i, j);
        let outcome = evaluate(sys, &pencil, &tuples[i], &configs[j], opts, &mut rng);
        ((i, j), outcome)
    };

    let mut outcomes = Vec::new();
    if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Dimension(e.to_string()))?;
        outcomes = pool.install(|| grid.par_iter().map(run).collect());
    } else {
        for cell in &grid {
            let out = run(cell);
            let done = matches!(out.1, Ok(Ok(_))) && !opts.all;
            outcomes.push(out);
            if done {
                break;
            }
        }
    }

    let mut solutions = Vec::new();
    let mut audit = Vec::new();
    for ((i, j), outcome) in outcomes {
        let (tuple, config) = (&tuples[i], &configs[j]);
        let s_positions = config.s_positions(&pencil.sigma);
        match outcome? {
            Ok(sol) => {
                audit.push(ConfigAttempt {
                    tuple: tuple.clone(),
                    config: config.clone(),
                    s_positions,
                    rejection: None,
                    constraints: sol.constraints.clone(),
                });
                solutions.push(sol);
                if !opts.all {
                    break;
                }
            }
            Err((reason, constraints)) => audit.push(ConfigAttempt {
                tuple: tuple.clone(),
                config: config.clone(),
                s_positions,
                rejection: Some(reason),
                constraints,
            }),
        }
    }
    Ok(SearchResult {
        sigma: pencil.sigma.clone(),
        solutions,
        audit,
        bound,
    })
}

/// Evaluates one given configuration with the parameters used by
/// [`solve`] for grid cell `(i, j)`.
pub fn solve_configuration(
    sys: &StateSpace,
    tuple: &CiTuple,
    config: &RowConfig,
    opts: &SolveOptions,
) -> Result<Result<DecouplingSolution, String>, Error> {
    let pencil = to_pencil_form(sys)?;
    let tuples = enumerate_tuples(&pencil.sigma, sys.outputs());
    let configs = enumerate_row_configs(pencil.inputs(), sys.outputs());
    let i = tuples
        .iter()
        .position(|t| t == tuple)
        .unwrap_or(tuples.len());
    let j = configs
        .iter()
        .position(|c| c == config)
        .unwrap_or(configs.len());
    let mut rng = config_rng(opts.seed, i, j);
    Ok(evaluate(sys, &pencil, tuple, config, opts, &mut rng)?.map_err(|(r, _)| r))
}

/// Parameters of every free feedback-row coordinate set to zero.
pub fn zero_t(sq: &SquaringData) -> Assignment {
    sq.free_params()
        .into_iter()
        .map(|p| (p, Rational::zero()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn integrator_pair() -> StateSpace {
        // two decoupled double integrators with crossed outputs
        let a =
            RationalMatrix::from_i64(&[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let b = RationalMatrix::from_i64(&[&[0, 0], &[1, 0], &[0, 0], &[0, 1]]);
        let c = RationalMatrix::from_i64(&[&[1, 0, 1, 0], &[1, 0, 0, 0]]);
        StateSpace::new(a, b, c).unwrap()
    }

    #[test]
    fn relative_degrees_and_bstar() {
        let sys = integrator_pair();
        let (d, bs) = decoupling_matrix(&sys.a, &sys.b, &sys.c).unwrap();
        assert_eq!(d, vec![1, 1]);
        assert_eq!(bs, RationalMatrix::from_i64(&[&[1, 1], &[1, 0]]));
    }

    #[test]
    fn falb_wolovich_places_diagonal() {
        let sys = integrator_pair();
        let (d, bs) = decoupling_matrix(&sys.a, &sys.b, &sys.c).unwrap();
        let polys = default_polys(&d);
        assert_eq!(polys[0], Poly::from_i64s(&[1, 2, 1]));
        let (f, g) = falb_wolovich(&sys.a, &sys.c, &d, &bs, &polys).unwrap();
        let diag = verify_diagonal(&sys, &f, &g, &polys).unwrap();
        assert_eq!(diag[1], RationalFunction::reciprocal_of(&polys[1]));
    }

    #[test]
    fn square_system_solves_with_trivial_preliminary_feedback() {
        let sys = integrator_pair();
        let res = solve(&sys, &SolveOptions::with_seed(1)).unwrap();
        let sol = res.solution().expect("decouplable");
        assert!(sol.squaring.f0.is_zero());
        assert_eq!(sol.squaring.g0, RationalMatrix::identity(2));
        assert_eq!(res.bound, 1);
    }

    #[test]
    fn zero_output_row_has_no_solution() {
        let mut sys = integrator_pair();
        sys.c = RationalMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 0, 0]]);
        let res = solve(&sys, &SolveOptions::with_seed(1)).unwrap();
        assert!(res.solutions.is_empty());
        assert_eq!(res.audit.len(), res.bound);
    }

    #[test]
    fn wrong_degree_polys_rejected() {
        let sys = integrator_pair();
        let (d, bs) = decoupling_matrix(&sys.a, &sys.b, &sys.c).unwrap();
        let polys = vec![Poly::from_i64s(&[1, 1]), Poly::from_i64s(&[1, 2, 1])];
        assert!(matches!(
            falb_wolovich(&sys.a, &sys.c, &d, &bs, &polys),
            Err(Error::TargetDegreeMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert_eq!(bs[(0, 0)], rat(1));
    }
}
