//! Command-line front end: `analyze`, `solve`, `verify` and `fixed-poles`.

pub mod files;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use morgan_core::admissible::{enumerate_row_configs, enumerate_tuples, search_bound};
use morgan_core::canonical::{controllability_indices, StateSpace};
use morgan_core::decouple::{solve, SearchResult, SolveOptions, DEFAULT_SEED};
use morgan_core::exactalg::{charpoly, transfer_function, Poly, RationalFunction};
use morgan_core::zeros::{hidden_modes, input_decoupling_zeros, is_hurwitz};
use serde_json::json;

use files::{
    parse_poly, poly_entries, read_json, to_json, DiagonalEntry, SolutionFile, SystemFile,
};

#[derive(Debug, Parser)]
#[command(
    name = "morgan",
    version,
    about = "Exact diagonal decoupling by singular state feedback"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Controllability indices, admissible tuples, row configurations and the search bound.
    Analyze {
        system: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for a decoupling pair (F, G).
    Solve {
        system: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the solution file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the solution file instead of the text report.
        #[arg(long)]
        json: bool,
    },
    /// Recompute the closed loop of a solution file and check it.
    Verify {
        system: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Fixed poles of a solution file, or of a fresh search without one.
    FixedPoles {
        system: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Evaluate every configuration instead of stopping at the first solution.
    #[arg(long)]
    pub all: bool,
    /// Comma-separated diagonal denominators, e.g. "s^4+2s-3,s+3".
    #[arg(long)]
    pub diag_polys: Option<String>,
    /// Target polynomial for the input decoupling zeros.
    #[arg(long)]
    pub dz_target: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl SearchArgs {
    pub fn options(&self) -> Result<SolveOptions> {
        let diag_polys = match &self.diag_polys {
            None => None,
            Some(text) => Some(
                text.split(',')
                    .map(|p| Poly::parse(p).map_err(Into::into))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let dz_target = self.dz_target.as_deref().map(Poly::parse).transpose()?;
        Ok(SolveOptions {
            seed: self.seed,
            all: self.all,
            diag_polys,
            dz_target,
            jobs: self.jobs,
        })
    }
}

/// Outcome of a command; see [`Status::code`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    NoSolution,
    Failed,
}

impl Status {
    /// 0 solved or PASS, 2 no solution, 1 failure.
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::NoSolution => 2,
            Status::Failed => 1,
        }
    }
}

pub fn load_system(path: &Path) -> Result<StateSpace> {
    read_json::<SystemFile>(path)?
        .to_system()
        .with_context(|| format!("system {}", path.display()))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Analyze { system, json } => analyze(&load_system(&system)?, json, out),
        Command::Solve {
            system,
            search,
            out: path,
            json,
        } => solve_cmd(&load_system(&system)?, &search, path.as_deref(), json, out),
        Command::Verify {
            system,
            solution,
            json,
        } => {
            let sys = load_system(&system)?;
            let file: SolutionFile = read_json(&solution)?;
            verify_cmd(&sys, &file, json, out)
        }
        Command::FixedPoles {
            system,
            solution,
            search,
            json,
        } => {
            let sys = load_system(&system)?;
            match solution {
                Some(p) => closed_loop_poles(&sys, &read_json(&p)?, json, out),
                None => searched_poles(&sys, &search, json, out),
            }
        }
    }
}

fn tuple_text(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn analyze(sys: &StateSpace, json: bool, out: &mut dyn Write) -> Result<Status> {
    let sigma = controllability_indices(&sys.a, &sys.b)?;
    let m = sys.outputs();
    let tuples: Vec<Vec<usize>> = enumerate_tuples(&sigma, m)
        .into_iter()
        .map(|t| t.0)
        .collect();
    let configs: Vec<Vec<usize>> = enumerate_row_configs(sigma.len(), m)
        .iter()
        .map(|c| c.s_positions(&sigma))
        .collect();
    let bound = search_bound(&sigma, m);
    if json {
        let report = json!({
            "n": sys.n(),
            "inputs": sys.inputs(),
            "outputs": m,
            "sigma": sigma,
            "ci_tuples": tuples,
            "row_configs": configs,
            "bound": bound,
        });
        write!(out, "{}", to_json(&report))?;
        return Ok(Status::Success);
    }
    writeln!(
        out,
        "states {}, inputs {}, outputs {}",
        sys.n(),
        sys.inputs(),
        m
    )?;
    writeln!(out, "sigma: {}", tuple_text(&sigma))?;
    let t: Vec<String> = tuples.iter().map(|t| tuple_text(t)).collect();
    writeln!(out, "ci tuples ({}): {}", t.len(), t.join(" "))?;
    let c: Vec<String> = configs.iter().map(|c| tuple_text(c)).collect();
    writeln!(out, "row configs ({}): {}", c.len(), c.join(" "))?;
    writeln!(out, "search bound: {bound}")?;
    Ok(Status::Success)
}

fn write_audit(res: &SearchResult, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "configurations evaluated: {} of {}",
        res.audit.len(),
        res.bound
    )?;
    for a in &res.audit {
        let status = a.rejection.as_deref().unwrap_or("solved");
        writeln!(
            out,
            "  {} {}: {}",
            a.tuple,
            tuple_text(&a.s_positions),
            status
        )?;
    }
    Ok(())
}

fn poly_list(polys: &[Poly]) -> String {
    polys
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn stability(stable: bool) -> &'static str {
    if stable {
        "stable"
    } else {
        "not stable"
    }
}

/// Runs the search. On success returns the solution file of the first
/// solution; `None` means no configuration decouples the system.
pub fn search(sys: &StateSpace, args: &SearchArgs) -> Result<(SearchResult, Option<SolutionFile>)> {
    let res = solve(sys, &args.options()?)?;
    log::info!(
        "{} of {} configurations evaluated, {} solved",
        res.audit.len(),
        res.bound,
        res.solutions.len()
    );
    let file = res
        .solution()
        .map(|s| SolutionFile::new(args.seed, s, &res.audit));
    Ok((res, file))
}

pub fn solve_cmd(
    sys: &StateSpace,
    args: &SearchArgs,
    path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status> {
    let (res, file) = search(sys, args)?;
    let Some(file) = file else {
        if json {
            let audit: Vec<_> = res
                .audit
                .iter()
                .map(files::AuditEntry::from_attempt)
                .collect();
            write!(
                out,
                "{}",
                to_json(&json!({ "status": "no-solution", "audit": audit }))
            )?;
        } else {
            writeln!(out, "no solution within the implemented search")?;
            write_audit(&res, out)?;
        }
        return Ok(Status::NoSolution);
    };
    let text = to_json(&file);
    if let Some(p) = path {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    if json {
        write!(out, "{text}")?;
        return Ok(Status::Success);
    }
    let sol = res.solution().expect("solution present");
    writeln!(out, "sigma: {}", tuple_text(&res.sigma))?;
    writeln!(out, "ci tuple: {}", sol.tuple)?;
    writeln!(out, "row config: {}", tuple_text(&sol.s_positions))?;
    writeln!(out, "constraints: {}", sol.constraints.join(", "))?;
    writeln!(out, "F =\n{}", sol.f)?;
    writeln!(out, "G =\n{}", sol.g)?;
    let diag: Vec<String> = sol.diagonal.iter().map(ToString::to_string).collect();
    writeln!(out, "diagonal: {}", diag.join(", "))?;
    let fx = &sol.fixed;
    writeln!(
        out,
        "input decoupling zeros: {} ({})",
        fx.input_dz_poly,
        stability(fx.input_dz_stable)
    )?;
    writeln!(
        out,
        "fixed decoupling poles: {} ({})",
        fx.fixed_dec_poly,
        stability(fx.fixed_dec_stable)
    )?;
    if res.solutions.len() > 1 {
        writeln!(out, "other solutions:")?;
        for s in &res.solutions[1..] {
            writeln!(out, "  {} {}", s.tuple, tuple_text(&s.s_positions))?;
        }
    }
    write_audit(&res, out)?;
    Ok(Status::Success)
}

/// Result of recomputing a closed loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    /// First failing check, `None` on PASS.
    pub failure: Option<String>,
    pub diagonal: Vec<RationalFunction>,
    pub input_dz_poly: Poly,
    pub unobservable_poly: Poly,
    /// `charpoly(A + BF)` equals the product of the diagonal denominators,
    /// the input decoupling zeros and the unobservable modes.
    pub factorization: bool,
}

pub fn verify(sys: &StateSpace, file: &SolutionFile) -> Result<Verification> {
    let (f, g) = file.feedback()?;
    let h = transfer_function(&sys.a, &sys.b, &sys.c, &f, &g)?;
    if h.rows() != h.cols() {
        bail!("closed loop is {}x{}, not square", h.rows(), h.cols());
    }
    let a_cl = &sys.a + &(&sys.b * &f);
    let bg = &sys.b * &g;
    let input_dz_poly = input_decoupling_zeros(&a_cl, &bg);
    let unobservable_poly = hidden_modes(&a_cl, &bg, &sys.c);
    let diagonal = h.diagonal();
    let dens = diagonal.iter().fold(Poly::one(), |acc, d| &acc * &d.den);
    let factorization = charpoly(&a_cl) == &(&dens * &input_dz_poly) * &unobservable_poly;

    let mut failure = h.first_off_diagonal().map(|(r, c)| {
        format!(
            "entry ({}, {}) is {}, expected 0",
            r + 1,
            c + 1,
            h.entry(r, c)
        )
    });
    if failure.is_none() {
        failure = diagonal
            .iter()
            .position(RationalFunction::is_zero)
            .map(|i| format!("entry ({0}, {0}) is 0, the closed loop is singular", i + 1));
    }
    if failure.is_none() {
        if file.diagonal.len() != diagonal.len() {
            failure = Some(format!(
                "{} recorded diagonal entries for a {}x{} closed loop",
                file.diagonal.len(),
                h.rows(),
                h.cols()
            ));
        } else {
            for (i, (rec, got)) in file.diagonal.iter().zip(&diagonal).enumerate() {
                let want = rec.to_function()?;
                if want != *got {
                    failure = Some(format!("entry ({0}, {0}) is {got}, recorded {want}", i + 1));
                    break;
                }
            }
        }
    }
    if failure.is_none() {
        if let Some(fp) = &file.fixed_poles {
            if parse_poly(&fp.input_dz_poly)? != input_dz_poly {
                failure = Some(format!(
                    "input decoupling zeros are {input_dz_poly}, recorded otherwise"
                ));
            } else if parse_poly(&fp.numerator_det)? != unobservable_poly {
                failure = Some(format!(
                    "unobservable modes are {unobservable_poly}, recorded otherwise"
                ));
            }
        }
    }
    if failure.is_none() && !factorization {
        failure = Some("closed-loop characteristic polynomial does not factor".into());
    }
    Ok(Verification {
        failure,
        diagonal,
        input_dz_poly,
        unobservable_poly,
        factorization,
    })
}

pub fn verify_cmd(
    sys: &StateSpace,
    file: &SolutionFile,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status> {
    let v = verify(sys, file)?;
    let status = if v.failure.is_none() {
        Status::Success
    } else {
        Status::Failed
    };
    if json {
        let diag: Vec<_> = v
            .diagonal
            .iter()
            .map(DiagonalEntry::from_function)
            .collect();
        let report = json!({
            "status": if v.failure.is_none() { "PASS" } else { "FAIL" },
            "failure": v.failure,
            "diagonal": diag,
            "input_dz_poly": poly_entries(&v.input_dz_poly),
            "unobservable_poly": poly_entries(&v.unobservable_poly),
            "factorization": v.factorization,
        });
        write!(out, "{}", to_json(&report))?;
        return Ok(status);
    }
    match &v.failure {
        None => writeln!(out, "PASS")?,
        Some(msg) => writeln!(out, "FAIL: {msg}")?,
    }
    let diag: Vec<String> = v.diagonal.iter().map(ToString::to_string).collect();
    writeln!(out, "diagonal: {}", diag.join(", "))?;
    writeln!(out, "input decoupling zeros: {}", v.input_dz_poly)?;
    writeln!(out, "unobservable modes: {}", v.unobservable_poly)?;
    writeln!(
        out,
        "factorization: {}",
        if v.factorization { "holds" } else { "fails" }
    )?;
    Ok(status)
}

fn closed_loop_poles(
    sys: &StateSpace,
    file: &SolutionFile,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status> {
    let (f, g) = file.feedback()?;
    let a_cl = &sys.a + &(&sys.b * &f);
    let bg = &sys.b * &g;
    let idz = input_decoupling_zeros(&a_cl, &bg);
    let unobs = hidden_modes(&a_cl, &bg, &sys.c);
    if json {
        let report = json!({
            "input_dz_poly": poly_entries(&idz),
            "unobservable_poly": poly_entries(&unobs),
            "input_dz_stable": is_hurwitz(&idz),
            "unobservable_stable": is_hurwitz(&unobs),
        });
        write!(out, "{}", to_json(&report))?;
    } else {
        writeln!(
            out,
            "input decoupling zeros: {idz} ({})",
            stability(is_hurwitz(&idz))
        )?;
        writeln!(
            out,
            "unobservable modes: {unobs} ({})",
            stability(is_hurwitz(&unobs))
        )?;
    }
    Ok(Status::Success)
}

fn searched_poles(
    sys: &StateSpace,
    args: &SearchArgs,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status> {
    let (res, file) = search(sys, args)?;
    let (Some(sol), Some(file)) = (res.solution(), file) else {
        writeln!(out, "no solution within the implemented search")?;
        return Ok(Status::NoSolution);
    };
    let fx = &sol.fixed;
    if json {
        let free: Vec<_> = fx
            .free_params
            .iter()
            .map(|(p, v)| json!({ "param": p.to_string(), "value": files::Entry::from(v) }))
            .collect();
        let report = json!({
            "ci_tuple": file.ci_tuple,
            "row_config": file.row_config,
            "fixed_poles": file.fixed_poles,
            "free_params": free,
        });
        write!(out, "{}", to_json(&report))?;
        return Ok(Status::Success);
    }
    writeln!(out, "ci tuple: {}", sol.tuple)?;
    writeln!(out, "row config: {}", tuple_text(&sol.s_positions))?;
    writeln!(
        out,
        "input decoupling zeros: {} ({})",
        fx.input_dz_poly,
        stability(fx.input_dz_stable)
    )?;
    writeln!(
        out,
        "fixed decoupling poles: {} ({})",
        fx.fixed_dec_poly,
        stability(fx.fixed_dec_stable)
    )?;
    writeln!(out, "numerator determinant: {}", fx.numerator_det)?;
    writeln!(out, "row gcds: {}", poly_list(&fx.row_gcds))?;
    for (p, v) in &fx.free_params {
        writeln!(out, "  {p} = {}", morgan_core::exactalg::format_rational(v))?;
    }
    Ok(Status::Success)
}
