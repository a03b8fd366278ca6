//! JSON file formats. Rationals are integers or `"p/q"` strings and
//! polynomials are ascending coefficient arrays.

use anyhow::{bail, Context, Result};
use morgan_core::canonical::StateSpace;
use morgan_core::decouple::{ConfigAttempt, DecouplingSolution};
use morgan_core::exactalg::{
    format_rational, parse_rational, Poly, Rational, RationalFunction, RationalMatrix,
};
use serde::{Deserialize, Serialize};

pub const SOLUTION_FORMAT: &str = "morgan-solution/1";

/// A rational written either as a JSON integer or as a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    pub fn value(&self) -> Result<Rational> {
        match self {
            Entry::Int(v) => Ok(Rational::from_integer((*v).into())),
            Entry::Text(t) => Ok(parse_rational(t)?),
        }
    }
}

impl From<&Rational> for Entry {
    fn from(r: &Rational) -> Self {
        Entry::Text(format_rational(r))
    }
}

pub fn matrix_entries(m: &RationalMatrix) -> Vec<Vec<Entry>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(Entry::from).collect())
        .collect()
}

pub fn parse_matrix(name: &str, rows: &[Vec<Entry>]) -> Result<RationalMatrix> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, e)| e.value().with_context(|| format!("{name}[{r}][{c}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_rows(parsed).with_context(|| format!("matrix {name}"))
}

pub fn poly_entries(p: &Poly) -> Vec<Entry> {
    if p.is_zero() {
        return vec![Entry::Text("0".into())];
    }
    p.coeffs().iter().map(Entry::from).collect()
}

pub fn parse_poly(coeffs: &[Entry]) -> Result<Poly> {
    let c = coeffs
        .iter()
        .map(Entry::value)
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<Entry>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Entry>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Entry>>,
}

impl SystemFile {
    pub fn from_system(sys: &StateSpace) -> Self {
        SystemFile {
            a: matrix_entries(&sys.a),
            b: matrix_entries(&sys.b),
            c: matrix_entries(&sys.c),
        }
    }

    pub fn to_system(&self) -> Result<StateSpace> {
        let a = parse_matrix("A", &self.a)?;
        let b = parse_matrix("B", &self.b)?;
        let c = parse_matrix("C", &self.c)?;
        if a.rows() == 0 {
            bail!("A is empty");
        }
        Ok(StateSpace::new(a, b, c)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalEntry {
    pub num: Vec<Entry>,
    pub den: Vec<Entry>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
}

impl DiagonalEntry {
    pub fn from_function(h: &RationalFunction) -> Self {
        DiagonalEntry {
            num: poly_entries(&h.num),
            den: poly_entries(&h.den),
            text: h.to_string(),
        }
    }

    pub fn to_function(&self) -> Result<RationalFunction> {
        let den = parse_poly(&self.den)?;
        if den.is_zero() {
            bail!("zero denominator in a diagonal entry");
        }
        Ok(RationalFunction::new(parse_poly(&self.num)?, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoles {
    pub input_dz_poly: Vec<Entry>,
    pub fixed_dec_poly: Vec<Entry>,
    pub numerator_det: Vec<Entry>,
    pub row_gcds: Vec<Vec<Entry>>,
    pub input_dz_stable: bool,
    pub fixed_dec_stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamValue {
    pub param: String,
    pub value: Entry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub ci_tuple: Vec<usize>,
    pub row_config: Vec<usize>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
}

impl AuditEntry {
    pub fn from_attempt(a: &ConfigAttempt) -> Self {
        AuditEntry {
            ci_tuple: a.tuple.0.clone(),
            row_config: a.s_positions.clone(),
            status: if a.rejection.is_some() {
                "rejected"
            } else {
                "solved"
            }
            .into(),
            reason: a.rejection.clone(),
            constraints: a.constraints.clone(),
        }
    }
}

/// Solver output. Only `F`, `G` and `diagonal` are needed by `verify`, so
/// every other field may be omitted from hand-written files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(default)]
    pub format: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ci_tuple: Vec<usize>,
    #[serde(default)]
    pub row_config: Vec<usize>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<Entry>>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<Entry>>,
    pub diagonal: Vec<DiagonalEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_poles: Option<FixedPoles>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub assignment: Vec<ParamValue>,
    #[serde(default)]
    pub mu_rows: Vec<Vec<Entry>>,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
}

impl SolutionFile {
    pub fn new(seed: u64, sol: &DecouplingSolution, audit: &[ConfigAttempt]) -> Self {
        let fx = &sol.fixed;
        let sq = &sol.squaring;
        let assignment = sq
            .q_assignment
            .iter()
            .chain(&sq.t_assignment)
            .map(|(p, v)| ParamValue {
                param: p.to_string(),
                value: v.into(),
            })
            .collect();
        SolutionFile {
            format: SOLUTION_FORMAT.into(),
            seed,
            ci_tuple: sol.tuple.0.clone(),
            row_config: sol.s_positions.clone(),
            f: matrix_entries(&sol.f),
            g: matrix_entries(&sol.g),
            diagonal: sol
                .diagonal
                .iter()
                .map(DiagonalEntry::from_function)
                .collect(),
            fixed_poles: Some(FixedPoles {
                input_dz_poly: poly_entries(&fx.input_dz_poly),
                fixed_dec_poly: poly_entries(&fx.fixed_dec_poly),
                numerator_det: poly_entries(&fx.numerator_det),
                row_gcds: fx.row_gcds.iter().map(poly_entries).collect(),
                input_dz_stable: fx.input_dz_stable,
                fixed_dec_stable: fx.fixed_dec_stable,
            }),
            constraints: sol.constraints.clone(),
            assignment,
            mu_rows: sq
                .mu_rows
                .iter()
                .map(|r| r.iter().map(Entry::from).collect())
                .collect(),
            audit: audit.iter().map(AuditEntry::from_attempt).collect(),
        }
    }

    pub fn feedback(&self) -> Result<(RationalMatrix, RationalMatrix)> {
        Ok((parse_matrix("F", &self.f)?, parse_matrix("G", &self.g)?))
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
