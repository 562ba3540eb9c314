//! Problem files: JSON descriptions of a Hermite scheme, a range basis, a
//! test function and a list of `h` values. Every rational is a string.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "sites": [
//!     {"xi": ["0", "0"], "subspace": {"type": "classOne",
//!        "delta": [[0, 0], [1, 0]], "rho": [["1", "0"], ["0", "1"]]}},
//!     {"xi": ["1", "0"], "subspace": {"type": "classTwo",
//!        "a": [1, 2], "c": [["1", "0"], ["0", "1"]]}}
//!   ],
//!   "basis": ["1", "x1", "x2", "x1^2", "x1*x2"],
//!   "f": "x1^3 - x2",
//!   "h_values": ["1/10", "1/100"]
//! }
//! ```
//!
//! A polynomial is either an infix string or an array of term records
//! `{"exponents": [..], "coefficient": "p/q"}`.

use serde::{Deserialize, Serialize};

use crate::dinvariant::{lower_set_validate, CoefficientTable, DirectionFrame, ExponentLadder};
use crate::error::{Error, Locate, Result};
use crate::functionals::{HermiteScheme, Site, SubspaceSpec};
use crate::multipoly::{MPoly, TermRecord};
use crate::parse::parse_poly;
use crate::projector::RangeBasis;
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyInput {
    Infix(String),
    Terms(Vec<TermRecord>),
}

impl PolyInput {
    pub fn to_poly(&self, dim: usize) -> Result<MPoly<Rational>> {
        match self {
            PolyInput::Infix(s) => parse_poly(s, dim),
            PolyInput::Terms(t) => MPoly::from_records(dim, t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum SubspaceInput {
    #[serde(rename = "classOne")]
    ClassOne {
        delta: Vec<Vec<u32>>,
        rho: Vec<Vec<String>>,
    },
    #[serde(rename = "classTwo")]
    ClassTwo { a: Vec<u32>, c: Vec<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteInput {
    pub xi: Vec<String>,
    pub subspace: SubspaceInput,
}

/// The file as written, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub sites: Vec<SiteInput>,
    pub basis: Vec<PolyInput>,
    pub f: PolyInput,
    #[serde(default)]
    pub h_values: Vec<String>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub scheme: HermiteScheme,
    pub basis: RangeBasis,
    pub f: MPoly<Rational>,
    pub h_values: Vec<Rational>,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }
}

fn rational_vec(v: &[String], at: &str) -> Result<Vec<Rational>> {
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).at(|| format!("{at}[{i}]")))
        .collect()
}

fn rational_matrix(m: &[Vec<String>], at: &str) -> Result<Vec<Vec<Rational>>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| rational_vec(row, &format!("{at}[{i}]")))
        .collect()
}

fn subspace(input: &SubspaceInput, dim: usize, at: &str) -> Result<SubspaceSpec> {
    match input {
        SubspaceInput::ClassOne { delta, rho } => {
            let delta =
                lower_set_validate(dim, delta.iter().cloned()).at(|| format!("{at}.delta"))?;
            let rows = rational_matrix(rho, &format!("{at}.rho"))?;
            if rows.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rows.len(),
                }
                .at(format!("{at}.rho")));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rows[i].len(),
                }
                .at(format!("{at}.rho[{i}]")));
            }
            let rho = DirectionFrame::new(rows).at(|| format!("{at}.rho"))?;
            Ok(SubspaceSpec::ClassOne { delta, rho })
        }
        SubspaceInput::ClassTwo { a, c } => {
            let ladder = ExponentLadder::new(a.clone()).at(|| format!("{at}.a"))?;
            let rows = rational_matrix(c, &format!("{at}.c"))?;
            if rows.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rows.len(),
                }
                .at(format!("{at}.c")));
            }
            let table = CoefficientTable::new(rows, &ladder).at(|| format!("{at}.c"))?;
            Ok(SubspaceSpec::ClassTwo { ladder, table })
        }
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs always serialize")
    }

    /// Builds the scheme only; the basis, `f` and `h` values are untouched.
    pub fn scheme(&self) -> Result<HermiteScheme> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(
                Error::InvalidArgument("dimension must be at least 1".into()).at("dimension"),
            );
        }
        let mut sites: Vec<(Site, SubspaceSpec)> = Vec::with_capacity(self.sites.len());
        for (k, s) in self.sites.iter().enumerate() {
            let at = format!("sites[{k}]");
            let xi = rational_vec(&s.xi, &format!("{at}.xi"))?;
            if xi.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: xi.len(),
                }
                .at(format!("{at}.xi")));
            }
            sites.push((xi, subspace(&s.subspace, dim, &format!("{at}.subspace"))?));
        }
        HermiteScheme::new(dim, sites).at(|| "sites".into())
    }

    /// Full validation: scheme, basis of length `s` with a nonsingular Gram
    /// matrix, `f`, and nonzero `h` values.
    pub fn build(&self) -> Result<Problem> {
        let scheme = self.scheme()?;
        let dim = self.dimension;
        let polys = self
            .basis
            .iter()
            .enumerate()
            .map(|(j, q)| q.to_poly(dim).at(|| format!("basis[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let basis = RangeBasis::new(polys).at(|| "basis".into())?;
        basis.validate_for(&scheme).at(|| "basis".into())?;
        let f = self.f.to_poly(dim).at(|| "f".into())?;
        let h_values = rational_vec(&self.h_values, "h_values")?;
        if let Some(i) = h_values.iter().position(num_traits::Zero::is_zero) {
            return Err(
                Error::InvalidArgument("h must be nonzero".into()).at(format!("h_values[{i}]"))
            );
        }
        Ok(Problem {
            scheme,
            basis,
            f,
            h_values,
        })
    }
}

pub fn load_problem(text: &str) -> Result<Problem> {
    ProblemSpec::from_json(text)?.build()
}

/// The bundled Example 5 problem file.
pub const EXAMPLE5_JSON: &str = include_str!("../data/example5.json");

/// Inverse of parsing for rational vectors, used by report writers.
pub fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}
