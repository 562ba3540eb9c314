//! Built-in reproduction of the worked three-variable example: two sites,
//! seven functionals, the test function `1 + (1-x1)^2 + (1-x2)^2 + (1-x3)^2`.
//! Every artifact is recomputed and compared exactly with stored values.

use serde_json::{json, Value};

use crate::error::Result;
use crate::multipoly::MPoly;
use crate::parse::parse_poly;
use crate::problem::{load_problem, Problem, EXAMPLE5_JSON};
use crate::projector::{det_hat, hat_matrix, hermite_interpolant, lagrange_interpolant};
use crate::scalar::{hpoly, ratio, HPoly, Rational};

/// Transformed Gram matrix, entries as coefficient lists in ascending
/// powers of `h`.
const HAT: [[&[i64]; 7]; 7] = [
    [&[1], &[1], &[1], &[1], &[1], &[1], &[1]],
    [&[], &[], &[], &[1], &[], &[], &[1]],
    [&[], &[], &[1], &[], &[], &[1], &[]],
    [&[], &[1], &[], &[], &[2, 1], &[1], &[1]],
    [&[1], &[], &[], &[], &[], &[], &[]],
    [
        &[],
        &[0, 1],
        &[1, 1],
        &[1],
        &[0, 0, 0, 1],
        &[0, 0, 1, 1],
        &[0, 0, 1],
    ],
    [&[], &[1], &[1], &[], &[0, 0, 7], &[0, 3, 7], &[0, 3]],
];

/// Linear factors `(c0, c1)` of the determinant, meaning `c0 + c1*h`.
const DET_FACTORS: [(i64, i64); 5] = [(-1, 1), (1, 2), (-1, 2), (1, 1), (1, 1)];

const HERMITE: &str = "4 - 2*x3 - 4*x1 - x3^2 + 4*x3*x1";

/// `(h, P_h f)`.
const LAGRANGE: [(i64, &str); 3] = [
    (
        10,
        "4 - 34949/14520*x3 - 439/7260*x2 - 37867/9680*x1 - 2303/2904*x3^2 \
         + 233/1452*x3*x2 + 7767/1936*x3*x1",
    ),
    (
        100,
        "4 - 2600449499/1274614950*x3 - 46747801/2549229900*x2 - 483294631/121391900*x1 \
         - 24977753/25492299*x3^2 + 722401/25492299*x3*x2 + 9690171/2427838*x3*x1",
    ),
    (
        1000,
        "4 - 251000494994999/125249623999500*x3 - 496749753001/250499247999000*x2 \
         - 333833081249167/83499749333000*x1 - 249997752503/250499247999*x3^2 \
         + 747249001/250499247999*x3*x2 + 667833161997/166999498666*x3*x1",
    ),
];

pub fn expected_hat() -> Vec<Vec<HPoly>> {
    HAT.iter()
        .map(|row| row.iter().map(|c| hpoly(c)).collect())
        .collect()
}

pub fn expected_det() -> HPoly {
    DET_FACTORS
        .iter()
        .fold(hpoly(&[1]), |acc, &(c0, c1)| acc * hpoly(&[c0, c1]))
}

pub fn expected_hermite() -> MPoly<Rational> {
    parse_poly(HERMITE, 3).expect("stored polynomial parses")
}

pub fn expected_lagrange() -> Vec<(Rational, MPoly<Rational>)> {
    LAGRANGE
        .iter()
        .map(|&(den, s)| {
            (
                ratio(1, den),
                parse_poly(s, 3).expect("stored polynomial parses"),
            )
        })
        .collect()
}

pub fn example5_problem() -> Problem {
    load_problem(EXAMPLE5_JSON).expect("bundled problem is valid")
}

/// One compared artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` on an exact match, otherwise the first differing entry.
    pub mismatch: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reproduction {
    pub checks: Vec<Check>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_mismatch(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.mismatch {
                None => out.push_str(&format!("match     {}\n", c.name)),
                Some(m) => out.push_str(&format!("MISMATCH  {}: {m}\n", c.name)),
            }
        }
        out.push_str(if self.passed() {
            "all artifacts match\n"
        } else {
            "reproduction failed\n"
        });
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "match": c.passed(),
                "mismatch": c.mismatch,
            })).collect::<Vec<_>>(),
        })
    }
}

fn compare_matrix(got: &[Vec<HPoly>], want: &[Vec<HPoly>]) -> Option<String> {
    if got.len() != want.len() {
        return Some(format!("{} rows, expected {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if g.len() != w.len() {
            return Some(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                g.len(),
                w.len()
            ));
        }
        for (j, (a, b)) in g.iter().zip(w).enumerate() {
            if a != b {
                return Some(format!(
                    "entry ({}, {}): got {a}, expected {b}",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    None
}

fn compare_poly(got: &MPoly<Rational>, want: &MPoly<Rational>) -> Option<String> {
    if got == want {
        return None;
    }
    // report the first monomial (ascending order) whose coefficient differs
    let mut support: Vec<_> = got.support().chain(want.support()).cloned().collect();
    support.sort();
    support.dedup();
    let m = support
        .into_iter()
        .find(|m| got.coeff(m) != want.coeff(m))
        .expect("unequal polynomials differ somewhere");
    let label = if m.degree() == 0 {
        "1".to_string()
    } else {
        m.to_string()
    };
    Some(format!(
        "coefficient of {label}: got {}, expected {}",
        got.coeff(&m),
        want.coeff(&m)
    ))
}

/// Runs the whole pipeline on `problem` and compares each artifact with the
/// stored values. Solver failures are reported as mismatches rather than
/// errors, so a perturbed problem still yields a report.
pub fn reproduce(problem: &Problem) -> Reproduction {
    let (scheme, basis, f) = (&problem.scheme, &problem.basis, &problem.f);
    let failed = |e: crate::error::Error| Some(format!("computation failed: {e}"));
    let mut checks = Vec::new();

    checks.push(Check {
        name: "transformed gram matrix".into(),
        mismatch: match hat_matrix(scheme, basis) {
            Ok(m) => compare_matrix(&m, &expected_hat()),
            Err(e) => failed(e),
        },
    });
    checks.push(Check {
        name: "determinant".into(),
        mismatch: match det_hat(scheme, basis) {
            Ok(d) if d == expected_det() => None,
            Ok(d) => Some(format!("got {d}, expected {}", expected_det())),
            Err(e) => failed(e),
        },
    });
    checks.push(Check {
        name: "P f".into(),
        mismatch: match hermite_interpolant(scheme, basis, f) {
            Ok(p) => compare_poly(&p.polynomial, &expected_hermite()),
            Err(e) => failed(e),
        },
    });
    for (h, want) in expected_lagrange() {
        checks.push(Check {
            name: format!("P_h f at h = {h}"),
            mismatch: match lagrange_interpolant(scheme, basis, f, &h) {
                Ok(p) => compare_poly(&p.polynomial, &want),
                Err(e) => failed(e),
            },
        });
    }
    Reproduction { checks }
}

pub fn reproduce_bundled() -> Result<Reproduction> {
    Ok(reproduce(&load_problem(EXAMPLE5_JSON)?))
}
