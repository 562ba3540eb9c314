//! Gram systems for the Hermite (ideal) projector and its Lagrange
//! perturbations, exact solves, and the convergence certificates.
//!
//! Three matrices appear:
//! - the Hermite Gram matrix `(lambda_i q_j)` over `Q`;
//! - the raw Lagrange matrix `(q_j(point_i(h)))`, over `Q[h]` or at `h0`;
//! - the transformed matrix `T (raw)`, whose entries are the exact
//!   difference quotients. It equals the Hermite matrix plus a residual `E_h`
//!   divisible by `h`.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functionals::{
    build_transform, difference_apply, functional_apply, HermiteScheme, PerturbedPointSet,
};
use crate::linalg;
use crate::multipoly::{MPoly, Monomial};
use crate::scalar::{format_rational, HPoly, Rational};

/// An ordered basis `q = (q_1, ..., q_s)` for the range of the projector.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeBasis {
    polys: Vec<MPoly<Rational>>,
}

impl RangeBasis {
    pub fn new(polys: Vec<MPoly<Rational>>) -> Result<Self> {
        let Some(dim) = polys.first().map(MPoly::dim) else {
            return Err(Error::InvalidBasis("range basis is empty".into()));
        };
        for (j, q) in polys.iter().enumerate() {
            if q.dim() != dim {
                return Err(Error::InvalidBasis(format!(
                    "q{} has {} variables, expected {dim}",
                    j + 1,
                    q.dim()
                )));
            }
            if q.is_zero() {
                return Err(Error::InvalidBasis(format!("q{} is zero", j + 1)));
            }
            if let Some(i) = polys[..j].iter().position(|p| p == q) {
                return Err(Error::InvalidBasis(format!(
                    "q{} and q{} are equal",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(RangeBasis { polys })
    }

    pub fn polys(&self) -> &[MPoly<Rational>] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.polys[0].dim()
    }

    /// Checks `len = s` and `det(lambda^T q) != 0` for `scheme`.
    pub fn validate_for(&self, scheme: &HermiteScheme) -> Result<()> {
        if self.dim() != scheme.dim() {
            return Err(Error::InvalidBasis(format!(
                "basis has {} variables, scheme has {}",
                self.dim(),
                scheme.dim()
            )));
        }
        if self.len() != scheme.size() {
            return Err(Error::InvalidBasis(format!(
                "basis has {} elements, scheme needs s = {}",
                self.len(),
                scheme.size()
            )));
        }
        let m = hermite_matrix(scheme, self)?;
        let rank = linalg::rank(&m);
        if rank < self.len() {
            return Err(Error::InvalidBasis(format!(
                "gram matrix lambda^T q is singular (rank {rank} < {})",
                self.len()
            )));
        }
        Ok(())
    }

    /// `sum_j x_j q_j`.
    pub fn combine(&self, coefficients: &[Rational]) -> MPoly<Rational> {
        self.polys
            .iter()
            .zip(coefficients)
            .fold(MPoly::zero(self.dim()), |acc, (q, x)| &acc + &q.scale(x))
    }
}

/// Greedy monomial basis: walks monomials in ascending graded-lex order and
/// keeps each one that raises the rank of the functional evaluations, until
/// `s` are found. A convenience for building test schemes; any basis with a
/// nonsingular Gram matrix is equally valid.
pub fn greedy_monomial_basis(scheme: &HermiteScheme) -> Result<RangeBasis> {
    let s = scheme.size();
    let dim = scheme.dim();
    let functionals = scheme.functionals();
    let mut chosen: Vec<MPoly<Rational>> = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    // the functionals are independent on polynomials of degree < s
    for deg in 0..s as u32 {
        for m in Monomial::all_of_degree(dim, deg) {
            let q = MPoly::term(m, Rational::from_integer(1.into()));
            let col = functionals
                .iter()
                .map(|l| functional_apply(l, &q))
                .collect::<Result<Vec<_>>>()?;
            columns.push(col);
            // rank over columns == rank of the transposed row matrix
            if linalg::rank(&columns) == columns.len() {
                chosen.push(q);
                if chosen.len() == s {
                    return RangeBasis::new(chosen);
                }
            } else {
                columns.pop();
            }
        }
    }
    Err(Error::InvalidBasis(format!(
        "found only {} of {s} independent monomials",
        chosen.len()
    )))
}

/// Where a Gram system came from.
#[derive(Clone, Debug, PartialEq)]
pub enum GramKind {
    Hermite,
    Lagrange { h: Rational },
    RawSymbolic,
    HatSymbolic,
}

/// `matrix[i][j] = lambda_i q_j`, `rhs[i] = lambda_i f`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSystem<R> {
    pub matrix: Vec<Vec<R>>,
    pub rhs: Vec<R>,
    pub kind: GramKind,
}

impl GramSystem<HPoly> {
    /// Specializes every entry at `h0`.
    pub fn at(&self, h0: &Rational) -> GramSystem<Rational> {
        GramSystem {
            matrix: self
                .matrix
                .iter()
                .map(|row| row.iter().map(|e| e.eval(h0)).collect())
                .collect(),
            rhs: self.rhs.iter().map(|e| e.eval(h0)).collect(),
            kind: GramKind::Lagrange { h: h0.clone() },
        }
    }

    /// Every entry at `h = 0`.
    pub fn constant_terms(&self) -> GramSystem<Rational> {
        GramSystem {
            matrix: self
                .matrix
                .iter()
                .map(|row| row.iter().map(HPoly::constant_term).collect())
                .collect(),
            rhs: self.rhs.iter().map(HPoly::constant_term).collect(),
            kind: GramKind::Hermite,
        }
    }
}

fn check_shapes(scheme: &HermiteScheme, basis: &RangeBasis, f: &MPoly<Rational>) -> Result<()> {
    if basis.dim() != scheme.dim() || f.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            found: if f.dim() != scheme.dim() {
                f.dim()
            } else {
                basis.dim()
            },
        });
    }
    if basis.len() != scheme.size() {
        return Err(Error::InvalidBasis(format!(
            "basis has {} elements, scheme needs s = {}",
            basis.len(),
            scheme.size()
        )));
    }
    Ok(())
}

/// `(lambda_i q_j)` over `Q`.
pub fn hermite_matrix(scheme: &HermiteScheme, basis: &RangeBasis) -> Result<linalg::Matrix> {
    scheme
        .functionals()
        .iter()
        .map(|l| {
            basis
                .polys()
                .iter()
                .map(|q| functional_apply(l, q))
                .collect()
        })
        .collect()
}

pub fn gram_hermite(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<GramSystem<Rational>> {
    check_shapes(scheme, basis, f)?;
    let rhs = scheme
        .functionals()
        .iter()
        .map(|l| functional_apply(l, f))
        .collect::<Result<_>>()?;
    Ok(GramSystem {
        matrix: hermite_matrix(scheme, basis)?,
        rhs,
        kind: GramKind::Hermite,
    })
}

fn evaluation_system<S>(
    points: &PerturbedPointSet<S>,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<(Vec<Vec<S>>, Vec<S>)>
where
    S: crate::scalar::Ring,
{
    let matrix = points
        .points
        .iter()
        .map(|p| basis.polys().iter().map(|q| q.eval(p)).collect())
        .collect::<Result<_>>()?;
    let rhs = points
        .points
        .iter()
        .map(|p| f.eval(p))
        .collect::<Result<_>>()?;
    Ok((matrix, rhs))
}

/// Plain point evaluations at the perturbed points for a concrete `h0`.
pub fn gram_lagrange(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
    h0: &Rational,
) -> Result<GramSystem<Rational>> {
    check_shapes(scheme, basis, f)?;
    let points = scheme.points_at(h0)?;
    let (matrix, rhs) = evaluation_system(&points, basis, f)?;
    Ok(GramSystem {
        matrix,
        rhs,
        kind: GramKind::Lagrange { h: h0.clone() },
    })
}

/// Point evaluations at the symbolic perturbed points, entries in `Q[h]`.
pub fn gram_raw_symbolic(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<GramSystem<HPoly>> {
    check_shapes(scheme, basis, f)?;
    let points = scheme.points_symbolic();
    let (matrix, rhs) = evaluation_system(&points, basis, f)?;
    Ok(GramSystem {
        matrix,
        rhs,
        kind: GramKind::RawSymbolic,
    })
}

/// The transformed system: every entry is the exact difference quotient of
/// a functional applied to `q_j` (or `f`).
pub fn gram_hat_symbolic(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<GramSystem<HPoly>> {
    check_shapes(scheme, basis, f)?;
    let combos = scheme.difference_combinations()?;
    let matrix = combos
        .iter()
        .map(|c| {
            basis
                .polys()
                .iter()
                .map(|q| difference_apply(c, q))
                .collect()
        })
        .collect::<Result<_>>()?;
    let rhs = combos
        .iter()
        .map(|c| difference_apply(c, f))
        .collect::<Result<_>>()?;
    Ok(GramSystem {
        matrix,
        rhs,
        kind: GramKind::HatSymbolic,
    })
}

/// The transformed matrix alone.
pub fn hat_matrix(scheme: &HermiteScheme, basis: &RangeBasis) -> Result<Vec<Vec<HPoly>>> {
    let zero = MPoly::zero(scheme.dim());
    Ok(gram_hat_symbolic(scheme, basis, &zero)?.matrix)
}

/// Coefficients `x` and the polynomial `sum_j x_j q_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interpolant {
    pub coefficients: Vec<Rational>,
    pub polynomial: MPoly<Rational>,
}

pub fn solve_exact(system: &GramSystem<Rational>, basis: &RangeBasis) -> Result<Interpolant> {
    if system.matrix.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: system.matrix.len(),
        });
    }
    let coefficients = linalg::solve(&system.matrix, &system.rhs)?;
    let polynomial = basis.combine(&coefficients);
    Ok(Interpolant {
        coefficients,
        polynomial,
    })
}

/// `P f`.
pub fn hermite_interpolant(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<Interpolant> {
    solve_exact(&gram_hermite(scheme, basis, f)?, basis)
}

/// `P_{h0} f`.
pub fn lagrange_interpolant(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
    h0: &Rational,
) -> Result<Interpolant> {
    solve_exact(&gram_lagrange(scheme, basis, f, h0)?, basis)
}

/// `det` of the transformed matrix, by fraction-free elimination over `Q[h]`.
pub fn det_hat(scheme: &HermiteScheme, basis: &RangeBasis) -> Result<HPoly> {
    linalg::hpoly_determinant(&hat_matrix(scheme, basis)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRow {
    pub h: Rational,
    pub det: Rational,
}

impl StabilityRow {
    pub fn nonsingular(&self) -> bool {
        !self.det.is_zero()
    }
}

/// `det_hat` and its value at each requested `h`; a nonzero value means
/// the Lagrange projector at that `h` has the same range as `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub det: HPoly,
    pub rows: Vec<StabilityRow>,
}

impl StabilityReport {
    pub fn roots_hit(&self) -> Vec<Rational> {
        self.rows
            .iter()
            .filter(|r| !r.nonsingular())
            .map(|r| r.h.clone())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "det": self.det,
            "det_display": self.det.to_string(),
            "rows": self.rows.iter().map(|r| json!({
                "h": format_rational(&r.h),
                "det": format_rational(&r.det),
                "nonsingular": r.nonsingular(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn range_stability(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    h_list: &[Rational],
) -> Result<StabilityReport> {
    if h_list.iter().any(Zero::is_zero) {
        return Err(Error::InvalidArgument("h values must be nonzero".into()));
    }
    let det = det_hat(scheme, basis)?;
    let rows = h_list
        .iter()
        .map(|h| StabilityRow {
            h: h.clone(),
            det: det.eval(h),
        })
        .collect();
    Ok(StabilityReport { det, rows })
}

/// `[E_h | eps_h]`: transformed system minus the Hermite system.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub matrix: Vec<Vec<HPoly>>,
    pub rhs: Vec<HPoly>,
}

pub fn residual_decomposition(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
) -> Result<Residual> {
    let hat = gram_hat_symbolic(scheme, basis, f)?;
    let herm = gram_hermite(scheme, basis, f)?;
    let diff = |a: &HPoly, b: &Rational, at: String| -> Result<HPoly> {
        let e = a - &HPoly::constant(b.clone());
        if !e.constant_term().is_zero() {
            return Err(Error::Inconsistent(format!(
                "residual {at} = {e} has a nonzero constant term"
            )));
        }
        Ok(e)
    };
    let matrix = hat
        .matrix
        .iter()
        .zip(&herm.matrix)
        .enumerate()
        .map(|(i, (hr, gr))| {
            hr.iter()
                .zip(gr)
                .enumerate()
                .map(|(j, (a, b))| diff(a, b, format!("E[{}][{}]", i + 1, j + 1)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let rhs = hat
        .rhs
        .iter()
        .zip(&herm.rhs)
        .enumerate()
        .map(|(i, (a, b))| diff(a, b, format!("eps[{}]", i + 1)))
        .collect::<Result<_>>()?;
    Ok(Residual { matrix, rhs })
}

/// Result of one Lagrange solve in a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub enum StudyOutcome {
    Solved {
        coefficients: Vec<Rational>,
        gaps: Vec<Rational>,
    },
    Singular {
        rank: usize,
    },
    Collision {
        first: usize,
        second: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub h: Rational,
    pub outcome: StudyOutcome,
}

/// `gap(h_next) / gap(h_prev)` per coefficient; `None` when the earlier
/// gap is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub from: Rational,
    pub to: Rational,
    pub ratios: Vec<Option<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail {
        coefficient: usize,
        from: Rational,
        to: Rational,
    },
    /// Fewer than two solvable `h` values beyond the first pair.
    Inconclusive,
}

/// Coefficientwise comparison of `P_h f` against `P f` along a sequence of
/// `h` values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub limit: Vec<Rational>,
    pub rows: Vec<StudyRow>,
    pub ratios: Vec<RatioRow>,
    pub verdict: Verdict,
}

/// Slack on the linear rate: gaps must shrink at least as fast as
/// `DECAY_SLACK * |h_next / h_prev|`.
pub const DECAY_SLACK: i64 = 2;

/// Linear-decay rule over consecutive solvable rows, skipping the first
/// pair: `gap_j(h_next) <= gap_j(h_prev) * |h_next/h_prev| * 2` for all `j`.
pub fn decay_verdict(rows: &[StudyRow]) -> Verdict {
    let solved: Vec<(&Rational, &Vec<Rational>)> = rows
        .iter()
        .filter_map(|r| match &r.outcome {
            StudyOutcome::Solved { gaps, .. } => Some((&r.h, gaps)),
            _ => None,
        })
        .collect();
    if solved.len() < 3 {
        return Verdict::Inconclusive;
    }
    let slack = Rational::from_integer(DECAY_SLACK.into());
    for pair in solved.windows(2).skip(1) {
        let (h0, g0) = pair[0];
        let (h1, g1) = pair[1];
        let factor = (h1 / h0).abs() * &slack;
        for (j, (a, b)) in g0.iter().zip(g1).enumerate() {
            if *b > a * &factor {
                return Verdict::Fail {
                    coefficient: j,
                    from: h0.clone(),
                    to: h1.clone(),
                };
            }
        }
    }
    Verdict::Pass
}

pub fn convergence_study(
    scheme: &HermiteScheme,
    basis: &RangeBasis,
    f: &MPoly<Rational>,
    h_list: &[Rational],
) -> Result<ConvergenceReport> {
    if h_list.iter().any(Zero::is_zero) {
        return Err(Error::InvalidArgument("h values must be nonzero".into()));
    }
    if let Some(w) = h_list.windows(2).find(|w| w[1].abs() >= w[0].abs()) {
        return Err(Error::InvalidArgument(format!(
            "h values must strictly decrease in magnitude: {} then {}",
            format_rational(&w[0]),
            format_rational(&w[1])
        )));
    }
    let limit = hermite_interpolant(scheme, basis, f)?.coefficients;
    let mut rows = Vec::with_capacity(h_list.len());
    for h in h_list {
        let outcome = match lagrange_interpolant(scheme, basis, f, h) {
            Ok(interp) => {
                let gaps = interp
                    .coefficients
                    .iter()
                    .zip(&limit)
                    .map(|(x, x0)| (x - x0).abs())
                    .collect();
                StudyOutcome::Solved {
                    coefficients: interp.coefficients,
                    gaps,
                }
            }
            Err(Error::GramSingular { rank, .. }) => StudyOutcome::Singular { rank },
            Err(Error::Collision { first, second, .. }) => {
                StudyOutcome::Collision { first, second }
            }
            Err(e) => return Err(e),
        };
        rows.push(StudyRow {
            h: h.clone(),
            outcome,
        });
    }
    let solved: Vec<(&Rational, &Vec<Rational>)> = rows
        .iter()
        .filter_map(|r| match &r.outcome {
            StudyOutcome::Solved { gaps, .. } => Some((&r.h, gaps)),
            _ => None,
        })
        .collect();
    let ratios = solved
        .windows(2)
        .map(|w| RatioRow {
            from: w[0].0.clone(),
            to: w[1].0.clone(),
            ratios: w[0]
                .1
                .iter()
                .zip(w[1].1)
                .map(|(a, b)| if a.is_zero() { None } else { Some(b / a) })
                .collect(),
        })
        .collect();
    let verdict = decay_verdict(&rows);
    Ok(ConvergenceReport {
        limit,
        rows,
        ratios,
        verdict,
    })
}

fn rat_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| match &r.outcome {
                StudyOutcome::Solved { coefficients, gaps } => json!({
                    "h": format_rational(&r.h),
                    "status": "solved",
                    "coefficients": rat_strings(coefficients),
                    "gaps": rat_strings(gaps),
                }),
                StudyOutcome::Singular { rank } => json!({
                    "h": format_rational(&r.h),
                    "status": "singular",
                    "rank": rank,
                }),
                StudyOutcome::Collision { first, second } => json!({
                    "h": format_rational(&r.h),
                    "status": "collision",
                    "points": [first, second],
                }),
            })
            .collect();
        let ratios: Vec<Value> = self
            .ratios
            .iter()
            .map(|r| {
                json!({
                    "from": format_rational(&r.from),
                    "to": format_rational(&r.to),
                    "ratios": r.ratios.iter().map(|x| x.as_ref().map(format_rational)).collect::<Vec<_>>(),
                })
            })
            .collect();
        let verdict = match &self.verdict {
            Verdict::Pass => json!({"result": "pass"}),
            Verdict::Inconclusive => json!({"result": "inconclusive"}),
            Verdict::Fail {
                coefficient,
                from,
                to,
            } => json!({
                "result": "fail",
                "coefficient": coefficient,
                "from": format_rational(from),
                "to": format_rational(to),
            }),
        };
        json!({
            "limit": rat_strings(&self.limit),
            "rows": rows,
            "ratios": ratios,
            "verdict": verdict,
        })
    }
}

/// `lambda_i (P f - f) = 0` for every functional.
pub fn hermite_conditions_hold(
    scheme: &HermiteScheme,
    interp: &Interpolant,
    f: &MPoly<Rational>,
) -> Result<bool> {
    let diff = interp.polynomial.checked_sub(f)?;
    for l in scheme.functionals() {
        if !functional_apply(&l, &diff)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(P_h f)(point_i) = f(point_i)` at every perturbed point.
pub fn lagrange_conditions_hold(
    scheme: &HermiteScheme,
    interp: &Interpolant,
    f: &MPoly<Rational>,
    h0: &Rational,
) -> Result<bool> {
    for p in scheme.points_at(h0)?.points {
        if interp.polynomial.eval(&p)? != f.eval(&p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `T` applied to the raw symbolic system; equals [`gram_hat_symbolic`].
pub fn transform_raw_system(
    scheme: &HermiteScheme,
    raw: &GramSystem<HPoly>,
) -> Result<GramSystem<HPoly>> {
    let t = build_transform(scheme)?;
    let cols = raw.matrix.first().map_or(0, Vec::len);
    let mut matrix = vec![Vec::with_capacity(cols); raw.matrix.len()];
    for j in 0..cols {
        let column: Vec<HPoly> = raw.matrix.iter().map(|row| row[j].clone()).collect();
        for (i, v) in t.apply(&column)?.into_iter().enumerate() {
            matrix[i].push(v);
        }
    }
    Ok(GramSystem {
        matrix,
        rhs: t.apply(&raw.rhs)?,
        kind: GramKind::HatSymbolic,
    })
}
