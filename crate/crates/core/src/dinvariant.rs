//! The two classes of D-invariant subspaces.
//!
//! Class one is spanned by products of powers of linear forms
//! `prod_i (rho_i . x)^alpha_i` over a lower set of exponents `alpha`; the
//! induced differential operators are iterated directional derivatives.
//!
//! Class two is spanned by the polynomials `q_{n,m}`, `0 <= m <= a_1`, built
//! from an exponent ladder `a = (1, a_1, ..., a_n)` and a coefficient table
//! `c`. Grouping the raw multi-index sum by column totals `t_j` gives
//!
//! ```text
//! q_{n,m} = sum_{a_0 t_0 + ... + a_n t_n = m}  prod_j (c_{.,j} . x)^{t_j} / t_j!
//! ```
//!
//! which is what [`class_two_basis`] evaluates. Two independent routes, the
//! raw enumeration and the recursion over `n`, are kept for cross-checking.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::multipoly::{MPoly, Monomial};
use crate::scalar::{factorial, Rational, Ring};

/// Functional order inside a class-one site: ascending total degree, then
/// larger `alpha_1` first, then larger `alpha_2`, and so on. For the unit
/// simplex in three variables this yields `0, e1, e2, e3`. Any
/// degree-compatible order lists every `beta <= alpha` before `alpha`.
pub fn class_one_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| b.exponents().cmp(a.exponents()))
}

/// A finite subset of `N^d` closed under the product order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerSet {
    dim: usize,
    elements: Vec<Monomial>,
}

impl LowerSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elements in [`class_one_cmp`] order.
    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, alpha: &Monomial) -> bool {
        self.elements.contains(alpha)
    }

    /// Every exponent of total degree at most `degree`.
    pub fn simplex(dim: usize, degree: u32) -> LowerSet {
        let elements = (0..=degree).flat_map(|k| Monomial::all_of_degree(dim, k));
        lower_set_validate(dim, elements.map(|m| m.exponents().to_vec()))
            .expect("a total-degree simplex is a lower set")
    }
}

/// Accepts `elements` iff it is closed under `<=`; the error names a missing
/// predecessor. Duplicates are ignored.
pub fn lower_set_validate<I>(dim: usize, elements: I) -> Result<LowerSet>
where
    I: IntoIterator<Item = Vec<u32>>,
{
    let mut set = BTreeSet::new();
    for e in elements {
        if e.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: e.len(),
            });
        }
        set.insert(Monomial::new(e));
    }
    // Closure under the immediate predecessors alpha - e_i implies closure
    // under every beta <= alpha.
    for alpha in &set {
        for i in 0..dim {
            if alpha.exponents()[i] == 0 {
                continue;
            }
            let mut beta = alpha.exponents().to_vec();
            beta[i] -= 1;
            if !set.contains(&Monomial::new(beta.clone())) {
                return Err(Error::NotLowerSet {
                    element: alpha.exponents().to_vec(),
                    missing: smallest_missing(&set, alpha).unwrap_or(beta),
                });
            }
        }
    }
    let mut elements: Vec<Monomial> = set.into_iter().collect();
    elements.sort_by(class_one_cmp);
    Ok(LowerSet { dim, elements })
}

/// The lowest-degree `beta <= alpha` absent from `set`, for error reports.
fn smallest_missing(set: &BTreeSet<Monomial>, alpha: &Monomial) -> Option<Vec<u32>> {
    alpha
        .predecessors()
        .into_iter()
        .find(|b| !set.contains(b))
        .map(|b| b.exponents().to_vec())
}

/// `d` linearly independent direction vectors. Unit length is not required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionFrame {
    rho: Vec<Vec<Rational>>,
}

impl DirectionFrame {
    pub fn new(rho: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rho.len();
        if dim == 0 {
            return Err(Error::InvalidScheme("direction frame is empty".into()));
        }
        if let Some(row) = rho.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        let rank = linalg::rank(&rho);
        if rank < dim {
            return Err(Error::SingularFrame { rank, dim });
        }
        Ok(DirectionFrame { rho })
    }

    pub fn identity(dim: usize) -> Self {
        let rho = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        DirectionFrame { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.rho
    }

    /// `prod_i (rho_i . x)^alpha_i`; its operator is `D_rho^alpha`.
    pub fn operator_poly(&self, alpha: &Monomial) -> MPoly<Rational> {
        let dim = self.dim();
        self.rho
            .iter()
            .zip(alpha.exponents())
            .fold(MPoly::one(dim), |acc, (r, &e)| {
                &acc * &MPoly::linear_form(r).pow(e)
            })
    }

    /// `sum_i alpha_i rho_i`.
    pub fn combine(&self, alpha: &Monomial) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (r, &e) in self.rho.iter().zip(alpha.exponents()) {
            if e == 0 {
                continue;
            }
            let e = Rational::from_integer(e.into());
            for (o, v) in out.iter_mut().zip(r) {
                *o += &e * v;
            }
        }
        out
    }
}

/// `a = (a_0, a_1, ..., a_n)` with `a_0 = 1`, `a_1 > ... > a_n >= 2`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentLadder {
    a: Vec<u32>,
}

impl ExponentLadder {
    pub fn new(a: Vec<u32>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidLadder(format!(
                "need at least two entries (n >= 1), got {a:?}"
            )));
        }
        if a[0] != 1 {
            return Err(Error::InvalidLadder(format!("a_0 must be 1, got {}", a[0])));
        }
        if let Some(j) = (1..a.len() - 1).find(|&j| a[j] <= a[j + 1]) {
            return Err(Error::InvalidLadder(format!(
                "entries must strictly decrease: a_{j} = {} <= a_{} = {}",
                a[j],
                j + 1,
                a[j + 1]
            )));
        }
        let last = *a.last().expect("len >= 2");
        if last < 2 {
            return Err(Error::InvalidLadder(format!(
                "a_n must be at least 2, got {last}"
            )));
        }
        Ok(ExponentLadder { a })
    }

    pub fn values(&self) -> &[u32] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// `a_1`; the subspace has dimension `a_1 + 1`.
    pub fn top(&self) -> u32 {
        self.a[1]
    }
}

/// Rows `c_i = (c_{i,0}, ..., c_{i,n})`, one per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    c: Vec<Vec<Rational>>,
}

impl CoefficientTable {
    pub fn new(c: Vec<Vec<Rational>>, ladder: &ExponentLadder) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidTable("table has no rows".into()));
        }
        let width = ladder.n() + 1;
        if let Some((i, row)) = c.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(Error::InvalidTable(format!(
                "row {} has {} entries, ladder needs {width}",
                i + 1,
                row.len()
            )));
        }
        if c.iter().all(|row| row[0].is_zero()) {
            return Err(Error::InvalidTable(
                "column 0 entries c_{i,0} are all zero".into(),
            ));
        }
        Ok(CoefficientTable { c })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.c
    }

    pub fn width(&self) -> usize {
        self.c[0].len()
    }

    /// `(c_{1,j}, ..., c_{d,j})`.
    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.c.iter().map(|row| row[j].clone()).collect()
    }

    /// The curve `phi(t)` with coordinate `i` equal to `sum_j c_{i,j} t^{a_j}`.
    pub fn curve_point<S: Ring>(&self, ladder: &ExponentLadder, t: &S) -> Vec<S> {
        let powers: Vec<S> = ladder.values().iter().map(|&e| t.pow(e)).collect();
        self.c
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&powers)
                    .fold(S::zero(), |acc, (cij, p)| acc + p.scale(cij))
            })
            .collect()
    }
}

fn check_pair(a: &ExponentLadder, c: &CoefficientTable) -> Result<()> {
    if c.width() != a.n() + 1 {
        return Err(Error::InvalidTable(format!(
            "table has {} columns, ladder needs {}",
            c.width(),
            a.n() + 1
        )));
    }
    Ok(())
}

/// Which construction produced a basis, with the per-element index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// One exponent `alpha` per element.
    ClassOne(Vec<Monomial>),
    /// Element `m` is `q_{n,m}`.
    ClassTwo {
        top: u32,
    },
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub polys: Vec<MPoly<Rational>>,
    pub provenance: Provenance,
}

impl SubspaceBasis {
    pub fn explicit(polys: Vec<MPoly<Rational>>) -> Self {
        SubspaceBasis {
            polys,
            provenance: Provenance::Explicit,
        }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }
}

pub fn class_one_basis(delta: &LowerSet, rho: &DirectionFrame) -> Result<SubspaceBasis> {
    if delta.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: delta.dim(),
        });
    }
    let polys = delta
        .elements()
        .iter()
        .map(|a| rho.operator_poly(a))
        .collect();
    Ok(SubspaceBasis {
        polys,
        provenance: Provenance::ClassOne(delta.elements().to_vec()),
    })
}

/// Nonnegative `t` with `sum_j weights[j] * t[j] = total`.
fn weighted_compositions(weights: &[u32], total: u32) -> Vec<Vec<u32>> {
    fn rec(weights: &[u32], left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&w, rest)) = weights.split_first() else {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        };
        for t in 0..=left / w {
            prefix.push(t);
            rec(rest, left - t * w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, total, &mut Vec::new(), &mut out);
    out
}

fn inv_factorial(k: u32) -> Rational {
    Rational::new(1.into(), factorial(k))
}

/// `q_{n,m}` by column-total aggregation. Defined for every `m >= 0`.
pub fn class_two_poly(a: &ExponentLadder, c: &CoefficientTable, m: u32) -> MPoly<Rational> {
    let dim = c.dim();
    let forms: Vec<MPoly<Rational>> = (0..=a.n())
        .map(|j| MPoly::linear_form(&c.column(j)))
        .collect();
    let mut out = MPoly::zero(dim);
    for t in weighted_compositions(a.values(), m) {
        let mut term = MPoly::one(dim);
        let mut norm = Rational::one();
        for (form, &tj) in forms.iter().zip(&t) {
            if tj > 0 {
                term = &term * &form.pow(tj);
                norm *= inv_factorial(tj);
            }
        }
        out = &out + &term.scale(&norm);
    }
    out
}

/// `(q_{n,0}, ..., q_{n,a_1})`.
pub fn class_two_basis(a: &ExponentLadder, c: &CoefficientTable) -> Result<SubspaceBasis> {
    check_pair(a, c)?;
    let polys = (0..=a.top()).map(|m| class_two_poly(a, c, m)).collect();
    Ok(SubspaceBasis {
        polys,
        provenance: Provenance::ClassTwo { top: a.top() },
    })
}

/// The same basis through the recursion over the ladder length,
/// `q_{k,m} = sum_l (c_{.,k} . x)^l / l! * q_{k-1, m - l a_k}`, starting from
/// `q_{0,m} = (c_{.,0} . x)^m / m!`.
pub fn class_two_basis_oracle(a: &ExponentLadder, c: &CoefficientTable) -> Result<SubspaceBasis> {
    check_pair(a, c)?;
    let top = a.top();
    let base = MPoly::linear_form(&c.column(0));
    // level[m] = q_{k,m} for m = 0..=top
    let mut level: Vec<MPoly<Rational>> = (0..=top)
        .map(|m| base.pow(m).scale(&inv_factorial(m)))
        .collect();
    for k in 1..=a.n() {
        let ak = a.values()[k];
        let form = MPoly::linear_form(&c.column(k));
        let next = (0..=top)
            .map(|m| {
                (0..=m / ak).fold(MPoly::zero(c.dim()), |acc, l| {
                    let factor = form.pow(l).scale(&inv_factorial(l));
                    &acc + &(&factor * &level[(m - l * ak) as usize])
                })
            })
            .collect();
        level = next;
    }
    Ok(SubspaceBasis {
        polys: level,
        provenance: Provenance::ClassTwo { top },
    })
}

/// The defining sum over raw multi-indices `gamma_{i,j}` with
/// `tau(gamma) = sum_j a_j sum_i gamma_{i,j} = m`, term
/// `prod c_{i,j}^gamma_{i,j} / gamma_{i,j}! * x_i^{sum_j gamma_{i,j}}`.
/// Exponential in `d (n + 1)`; intended as a reference for small inputs.
pub fn class_two_basis_enumerated(
    a: &ExponentLadder,
    c: &CoefficientTable,
) -> Result<SubspaceBasis> {
    check_pair(a, c)?;
    let dim = c.dim();
    let width = a.n() + 1;
    // weights of the flattened cells (i, j), row-major
    let weights: Vec<u32> = (0..dim).flat_map(|_| a.values().iter().copied()).collect();
    let polys = (0..=a.top())
        .map(|m| {
            let mut terms = Vec::new();
            for gamma in weighted_compositions(&weights, m) {
                let mut coeff = Rational::one();
                let mut exps = vec![0u32; dim];
                for (cell, &g) in gamma.iter().enumerate() {
                    if g == 0 {
                        continue;
                    }
                    let (i, j) = (cell / width, cell % width);
                    coeff *= Ring::pow(&c.rows()[i][j], g) * inv_factorial(g);
                    exps[i] += g;
                }
                terms.push((Monomial::new(exps), coeff));
            }
            MPoly::from_terms(dim, terms).expect("arity fixed")
        })
        .collect();
    Ok(SubspaceBasis {
        polys,
        provenance: Provenance::ClassTwo { top: a.top() },
    })
}

/// `d q_{n,m} / d x_{i+1}` predicted by the derivative recursion:
/// `sum over j with a_j <= m of c_{i,j} q_{n, m - a_j}` (with `a_0 = 1`).
/// For `m < a_n` only the `j = 0` term survives.
pub fn class_two_partial_by_recursion(
    a: &ExponentLadder,
    c: &CoefficientTable,
    basis: &[MPoly<Rational>],
    m: u32,
    i: usize,
) -> MPoly<Rational> {
    let mut out = MPoly::zero(c.dim());
    for (j, &aj) in a.values().iter().enumerate() {
        if aj <= m {
            out = &out + &basis[(m - aj) as usize].scale(&c.rows()[i][j]);
        }
    }
    out
}

/// Shared monomial support and coordinate vectors of `polys`.
pub fn coordinates(polys: &[MPoly<Rational>]) -> (Vec<Monomial>, Vec<Vec<Rational>>) {
    let support: BTreeSet<Monomial> = polys.iter().flat_map(|p| p.support().cloned()).collect();
    let support: Vec<Monomial> = support.into_iter().collect();
    let coords = polys
        .iter()
        .map(|p| support.iter().map(|m| p.coeff(m)).collect())
        .collect();
    (support, coords)
}

/// Rank of the coefficient matrix in the monomial basis.
pub fn span_dimension(polys: &[MPoly<Rational>]) -> usize {
    let (_, coords) = coordinates(polys);
    linalg::rank(&coords)
}

/// Outcome of [`check_d_invariance`].
#[derive(Clone, Debug, PartialEq)]
pub enum DInvariance {
    /// `table[k][i]` expresses `d p_k / d x_{i+1}` in the basis.
    Invariant { table: Vec<Vec<Vec<Rational>>> },
    /// `d p_element / d x_{variable+1} = derivative` lies outside the span.
    NotInvariant {
        element: usize,
        variable: usize,
        derivative: MPoly<Rational>,
    },
}

impl DInvariance {
    pub fn is_invariant(&self) -> bool {
        matches!(self, DInvariance::Invariant { .. })
    }
}

/// Certifies closure of `span(polys)` under every partial derivative.
pub fn check_d_invariance(polys: &[MPoly<Rational>]) -> Result<DInvariance> {
    let Some(dim) = polys.first().map(MPoly::dim) else {
        return Ok(DInvariance::Invariant { table: Vec::new() });
    };
    let mut derivs = Vec::with_capacity(polys.len() * dim);
    for p in polys {
        for i in 0..dim {
            derivs.push(p.partial(i)?);
        }
    }
    // Derivatives have support inside the support of the originals shifted
    // down, so gather every monomial involved.
    let all: Vec<MPoly<Rational>> = polys.iter().chain(&derivs).cloned().collect();
    let (support, _) = coordinates(&all);
    let coords =
        |p: &MPoly<Rational>| -> Vec<Rational> { support.iter().map(|m| p.coeff(m)).collect() };
    let columns: Vec<Vec<Rational>> = polys.iter().map(coords).collect();
    let mut table = Vec::with_capacity(polys.len());
    for (k, _) in polys.iter().enumerate() {
        let mut row = Vec::with_capacity(dim);
        for i in 0..dim {
            let d = &derivs[k * dim + i];
            match linalg::express_in_span(&columns, &coords(d)) {
                Some(y) => row.push(y),
                None => {
                    return Ok(DInvariance::NotInvariant {
                        element: k,
                        variable: i,
                        derivative: d.clone(),
                    })
                }
            }
        }
        table.push(row);
    }
    Ok(DInvariance::Invariant { table })
}
