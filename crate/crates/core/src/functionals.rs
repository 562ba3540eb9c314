//! Derivative functionals `delta_xi o q(D)`, Hermite schemes, the perturbed
//! Lagrange point sets and the difference-quotient combinations linking the
//! two.
//!
//! For a class-one site the combination for `alpha` is
//! `h^-|alpha| sum_{beta <= alpha} (-1)^|alpha-beta| C(alpha, beta) f(xi + h sum_i beta_i rho_i)`;
//! for a class-two site the combination for `m` is
//! `(m! h^m)^-1 sum_{r <= m} (-1)^(m-r) C(m, r) f(xi + phi(r h))`.
//! Evaluated at points with coordinates in `Q[h]`, the signed sum is always
//! divisible by `h^k` and the quotient's constant term is the derivative
//! functional applied to `f`.

use num_traits::{One, Zero};

use crate::dinvariant::{
    class_one_basis, class_two_basis, CoefficientTable, DirectionFrame, ExponentLadder, LowerSet,
    SubspaceBasis,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multipoly::{apply_diff_op, MPoly, Monomial};
use crate::scalar::{binomial, factorial, format_rational, HPoly, Rational, Ring};

pub type Site = Vec<Rational>;

/// The D-invariant subspace attached to one site.
#[derive(Clone, Debug, PartialEq)]
pub enum SubspaceSpec {
    ClassOne {
        delta: LowerSet,
        rho: DirectionFrame,
    },
    ClassTwo {
        ladder: ExponentLadder,
        table: CoefficientTable,
    },
}

impl SubspaceSpec {
    pub fn dim(&self) -> usize {
        match self {
            SubspaceSpec::ClassOne { rho, .. } => rho.dim(),
            SubspaceSpec::ClassTwo { table, .. } => table.dim(),
        }
    }

    /// Number of functionals the site contributes.
    pub fn len(&self) -> usize {
        match self {
            SubspaceSpec::ClassOne { delta, .. } => delta.len(),
            SubspaceSpec::ClassTwo { ladder, .. } => ladder.top() as usize + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn basis(&self) -> Result<SubspaceBasis> {
        match self {
            SubspaceSpec::ClassOne { delta, rho } => class_one_basis(delta, rho),
            SubspaceSpec::ClassTwo { ladder, table } => class_two_basis(ladder, table),
        }
    }

    /// Index labels in functional order.
    pub fn indices(&self) -> Vec<EntryIndex> {
        match self {
            SubspaceSpec::ClassOne { delta, .. } => delta
                .elements()
                .iter()
                .cloned()
                .map(EntryIndex::Alpha)
                .collect(),
            SubspaceSpec::ClassTwo { ladder, .. } => {
                (0..=ladder.top()).map(EntryIndex::Order).collect()
            }
        }
    }
}

/// Position of a functional inside its site: `alpha` for class one, `m`
/// for class two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryIndex {
    Alpha(Monomial),
    Order(u32),
}

impl std::fmt::Display for EntryIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryIndex::Alpha(a) => write!(f, "alpha={:?}", a.exponents()),
            EntryIndex::Order(m) => write!(f, "m={m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalLabel {
    pub entry: usize,
    pub index: EntryIndex,
}

/// `f -> (q(D) f)(site)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffFunctional {
    pub site: Site,
    pub operator: MPoly<Rational>,
}

pub fn functional_apply(lam: &DiffFunctional, f: &MPoly<Rational>) -> Result<Rational> {
    apply_diff_op(&lam.operator, f)?.eval(&lam.site)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeEntry {
    pub site: Site,
    pub spec: SubspaceSpec,
    pub basis: SubspaceBasis,
}

impl SchemeEntry {
    pub fn new(site: Site, spec: SubspaceSpec) -> Result<Self> {
        if site.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                found: site.len(),
            });
        }
        let basis = spec.basis()?;
        Ok(SchemeEntry { site, spec, basis })
    }

    /// The perturbed point for functional `index`, coordinates in `S`.
    pub fn point<S: Ring>(&self, index: &EntryIndex, h: &S) -> Result<Vec<S>> {
        let offset: Vec<S> = match (&self.spec, index) {
            (SubspaceSpec::ClassOne { rho, .. }, EntryIndex::Alpha(alpha)) => {
                rho.combine(alpha).iter().map(|v| h.scale(v)).collect()
            }
            (SubspaceSpec::ClassTwo { ladder, table }, EntryIndex::Order(m)) => {
                let t = h.scale(&Rational::from_integer((*m).into()));
                table.curve_point(ladder, &t)
            }
            _ => {
                return Err(Error::InvalidIndex(format!(
                    "{index} does not match site kind"
                )))
            }
        };
        Ok(self
            .site
            .iter()
            .zip(offset)
            .map(|(x, o)| S::from_rational(x) + o)
            .collect())
    }

    /// Difference combination for `index`, with point indices local to
    /// this entry.
    pub fn difference_combination(&self, index: &EntryIndex) -> Result<DifferenceCombination> {
        let h = HPoly::h();
        match (&self.spec, index) {
            (SubspaceSpec::ClassOne { delta, .. }, EntryIndex::Alpha(alpha)) => {
                if !delta.contains(alpha) {
                    return Err(Error::InvalidIndex(format!(
                        "{:?} is not in the lower set",
                        alpha.exponents()
                    )));
                }
                let mut comb = DifferenceCombination {
                    points: Vec::new(),
                    weights: Vec::new(),
                    divisor_power: alpha.degree(),
                    point_indices: Vec::new(),
                };
                for beta in alpha.predecessors() {
                    let gap = alpha.degree() - beta.degree();
                    let binom: num_bigint::BigInt = alpha
                        .exponents()
                        .iter()
                        .zip(beta.exponents())
                        .map(|(&a, &b)| binomial(a, b))
                        .product();
                    let mut w = Rational::from_integer(binom);
                    if gap % 2 == 1 {
                        w = -w;
                    }
                    let local = delta
                        .elements()
                        .iter()
                        .position(|e| e == &beta)
                        .expect("lower sets contain every predecessor");
                    comb.points.push(self.point(&EntryIndex::Alpha(beta), &h)?);
                    comb.weights.push(w);
                    comb.point_indices.push(local);
                }
                Ok(comb)
            }
            (SubspaceSpec::ClassTwo { ladder, .. }, &EntryIndex::Order(m)) => {
                if m > ladder.top() {
                    return Err(Error::InvalidIndex(format!(
                        "m = {m} exceeds a_1 = {}",
                        ladder.top()
                    )));
                }
                let norm = Rational::new(1.into(), factorial(m));
                let mut comb = DifferenceCombination {
                    points: Vec::new(),
                    weights: Vec::new(),
                    divisor_power: m,
                    point_indices: Vec::new(),
                };
                for r in 0..=m {
                    let mut w = Rational::from_integer(binomial(m, r)) * &norm;
                    if (m - r) % 2 == 1 {
                        w = -w;
                    }
                    comb.points.push(self.point(&EntryIndex::Order(r), &h)?);
                    comb.weights.push(w);
                    comb.point_indices.push(r as usize);
                }
                Ok(comb)
            }
            _ => Err(Error::InvalidIndex(format!(
                "{index} does not match site kind"
            ))),
        }
    }
}

/// Sites with their subspaces; fixes the canonical functional order
/// (site order, then intra-site order).
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteScheme {
    dim: usize,
    entries: Vec<SchemeEntry>,
}

impl HermiteScheme {
    pub fn new(dim: usize, sites: Vec<(Site, SubspaceSpec)>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidScheme("scheme has no sites".into()));
        }
        let mut entries: Vec<SchemeEntry> = Vec::with_capacity(sites.len());
        for (k, (site, spec)) in sites.into_iter().enumerate() {
            if spec.dim() != dim || site.len() != dim {
                return Err(Error::InvalidScheme(format!(
                    "site {} is not {dim}-dimensional",
                    k + 1
                )));
            }
            if spec.is_empty() {
                return Err(Error::InvalidScheme(format!(
                    "site {} contributes no functionals",
                    k + 1
                )));
            }
            if let Some(j) = entries.iter().position(|e| e.site == site) {
                return Err(Error::InvalidScheme(format!(
                    "sites {} and {} coincide; mixing subspaces at one site is not supported",
                    j + 1,
                    k + 1
                )));
            }
            entries.push(SchemeEntry::new(site, spec)?);
        }
        Ok(HermiteScheme { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[SchemeEntry] {
        &self.entries
    }

    /// Total number of functionals `s`.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.spec.len()).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.entries
            .iter()
            .scan(0, |acc, e| {
                let start = *acc;
                *acc += e.spec.len();
                Some(start)
            })
            .collect()
    }

    pub fn labels(&self) -> Vec<FunctionalLabel> {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(k, e)| {
                e.spec
                    .indices()
                    .into_iter()
                    .map(move |index| FunctionalLabel { entry: k, index })
            })
            .collect()
    }

    pub fn functionals(&self) -> Vec<DiffFunctional> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.basis.polys.iter().map(|q| DiffFunctional {
                    site: e.site.clone(),
                    operator: q.clone(),
                })
            })
            .collect()
    }

    /// Difference combination for functional `label`, with point indices
    /// into the scheme-wide point list.
    pub fn difference_combination(&self, label: &FunctionalLabel) -> Result<DifferenceCombination> {
        let entry = self
            .entries
            .get(label.entry)
            .ok_or_else(|| Error::InvalidIndex(format!("no site {}", label.entry + 1)))?;
        let mut comb = entry.difference_combination(&label.index)?;
        let offset = self.offsets()[label.entry];
        for i in &mut comb.point_indices {
            *i += offset;
        }
        Ok(comb)
    }

    pub fn difference_combinations(&self) -> Result<Vec<DifferenceCombination>> {
        self.labels()
            .iter()
            .map(|l| self.difference_combination(l))
            .collect()
    }

    fn points_in<S: Ring>(&self, h: &S) -> Result<PerturbedPointSet<S>> {
        let labels = self.labels();
        let points = labels
            .iter()
            .map(|l| self.entries[l.entry].point(&l.index, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(PerturbedPointSet {
            points,
            alignment: labels,
        })
    }

    /// Perturbed points with coordinates in `Q[h]`.
    pub fn points_symbolic(&self) -> PerturbedPointSet<HPoly> {
        self.points_in(&HPoly::h())
            .expect("labels always match their own site kind")
    }

    /// Perturbed points at a concrete nonzero `h0`; coinciding points are an
    /// error naming both indices (0-based).
    pub fn points_at(&self, h0: &Rational) -> Result<PerturbedPointSet<Rational>> {
        if h0.is_zero() {
            return Err(Error::InvalidArgument("h must be nonzero".into()));
        }
        let set = self.points_in(h0)?;
        for (i, p) in set.points.iter().enumerate() {
            if let Some(j) = set.points[..i].iter().position(|q| q == p) {
                return Err(Error::Collision {
                    h: format_rational(h0),
                    first: j,
                    second: i,
                });
            }
        }
        Ok(set)
    }

    /// Point coordinates at each `t` with no distinctness check, so `t = 0`
    /// collapses every point onto its site.
    pub fn trajectories(&self, ts: &[Rational]) -> Vec<(Rational, Vec<Vec<Rational>>)> {
        ts.iter()
            .map(|t| {
                let set = self
                    .points_in(t)
                    .expect("labels always match their own site kind");
                (t.clone(), set.points)
            })
            .collect()
    }
}

/// Ordered interpolation points aligned with the scheme's functionals.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedPointSet<S> {
    pub points: Vec<Vec<S>>,
    pub alignment: Vec<FunctionalLabel>,
}

impl PerturbedPointSet<HPoly> {
    pub fn at(&self, h0: &Rational) -> Vec<Vec<Rational>> {
        self.points
            .iter()
            .map(|p| p.iter().map(|c| c.eval(h0)).collect())
            .collect()
    }
}

/// `(sum_i weights[i] * delta_{points[i]}) / h^divisor_power`, with the
/// binomial signs and any `1/m!` normalizer folded into `weights`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceCombination {
    pub points: Vec<Vec<HPoly>>,
    pub weights: Vec<Rational>,
    pub divisor_power: u32,
    /// Index of each point in the owning point list.
    pub point_indices: Vec<usize>,
}

impl DifferenceCombination {
    /// The undivided signed sum `sum_i w_i f(point_i)` in `Q[h]`.
    pub fn weighted_sum(&self, f: &MPoly<Rational>) -> Result<HPoly> {
        let mut acc = HPoly::zero();
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc = &acc + &f.eval(p)?.scale(w);
        }
        Ok(acc)
    }
}

/// The signed sum divided exactly by `h^k`. A nonzero low coefficient means
/// the construction is broken and surfaces as [`Error::NotDivisible`].
pub fn difference_apply(comb: &DifferenceCombination, f: &MPoly<Rational>) -> Result<HPoly> {
    comb.weighted_sum(f)?
        .div_exact_hpow(comb.divisor_power as usize)
}

/// The `h -> 0` limit of [`difference_apply`].
pub fn difference_limit(comb: &DifferenceCombination, f: &MPoly<Rational>) -> Result<Rational> {
    Ok(difference_apply(comb, f)?.constant_term())
}

/// One row of `T`: `(sum_j w_j e_{col_j}) / h^divisor_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformRow {
    pub entries: Vec<(usize, Rational)>,
    pub divisor_power: u32,
}

/// The block matrix `T` mapping raw point evaluations to difference
/// quotients, stored row-wise as rational weights and a power of `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    pub rows: Vec<TransformRow>,
}

pub fn build_transform(scheme: &HermiteScheme) -> Result<Transform> {
    let rows = scheme
        .difference_combinations()?
        .into_iter()
        .map(|c| TransformRow {
            entries: c.point_indices.into_iter().zip(c.weights).collect(),
            divisor_power: c.divisor_power,
        })
        .collect();
    Ok(Transform { rows })
}

impl Transform {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Dense `T(h0)`.
    pub fn at(&self, h0: &Rational) -> Result<Matrix> {
        if h0.is_zero() {
            return Err(Error::InvalidArgument("T is undefined at h = 0".into()));
        }
        let n = self.size();
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let scale = Rational::one() / Ring::pow(h0, row.divisor_power);
                let mut dense = vec![Rational::zero(); n];
                for (j, w) in &row.entries {
                    dense[*j] += w * &scale;
                }
                dense
            })
            .collect())
    }

    /// Every row's weights sit at or left of the diagonal.
    pub fn is_lower_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.entries.iter().all(|(j, _)| *j <= i))
    }

    /// Diagonal as `(weight, power)`, meaning `weight / h^power`.
    pub fn diagonal(&self) -> Vec<(Rational, u32)> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let w = row
                    .entries
                    .iter()
                    .filter(|(j, _)| *j == i)
                    .map(|(_, w)| w.clone())
                    .sum();
                (w, row.divisor_power)
            })
            .collect()
    }

    /// `T` applied to a column of raw values in `Q[h]`, dividing each row
    /// exactly by its power of `h`.
    pub fn apply(&self, raw: &[HPoly]) -> Result<Vec<HPoly>> {
        self.rows
            .iter()
            .map(|row| {
                let sum = row
                    .entries
                    .iter()
                    .fold(HPoly::zero(), |acc, (j, w)| &acc + &raw[*j].scale(w));
                sum.div_exact_hpow(row.divisor_power as usize)
            })
            .collect()
    }
}
