//! Sparse multivariate polynomials over a generic coefficient ring.
//!
//! Variables are indexed from 0 in the API and printed 1-based (`x1..xd`).
//! Terms are kept in a `BTreeMap` under the graded-lexicographic order with
//! `x1 > x2 > ... > xd`, so iteration is ascending: `1, x3, x2, x1, x3^2,
//! x3*x2, x3*x1, x2^2, ...` for `d = 3`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rat, Rational, Ring};

/// An exponent vector `alpha`, standing for `x1^alpha1 * ... * xd^alphad`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `||alpha||_1`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `alpha!` as a rational.
    pub fn factorial(&self) -> Rational {
        self.0
            .iter()
            .map(|&e| Rational::from_integer(crate::scalar::factorial(e)))
            .product()
    }

    /// Componentwise product order `self <= other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; caller guarantees `other <= self`.
    fn sub(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Every `beta <= self`, in ascending graded-lex order of [`Ord`].
    pub fn predecessors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=e).map(move |k| {
                        let mut p = prefix.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<Monomial> = out.into_iter().map(Monomial).collect();
        out.sort();
        out
    }

    /// All exponent vectors in `dim` variables of total degree `deg`.
    pub fn all_of_degree(dim: usize, deg: u32) -> Vec<Monomial> {
        fn rec(dim: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == dim {
                prefix.push(deg);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in 0..=deg {
                prefix.push(k);
                rec(dim, deg - k, prefix, out);
                prefix.pop();
            }
        }
        if dim == 0 {
            return if deg == 0 {
                vec![Monomial(vec![])]
            } else {
                vec![]
            };
        }
        let mut out = Vec::new();
        rec(dim, deg, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    /// Highest-index variable first: `x3*x1`, `x3^2`, `1` for the empty product.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect();
        if factors.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&factors.join("*"))
        }
    }
}

/// A polynomial in `dim` variables; no stored zero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct MPoly<R> {
    dim: usize,
    terms: BTreeMap<Monomial, R>,
}

impl<R: Ring> MPoly<R> {
    pub fn zero(dim: usize) -> Self {
        MPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: R) -> Self {
        Self::term(Monomial::one(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, R::one())
    }

    /// The variable `x_{i+1}`.
    pub fn var(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::VariableOutOfRange { index: i, dim });
        }
        Ok(Self::term(Monomial::var(dim, i), R::one()))
    }

    pub fn term(m: Monomial, c: R) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, R)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&R::from_rational(c))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `d/dx_{i+1}`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.dim {
            return Err(Error::VariableOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, c.scale(&rat(e as i64)));
        }
        Ok(out)
    }

    /// `d^|alpha| / dx^alpha`, using `d^alpha x^beta = beta!/(beta-alpha)! x^(beta-alpha)`.
    pub fn derivative(&self, alpha: &Monomial) -> Result<Self> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.dim(),
            });
        }
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if !alpha.divides(m) {
                continue;
            }
            let rest = m.sub(alpha);
            let factor = m.factorial() / rest.factorial();
            out.add_term(rest, c.scale(&factor));
        }
        Ok(out)
    }

    /// Substitutes `x_{i+1} -> point[i]` with `point` in the coefficient ring.
    pub fn eval_in_ring(&self, point: &[R]) -> Result<R> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = t * x.pow(e);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}

impl MPoly<Rational> {
    /// The linear form `c . x = c1*x1 + ... + cd*xd`.
    pub fn linear_form(c: &[Rational]) -> Self {
        let dim = c.len();
        let terms = c
            .iter()
            .enumerate()
            .map(|(i, ci)| (Monomial::var(dim, i), ci.clone()));
        Self::from_terms(dim, terms).expect("arity matches by construction")
    }

    /// Evaluates at a point whose coordinates live in any coefficient ring,
    /// e.g. `HPoly` coordinates give a polynomial in `h`.
    pub fn eval<S: Ring>(&self, point: &[S]) -> Result<S> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<S>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &top)| {
                let mut pw = Vec::with_capacity(top as usize + 1);
                pw.push(S::one());
                for k in 1..=top as usize {
                    let next = pw[k - 1].clone() * x.clone();
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Lifts to a polynomial over another ring.
    pub fn lift<S: Ring>(&self) -> MPoly<S> {
        MPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), S::from_rational(c)))
                .collect(),
        }
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| TermRecord {
                exponents: m.0.clone(),
                coefficient: format_rational(c),
            })
            .collect()
    }

    pub fn from_records(dim: usize, records: &[TermRecord]) -> Result<Self> {
        let terms = records
            .iter()
            .map(|r| {
                Ok((
                    Monomial::new(r.exponents.clone()),
                    parse_rational(&r.coefficient)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(dim, terms)
    }
}

/// `p(D) f = sum_alpha p^(alpha) d^alpha f`.
pub fn apply_diff_op(p: &MPoly<Rational>, f: &MPoly<Rational>) -> Result<MPoly<Rational>> {
    p.check_dim(f)?;
    let mut out = MPoly::zero(f.dim());
    for (alpha, c) in p.terms() {
        out = &out + &f.derivative(alpha)?.scale(c);
    }
    Ok(out)
}

/// One serialized term: `{"exponents": [..], "coefficient": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

impl fmt::Display for MPoly<Rational> {
    /// Ascending graded-lex, e.g. `4 - 2*x3 - 4*x1 - x3^2 + 4*x3*x1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.degree() == 0 {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($($tr:ident :: $m:ident => $checked:ident),*) => {$(
        impl<'a, R: Ring> std::ops::$tr<&'a MPoly<R>> for &'a MPoly<R> {
            type Output = MPoly<R>;
            /// Panics on dimension mismatch; use the `checked_*` form for
            /// untrusted operands.
            fn $m(self, rhs: &MPoly<R>) -> MPoly<R> {
                self.$checked(rhs).expect("polynomial dimension mismatch")
            }
        }
    )*};
}

forward_binop!(Add::add => checked_add, Sub::sub => checked_sub, Mul::mul => checked_mul);

impl<R: Ring> std::ops::Neg for &MPoly<R> {
    type Output = MPoly<R>;

    fn neg(self) -> MPoly<R> {
        MPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}
