//! Exact scalars: arbitrary-precision rationals and polynomials in the
//! perturbation parameter `h` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The base field. `BigRational` keeps numerator and denominator coprime
/// with a positive denominator after every operation.
pub type Rational = BigRational;

/// Coefficient ring for multivariate polynomials.
///
/// Exactly two instantiations are used: [`Rational`] and [`HPoly`].
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;

    fn scale(&self, r: &Rational) -> Self {
        self.clone() * Self::from_rational(r)
    }

    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Ring for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }

    fn pow(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Field operations selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rat_arith(op: RatOp, a: &Rational, b: &Rational) -> Result<Rational> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => checked_div(a, b)?,
    })
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Parses `"p"` or `"p/q"` (optional leading sign). Decimal and exponent
/// notation are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let int = |t: &str| -> Result<BigInt> {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    let n = int(num)?;
    let d = match den {
        Some(d) => int(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(n, d))
}

/// `"p/q"`, with `q` omitted when it is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `sum_{r=0}^{m} (-1)^(m-r) C(m, r) r^n`: the `m`-th forward difference of
/// `r^n` at 0. It is `m!` when `n = m` and 0 when `n < m` (with `0^0 = 1`).
pub fn alternating_power_sum(n: u32, m: u32) -> BigInt {
    (0..=m).fold(BigInt::zero(), |acc, r| {
        let term = binomial(m, r) * num_traits::pow(BigInt::from(r), n as usize);
        if (m - r).is_multiple_of(2) {
            acc + term
        } else {
            acc - term
        }
    })
}

/// serde adapter: a rational as its `"p/q"` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Rational>`.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// serde adapter for `Vec<Vec<Rational>>`.
pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &[Vec<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let strs = Vec::<Vec<String>>::deserialize(d)?;
        strs.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// A polynomial in `h` over the rationals, stored densely by power with no
/// trailing (leading-degree) zero coefficients. The zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        HPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `h`.
    pub fn h() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `c * h^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        HPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, h0: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * h0 + c)
    }

    /// Coefficient of `h^0`; the limit as `h -> 0`.
    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    /// Divides by `h^k`, failing unless the `k` lowest coefficients vanish.
    pub fn div_exact_hpow(&self, k: usize) -> Result<HPoly> {
        if let Some((index, c)) = self
            .coeffs
            .iter()
            .enumerate()
            .take(k)
            .find(|(_, c)| !c.is_zero())
        {
            return Err(Error::NotDivisible {
                power: k,
                index,
                coefficient: format_rational(c),
            });
        }
        Ok(HPoly {
            coeffs: self.coeffs.iter().skip(k).cloned().collect(),
        })
    }

    /// Exact division by a nonzero polynomial; errors on a nonzero remainder.
    pub fn div_exact(&self, divisor: &HPoly) -> Result<HPoly> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if self.is_zero() {
                Ok(HPoly::zero())
            } else {
                Err(Error::Inconsistent(format!(
                    "{self} is not divisible by {divisor}"
                )))
            };
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / lead;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::Inconsistent(format!(
                "{self} is not divisible by {divisor}"
            )));
        }
        Ok(HPoly::from_coeffs(quot))
    }
}

impl Zero for HPoly {
    fn zero() -> Self {
        HPoly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for HPoly {
    fn one() -> Self {
        HPoly::constant(Rational::one())
    }
}

impl Ring for HPoly {
    fn from_rational(r: &Rational) -> Self {
        HPoly::constant(r.clone())
    }

    fn scale(&self, r: &Rational) -> Self {
        HPoly::from_coeffs(self.coeffs.iter().map(|c| c * r).collect())
    }
}

impl<'a> Add<&'a HPoly> for &'a HPoly {
    type Output = HPoly;

    fn add(self, rhs: &HPoly) -> HPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a HPoly> for &'a HPoly {
    type Output = HPoly;

    fn sub(self, rhs: &HPoly) -> HPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a HPoly> for &'a HPoly {
    type Output = HPoly;

    fn mul(self, rhs: &HPoly) -> HPoly {
        if self.is_zero() || rhs.is_zero() {
            return HPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        HPoly::from_coeffs(out)
    }
}

impl Neg for &HPoly {
    type Output = HPoly;

    fn neg(self) -> HPoly {
        HPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for HPoly {
            type Output = HPoly;
            fn $m(self, rhs: HPoly) -> HPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for HPoly {
    type Output = HPoly;

    fn neg(self) -> HPoly {
        -&self
    }
}

impl fmt::Display for HPoly {
    /// Ascending powers, e.g. `2 + h`, `3*h + 7*h^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let power = match k {
                0 => String::new(),
                1 => "h".to_string(),
                _ => format!("h^{k}"),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&power)?;
            } else {
                write!(f, "{mag}*{power}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HPoly({self})")
    }
}

impl Serialize for HPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for HPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rational_vec::deserialize(d).map(HPoly::from_coeffs)
    }
}

/// Builds an `HPoly` from integer coefficients in ascending powers.
pub fn hpoly(coeffs: &[i64]) -> HPoly {
    HPoly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn rational_examples() {
        assert_eq!(
            rat_arith(RatOp::Add, &ratio(1, 2), &ratio(1, 3)).unwrap(),
            ratio(5, 6)
        );
        assert_eq!(
            rat_arith(RatOp::Mul, &ratio(-34949, 14520), &rat(0)).unwrap(),
            rat(0)
        );
        assert_eq!(
            rat_arith(RatOp::Div, &rat(7), &ratio(1, 2)).unwrap(),
            rat(14)
        );
        assert_eq!(
            rat_arith(RatOp::Div, &rat(7), &rat(0)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn canonical_form() {
        let r = ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.numer().gcd(r.denom()), BigInt::one());
        let z = ratio(0, 5);
        assert_eq!(z.denom(), &BigInt::one());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(
            parse_rational("-34949/14520").unwrap(),
            ratio(-34949, 14520)
        );
        assert_eq!(parse_rational(" 4 ").unwrap(), rat(4));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(format_rational(&ratio(3, 2)), "3/2");
        assert_eq!(format_rational(&rat(-7)), "-7");
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/").is_err());
        assert_eq!(parse_rational("1/0"), Err(Error::DivisionByZero));
    }

    #[test]
    fn alternating_sums_small() {
        // m = 2, n = 2: 0 - 2*1 + 4 = 2
        assert_eq!(alternating_power_sum(2, 2), BigInt::from(2));
        assert_eq!(alternating_power_sum(1, 2), BigInt::zero());
        assert_eq!(alternating_power_sum(0, 0), BigInt::one());
        // n > m is outside the identity: m = 1, n = 2 gives 1
        assert_eq!(alternating_power_sum(2, 1), BigInt::one());
    }

    #[test]
    fn hpoly_difference_of_squares() {
        let p = hpoly(&[-1, 1]) * hpoly(&[1, 1]);
        assert_eq!(p, hpoly(&[-1, 0, 1]));
        assert_eq!(&p + &HPoly::zero(), p);
    }

    #[test]
    fn example_determinant_expansion() {
        // (h-1)(2h+1)(2h-1)(1+h)^2
        let left = hpoly(&[-1, 1]) * hpoly(&[1, 2]);
        let right = hpoly(&[-1, 2]) * hpoly(&[1, 1]).pow(2);
        let det = left * right;
        assert_eq!(det, hpoly(&[1, 1, -5, -5, 4, 4]));
        assert_eq!(det.degree(), Some(5));
        assert_eq!(det.eval(&ratio(1, 2)), rat(0));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hpoly(&[2, 1]).eval(&ratio(1, 10)), ratio(21, 10));
        assert_eq!(hpoly(&[0, 0, 1, 1]).eval(&rat(0)), rat(0));
    }

    #[test]
    fn div_exact_hpow_examples() {
        assert_eq!(
            hpoly(&[0, 0, 1, 3]).div_exact_hpow(2).unwrap(),
            hpoly(&[1, 3])
        );
        // ((1+h)^2 - 1) / h
        let diff = hpoly(&[1, 1]).pow(2) - HPoly::one();
        assert_eq!(diff, hpoly(&[0, 2, 1]));
        assert_eq!(diff.div_exact_hpow(1).unwrap(), hpoly(&[2, 1]));
        let err = hpoly(&[1, 1]).div_exact_hpow(1).unwrap_err();
        assert!(matches!(
            err,
            Error::NotDivisible {
                power: 1,
                index: 0,
                ..
            }
        ));
        assert_eq!(HPoly::zero().div_exact_hpow(3).unwrap(), HPoly::zero());
    }

    #[test]
    fn constant_terms() {
        assert_eq!(hpoly(&[2, 1]).constant_term(), rat(2));
        assert_eq!(hpoly(&[0, 0, 1, 1]).constant_term(), rat(0));
        assert_eq!(HPoly::zero().constant_term(), rat(0));
    }

    #[test]
    fn polynomial_division() {
        let a = hpoly(&[-1, 1]);
        let b = hpoly(&[1, 2, 1]);
        assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        assert!(hpoly(&[1, 0, 1]).div_exact(&hpoly(&[0, 1])).is_err());
        assert_eq!(HPoly::zero().div_exact(&b).unwrap(), HPoly::zero());
    }

    #[test]
    fn display_and_serde() {
        assert_eq!(hpoly(&[2, 1]).to_string(), "2 + h");
        assert_eq!(hpoly(&[0, 3, 7]).to_string(), "3*h + 7*h^2");
        assert_eq!(hpoly(&[0, -1, 0, -2]).to_string(), "-h - 2*h^3");
        let p = HPoly::from_coeffs(vec![ratio(1, 2), rat(0), rat(-3)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/2","0","-3"]"#);
        assert_eq!(serde_json::from_str::<HPoly>(&json).unwrap(), p);
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::zero());
    }
}
