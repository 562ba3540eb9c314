//! Exact dense linear algebra over the rationals, plus fraction-free
//! determinants over any ring with exact division.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{HPoly, Rational, Ring};

pub type Matrix = Vec<Vec<Rational>>;

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns.
fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &factor * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Solves the square system `m x = rhs`.
///
/// Gaussian elimination with the first nonzero entry as pivot; fails with
/// [`Error::GramSingular`] carrying the rank when `m` is singular.
pub fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = m.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    if let Some(row) = m.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(Error::GramSingular {
                rank: rank(m),
                size: n,
            });
        };
        a.swap(k, p);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            let (top, bottom) = a.split_at_mut(i);
            let pivot_row = &top[k];
            for (x, y) in bottom[0][k..].iter_mut().zip(&pivot_row[k..]) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
    }
    let mut x = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let mut acc = a[k][n].clone();
        for j in k + 1..n {
            if !a[k][j].is_zero() {
                acc -= &a[k][j] * &x[j];
            }
        }
        x[k] = acc / &a[k][k];
    }
    Ok(x)
}

/// Determinant by Gaussian elimination over the rationals.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                *x -= &factor * y;
            }
        }
    }
    det
}

/// Fraction-free (Bareiss) determinant. `exact_div(a, b)` must return
/// `a / b` whenever `b` divides `a`; every division Bareiss performs is exact.
pub fn bareiss_determinant<R, F>(m: &[Vec<R>], exact_div: F) -> Result<R>
where
    R: Ring,
    F: Fn(&R, &R) -> Result<R>,
{
    let n = m.len();
    if n == 0 {
        return Ok(R::one());
    }
    if let Some(row) = m.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    let mut a = m.to_vec();
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(R::zero());
        };
        if p != k {
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = exact_div(&num, &prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

pub fn hpoly_determinant(m: &[Vec<HPoly>]) -> Result<HPoly> {
    bareiss_determinant(m, |a, b| a.div_exact(b))
}

/// Coefficients `y` with `sum_j y_j * columns[j] = target`, or `None` when
/// `target` is outside the column span. Free variables are set to zero.
pub fn express_in_span(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = columns.len();
    let rows = target.len();
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut y = vec![Rational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        y[c] = aug[r][k].clone();
    }
    Some(y)
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero())
                        .map(|k| &row[k] * &b[k][j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{hpoly, rat, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect()
    }

    #[test]
    fn solve_small_system() {
        let a = m(&[&[0, 2, 1], &[1, 1, 0], &[3, 0, 1]]);
        let x = solve(&a, &[rat(5), rat(3), rat(4)]).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![rat(5), rat(3), rat(4)]);
    }

    #[test]
    fn singular_reports_rank() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            solve(&a, &[rat(1), rat(1)]),
            Err(Error::GramSingular { rank: 1, size: 2 })
        );
        assert_eq!(determinant(&a), rat(0));
    }

    #[test]
    fn determinants_agree() {
        let a = m(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, -3, 1], &[7, 0, 1, 1]]);
        let gauss = determinant(&a);
        let bareiss = bareiss_determinant(&a, crate::scalar::checked_div).unwrap();
        assert_eq!(gauss, bareiss);
        assert_eq!(gauss, rat(405));
    }

    #[test]
    fn hpoly_bareiss_needs_pivoting() {
        // [[0, h], [1, 1+h]] has determinant -h
        let a = vec![
            vec![HPoly::zero(), hpoly(&[0, 1])],
            vec![hpoly(&[1]), hpoly(&[1, 1])],
        ];
        assert_eq!(hpoly_determinant(&a).unwrap(), hpoly(&[0, -1]));
    }

    #[test]
    fn span_membership() {
        let cols = vec![vec![rat(1), rat(0), rat(1)], vec![rat(0), rat(1), rat(1)]];
        assert_eq!(
            express_in_span(&cols, &[rat(2), rat(3), rat(5)]),
            Some(vec![rat(2), rat(3)])
        );
        assert_eq!(express_in_span(&cols, &[rat(1), rat(0), rat(0)]), None);
        assert_eq!(rank(&[vec![ratio(1, 2), rat(1)], vec![rat(1), rat(2)]]), 1);
    }
}
