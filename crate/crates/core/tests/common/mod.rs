//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use hermite_limit::dinvariant::{
    lower_set_validate, CoefficientTable, DirectionFrame, ExponentLadder, LowerSet,
};
use hermite_limit::functionals::{HermiteScheme, SubspaceSpec};
use hermite_limit::linalg;
use hermite_limit::scalar::{rat, ratio};
use hermite_limit::{MPoly, Monomial, Rational};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Small rational with numerator in `-k..=k` and denominator in `1..=3`.
pub fn small_rational(rng: &mut StdRng, k: i64) -> Rational {
    ratio(rng.gen_range(-k..=k), rng.gen_range(1..=3))
}

/// `a_0 = 1 > ... `: `n` in `1..=max_n` distinct values from `2..=max_top`,
/// sorted descending after the leading 1.
pub fn ladder(rng: &mut StdRng, max_n: usize, max_top: u32) -> ExponentLadder {
    let pool: Vec<u32> = (2..=max_top).collect();
    let n = rng.gen_range(1..=max_n.min(pool.len()));
    let mut picked: Vec<u32> = pool.choose_multiple(rng, n).copied().collect();
    picked.sort_unstable_by(|a, b| b.cmp(a));
    let mut a = vec![1];
    a.extend(picked);
    ExponentLadder::new(a).expect("generated ladder is valid")
}

/// Integer entries in `-2..=2`, column 0 not identically zero.
pub fn table(rng: &mut StdRng, dim: usize, ladder: &ExponentLadder) -> CoefficientTable {
    loop {
        let c: Vec<Vec<Rational>> = (0..dim)
            .map(|_| {
                (0..=ladder.n())
                    .map(|_| rat(rng.gen_range(-2..=2)))
                    .collect()
            })
            .collect();
        if let Ok(t) = CoefficientTable::new(c, ladder) {
            return t;
        }
    }
}

/// Grows a lower set from the origin by random admissible corners.
pub fn lower_set(rng: &mut StdRng, dim: usize, max_len: usize) -> LowerSet {
    let target = rng.gen_range(1..=max_len);
    let mut elems: Vec<Vec<u32>> = vec![vec![0; dim]];
    let mut attempts = 0;
    while elems.len() < target && attempts < 200 {
        attempts += 1;
        let base = elems.choose(rng).expect("nonempty").clone();
        let mut cand = base;
        cand[rng.gen_range(0..dim)] += 1;
        if elems.contains(&cand) {
            continue;
        }
        let closed = (0..dim).all(|i| {
            if cand[i] == 0 {
                return true;
            }
            let mut p = cand.clone();
            p[i] -= 1;
            elems.contains(&p)
        });
        if closed {
            elems.push(cand);
        }
    }
    lower_set_validate(dim, elems).expect("generated set is lower")
}

/// Integer frame with entries in `-2..=2` and nonzero determinant.
pub fn frame(rng: &mut StdRng, dim: usize) -> DirectionFrame {
    loop {
        let rows: Vec<Vec<Rational>> = (0..dim)
            .map(|_| (0..dim).map(|_| rat(rng.gen_range(-2..=2))).collect())
            .collect();
        if linalg::determinant(&rows) != rat(0) {
            return DirectionFrame::new(rows).expect("nonsingular frame");
        }
    }
}

pub fn site(rng: &mut StdRng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| rat(rng.gen_range(-3..=3))).collect()
}

/// Random polynomial of total degree at most `max_deg` with up to `terms`
/// terms and small rational coefficients.
pub fn poly(rng: &mut StdRng, dim: usize, max_deg: u32, terms: usize) -> MPoly<Rational> {
    let mut out = MPoly::zero(dim);
    for _ in 0..rng.gen_range(1..=terms) {
        let deg = rng.gen_range(0..=max_deg);
        let mut e = vec![0u32; dim];
        for _ in 0..deg {
            e[rng.gen_range(0..dim)] += 1;
        }
        out = &out + &MPoly::term(Monomial::new(e), small_rational(rng, 5));
    }
    out
}

pub fn class_one_spec(rng: &mut StdRng, dim: usize, max_len: usize) -> SubspaceSpec {
    SubspaceSpec::ClassOne {
        delta: lower_set(rng, dim, max_len),
        rho: frame(rng, dim),
    }
}

pub fn class_two_spec(rng: &mut StdRng, dim: usize, max_n: usize, max_top: u32) -> SubspaceSpec {
    let ladder = ladder(rng, max_n, max_top);
    let table = table(rng, dim, &ladder);
    SubspaceSpec::ClassTwo { ladder, table }
}

/// One class-one site and one class-two site at distinct random points.
pub fn mixed_scheme(rng: &mut StdRng, dim: usize) -> HermiteScheme {
    let one = class_one_spec(rng, dim, 4);
    let two = class_two_spec(rng, dim, 2, 4);
    let xi1 = site(rng, dim);
    let mut xi2 = site(rng, dim);
    while xi2 == xi1 {
        xi2 = site(rng, dim);
    }
    HermiteScheme::new(dim, vec![(xi1, one), (xi2, two)]).expect("distinct sites")
}
