mod common;

use hermite_limit::dinvariant::{
    check_d_invariance, class_one_basis, class_two_basis, class_two_basis_enumerated,
    class_two_basis_oracle, span_dimension, DirectionFrame,
};
use hermite_limit::functionals::{
    difference_apply, functional_apply, HermiteScheme, SchemeEntry, SubspaceSpec,
};
use hermite_limit::scalar::{alternating_power_sum, factorial, ratio};
use hermite_limit::{apply_diff_op, HPoly, MPoly, Monomial, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn hpoly() -> impl Strategy<Value = HPoly> {
    prop::collection::vec(rational(), 0..6).prop_map(HPoly::from_coeffs)
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

/// `sum_j v_j d/dx_j f`.
fn directional(v: &[Rational], f: &MPoly<Rational>) -> MPoly<Rational> {
    v.iter()
        .enumerate()
        .fold(MPoly::zero(f.dim()), |acc, (j, vj)| {
            &acc + &f.partial(j).unwrap().scale(vj)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hpoly_eval_is_a_ring_morphism(p in hpoly(), q in hpoly(), h0 in rational()) {
        prop_assert_eq!((&p * &q).eval(&h0), p.eval(&h0) * q.eval(&h0));
        prop_assert_eq!((&p + &q).eval(&h0), p.eval(&h0) + q.eval(&h0));
        prop_assert_eq!((&p - &q).eval(&h0), p.eval(&h0) - q.eval(&h0));
    }

    #[test]
    fn hpoly_degree_is_additive(p in hpoly(), q in hpoly()) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let d = (&p * &q).degree().unwrap();
        prop_assert_eq!(d, p.degree().unwrap() + q.degree().unwrap());
    }

    #[test]
    fn hpow_division_round_trips(p in hpoly(), k in 0usize..=8) {
        let shifted = &p * &HPoly::monomial(Rational::from_integer(1.into()), k);
        prop_assert_eq!(shifted.div_exact_hpow(k).unwrap(), p.clone());
        if k > 0 && !p.constant_term().is_zero() {
            prop_assert!(p.div_exact_hpow(k).is_err());
        }
    }

    #[test]
    fn partials_commute(s in seed()) {
        let mut rng = common::rng(s);
        let f = common::poly(&mut rng, 3, 5, 8);
        for i in 0..3 {
            for j in 0..3 {
                let a = f.partial(i).unwrap().partial(j).unwrap();
                let b = f.partial(j).unwrap().partial(i).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn diff_op_is_bilinear(s in seed(), c in rational()) {
        let mut rng = common::rng(s);
        let p1 = common::poly(&mut rng, 2, 3, 4);
        let p2 = common::poly(&mut rng, 2, 3, 4);
        let f = common::poly(&mut rng, 2, 5, 6);
        let g = common::poly(&mut rng, 2, 5, 6);
        prop_assert_eq!(
            apply_diff_op(&(&p1 + &p2.scale(&c)), &f).unwrap(),
            &apply_diff_op(&p1, &f).unwrap() + &apply_diff_op(&p2, &f).unwrap().scale(&c)
        );
        prop_assert_eq!(
            apply_diff_op(&p1, &(&f + &g.scale(&c))).unwrap(),
            &apply_diff_op(&p1, &f).unwrap() + &apply_diff_op(&p1, &g).unwrap().scale(&c)
        );
    }

    #[test]
    fn operator_polynomial_is_iterated_directional_derivative(
        s in seed(),
        alpha in prop::collection::vec(0u32..=2, 3),
    ) {
        prop_assume!(alpha.iter().sum::<u32>() <= 4);
        let mut rng = common::rng(s);
        let rho: DirectionFrame = common::frame(&mut rng, 3);
        let f = common::poly(&mut rng, 3, 6, 8);
        let op = rho.operator_poly(&Monomial::new(alpha.clone()));
        let mut brute = f.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                brute = directional(&rho.vectors()[i], &brute);
            }
        }
        prop_assert_eq!(apply_diff_op(&op, &f).unwrap(), brute);
    }

    #[test]
    fn mpoly_eval_is_a_ring_morphism(s in seed(), pt in prop::collection::vec(rational(), 3)) {
        let mut rng = common::rng(s);
        let f = common::poly(&mut rng, 3, 4, 6);
        let g = common::poly(&mut rng, 3, 4, 6);
        prop_assert_eq!((&f * &g).eval(&pt).unwrap(), f.eval(&pt).unwrap() * g.eval(&pt).unwrap());
        prop_assert_eq!((&f + &g).eval(&pt).unwrap(), f.eval(&pt).unwrap() + g.eval(&pt).unwrap());
        // evaluation over Q[h] then at h0 equals evaluation at the specialized point
        let h0 = ratio(1, 7);
        let lifted: Vec<HPoly> = pt
            .iter()
            .map(|c| HPoly::from_coeffs(vec![c.clone(), Rational::from_integer(1.into())]))
            .collect();
        let shifted: Vec<Rational> = pt.iter().map(|c| c + &h0).collect();
        prop_assert_eq!(f.eval(&lifted).unwrap().eval(&h0), f.eval(&shifted).unwrap());
    }

    #[test]
    fn class_one_bases_are_d_invariant(s in seed()) {
        let mut rng = common::rng(s);
        let dim = 1 + (s % 3) as usize;
        let delta = common::lower_set(&mut rng, dim, 7);
        let rho = common::frame(&mut rng, dim);
        let basis = class_one_basis(&delta, &rho).unwrap();
        prop_assert_eq!(basis.len(), delta.len());
        prop_assert_eq!(span_dimension(&basis.polys), delta.len());
        prop_assert!(check_d_invariance(&basis.polys).unwrap().is_invariant());
    }

    #[test]
    fn class_two_structure(s in seed()) {
        let mut rng = common::rng(s);
        let dim = 1 + (s % 3) as usize;
        let a = common::ladder(&mut rng, 2, 6);
        let c = common::table(&mut rng, dim, &a);
        let basis = class_two_basis(&a, &c).unwrap();
        prop_assert_eq!(span_dimension(&basis.polys), a.top() as usize + 1);
        prop_assert!(check_d_invariance(&basis.polys).unwrap().is_invariant());
        prop_assert_eq!(&class_two_basis_oracle(&a, &c).unwrap().polys, &basis.polys);
        prop_assert_eq!(&class_two_basis_enumerated(&a, &c).unwrap().polys, &basis.polys);
        // deg q_m = m, and x_i^m appears whenever c_{i,0} != 0
        let i0 = c.rows().iter().position(|r| !r[0].is_zero()).unwrap();
        for (m, q) in basis.polys.iter().enumerate() {
            prop_assert_eq!(q.degree(), Some(m as u32));
            let mut e = vec![0u32; dim];
            e[i0] = m as u32;
            prop_assert!(!q.coeff(&Monomial::new(e)).is_zero());
        }
    }

    #[test]
    fn difference_quotients_divide_exactly(s in seed()) {
        let mut rng = common::rng(s);
        let dim = 1 + (s % 3) as usize;
        let spec: SubspaceSpec = if s % 2 == 0 {
            common::class_one_spec(&mut rng, dim, 5)
        } else {
            common::class_two_spec(&mut rng, dim, 2, 4)
        };
        let xi = common::site(&mut rng, dim);
        let f = common::poly(&mut rng, dim, 5, 5);
        let entry = SchemeEntry::new(xi.clone(), spec.clone()).unwrap();
        let scheme = HermiteScheme::new(dim, vec![(xi, spec)]).unwrap();
        for (label, lam) in scheme.labels().iter().zip(scheme.functionals()) {
            let comb = entry.difference_combination(&label.index).unwrap();
            let q = difference_apply(&comb, &f).unwrap();
            prop_assert_eq!(q.constant_term(), functional_apply(&lam, &f).unwrap());
        }
    }
}

#[test]
fn alternating_sum_identity() {
    for m in 0..=12u32 {
        for n in 0..=m {
            let want = if n == m { factorial(m) } else { BigInt::zero() };
            assert_eq!(alternating_power_sum(n, m), want, "n = {n}, m = {m}");
        }
    }
}
