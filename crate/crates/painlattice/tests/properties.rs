//! Property tests for the exact polynomial layer.

use painlattice::exact::{newton_interpolate, resultant, ExactPoly};
use proptest::prelude::*;
use rug::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::from((n, d)))
}

fn poly(max_deg: usize) -> impl Strategy<Value = ExactPoly> {
    proptest::collection::vec(rational(), 1..=max_deg + 1).prop_map(ExactPoly::new)
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = ExactPoly> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn product_division_roundtrips(f in poly(5), g in nonzero_poly(4)) {
        let prod = f.mul(&g);
        let back = prod.exact_div(&g).expect("exact division of a product");
        prop_assert_eq!(back, f);
    }

    #[test]
    fn leibniz_rule(f in poly(5), g in poly(5)) {
        let lhs = f.mul(&g).derivative();
        let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divrem_reconstructs(f in poly(6), g in nonzero_poly(3)) {
        let (q, r) = f.divrem(&g);
        prop_assert_eq!(q.mul(&g).add(&r), f);
        prop_assert!(r.is_zero() || r.degree() < g.degree());
    }

    #[test]
    fn evaluation_is_a_ring_morphism(f in poly(5), g in poly(5), x in rational()) {
        let sum = f.add(&g).eval_rational(&x);
        prop_assert_eq!(sum, f.eval_rational(&x) + g.eval_rational(&x));
        let prod = f.mul(&g).eval_rational(&x);
        prop_assert_eq!(prod, f.eval_rational(&x) * g.eval_rational(&x));
    }

    #[test]
    fn interpolation_recovers(f in poly(4)) {
        let nodes: Vec<Rational> = (0..=f.degree() as i64).map(Rational::from).collect();
        let values: Vec<Rational> = nodes.iter().map(|t| f.eval_rational(t)).collect();
        prop_assert_eq!(newton_interpolate(&nodes, &values), f);
    }

    #[test]
    fn resultant_vanishes_iff_common_root(f in nonzero_poly(3), g in nonzero_poly(3), r in rational()) {
        // Force a shared root r on both factors and watch the resultant die.
        let root = ExactPoly::new(vec![Rational::from(-&r), Rational::from(1)]);
        if f.degree() >= 1 && g.degree() >= 1 {
            let res = resultant(&f.mul(&root), &g.mul(&root));
            prop_assert_eq!(res, Rational::new());
        }
    }

    #[test]
    fn gcd_divides_both(f in nonzero_poly(4), g in nonzero_poly(4)) {
        let h = f.gcd(&g);
        prop_assert!(!h.is_zero());
        prop_assert!(f.divrem(&h).1.is_zero());
        prop_assert!(g.divrem(&h).1.is_zero());
    }
}
