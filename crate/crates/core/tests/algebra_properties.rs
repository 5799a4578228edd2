//! Property tests for the ring and trace structure of the sparse Weyl
//! arithmetic.

use num_complex::Complex64;
use proptest::prelude::*;
use rotcp::biweyl::BiWeylElement;
use rotcp::weyl::WeylElement;
use rotcp::AlgebraContext;

fn ctx() -> AlgebraContext {
    AlgebraContext::golden()
}

fn weyl_strategy() -> impl Strategy<Value = WeylElement> {
    prop::collection::vec(
        ((-3i64..=3, -3i64..=3), (-1.0f64..1.0, -1.0f64..1.0)),
        1..5,
    )
    .prop_map(|terms| {
        WeylElement::from_terms(
            terms
                .into_iter()
                .map(|(m, (re, im))| (m, Complex64::new(re, im))),
        )
    })
}

fn biweyl_strategy() -> impl Strategy<Value = BiWeylElement> {
    prop::collection::vec(
        (
            [-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2],
            (-1.0f64..1.0, -1.0f64..1.0),
        ),
        1..4,
    )
    .prop_map(|terms| {
        BiWeylElement::from_terms(
            terms
                .into_iter()
                .map(|(m, (re, im))| (m, Complex64::new(re, im))),
        )
    })
}

proptest! {
    #[test]
    fn mul_is_associative(a in weyl_strategy(), b in weyl_strategy(), c in weyl_strategy()) {
        let x = ctx();
        let lhs = a.mul(&b, &x).mul(&c, &x);
        let rhs = a.mul(&b.mul(&c, &x), &x);
        prop_assert!((&lhs - &rhs).coeff_norm() < 1e-12);
    }

    #[test]
    fn adjoint_reverses_products(a in weyl_strategy(), b in weyl_strategy()) {
        let x = ctx();
        let lhs = a.mul(&b, &x).adjoint(&x);
        let rhs = b.adjoint(&x).mul(&a.adjoint(&x), &x);
        prop_assert!((&lhs - &rhs).coeff_norm() < 1e-12);
    }

    #[test]
    fn trace_is_tracial(a in weyl_strategy(), b in weyl_strategy()) {
        let x = ctx();
        let ab = a.mul(&b, &x).trace();
        let ba = b.mul(&a, &x).trace();
        prop_assert!((ab - ba).norm() < 1e-12);
    }

    #[test]
    fn trace_of_star_square_is_coefficient_energy(a in weyl_strategy()) {
        let x = ctx();
        let t = a.adjoint(&x).mul(&a, &x).trace();
        let energy: f64 = a.iter().map(|(_, c)| c.norm_sqr()).sum();
        prop_assert!(t.im.abs() < 1e-12);
        prop_assert!(t.re >= -1e-12);
        prop_assert!((t.re - energy).abs() < 1e-12);
    }

    #[test]
    fn bi_mul_is_associative(a in biweyl_strategy(), b in biweyl_strategy(), c in biweyl_strategy()) {
        let x = ctx();
        let lhs = a.mul(&b, &x).mul(&c, &x);
        let rhs = a.mul(&b.mul(&c, &x), &x);
        prop_assert!((&lhs - &rhs).coeff_norm() < 1e-12);
    }

    #[test]
    fn tau2_positive_on_star_squares(a in biweyl_strategy()) {
        let x = ctx();
        let t = a.adjoint(&x).mul(&a, &x).tau2();
        prop_assert!(t.im.abs() < 1e-12);
        prop_assert!(t.re >= -1e-12);
    }

    #[test]
    fn left_embedding_is_multiplicative(a in weyl_strategy(), b in weyl_strategy()) {
        let x = ctx();
        let lhs = BiWeylElement::from_left(&a.mul(&b, &x));
        let rhs = BiWeylElement::from_left(&a).mul(&BiWeylElement::from_left(&b), &x);
        prop_assert!((&lhs - &rhs).coeff_norm() < 1e-12);
    }
}
