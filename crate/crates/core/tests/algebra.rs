use approx::assert_relative_eq;
use kappa_core::algebra::{
    ext_gcd, gaussian_ext_gcd, gauge_value, multiply, random_orthogonal, random_unimodular, AffineElement,
    ExactMatrix, FieldTag, GaussianInt, GroupElement, MatrixElement, NormGauge,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn real_matrix(n: usize) -> impl Strategy<Value = MatrixElement> {
    prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |e| MatrixElement::real(n, &e).unwrap())
}

proptest! {
    #[test]
    fn gauges_are_ordered(m in (2usize..5).prop_flat_map(real_matrix)) {
        let n = m.dim() as f64;
        let (max, frob, op) = (m.norm(NormGauge::MaxEntry), m.norm(NormGauge::Frobenius), m.norm(NormGauge::Operator));
        prop_assert!(max <= op * (1.0 + 1e-12) + 1e-12);
        prop_assert!(max <= frob * (1.0 + 1e-12));
        prop_assert!(op <= frob * (1.0 + 1e-12) + 1e-12);
        prop_assert!(frob <= n * max * (1.0 + 1e-12));
    }

    #[test]
    fn operator_and_frobenius_are_submultiplicative(a in real_matrix(3), b in real_matrix(3)) {
        let ab = a.mul(&b).unwrap();
        for g in [NormGauge::Operator, NormGauge::Frobenius] {
            prop_assert!(ab.norm(g) <= a.norm(g) * b.norm(g) * (1.0 + 1e-10) + 1e-10);
        }
    }

    #[test]
    fn operator_gauge_is_bi_invariant(seed in any::<u64>(), spread in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unimodular(3, FieldTag::Real, spread, &mut rng);
        let (k1, k2) = (random_orthogonal(3, &mut rng), random_orthogonal(3, &mut rng));
        let kgk = k1.mul(&g).unwrap().mul(&k2).unwrap();
        prop_assert!((kgk.norm(NormGauge::Operator) - g.norm(NormGauge::Operator)).abs() < 1e-9 * g.norm(NormGauge::Operator));
    }

    #[test]
    fn unimodular_samples_have_unit_determinant(seed in any::<u64>(), complex in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = if complex { FieldTag::Complex } else { FieldTag::Real };
        let g = random_unimodular(3, field, 0.8, &mut rng);
        prop_assert!((g.det() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn gauge_is_nonnegative_and_compact_perturbations_cost_little(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::Linear(random_unimodular(2, FieldTag::Real, 4.0, &mut rng));
        let u = GroupElement::Linear(random_unimodular(2, FieldTag::Real, 0.1, &mut rng));
        for gauge in [NormGauge::MaxEntry, NormGauge::Frobenius, NormGauge::Operator] {
            let d = gauge_value(&g, gauge).unwrap();
            prop_assert!(d >= 0.0);
            let ug = multiply(&u, &g).unwrap();
            // ‖ug‖ ≤ ‖u‖_op ‖g‖ up to the gauge constant √2 for 2×2 matrices
            let bound = u.norm(NormGauge::Operator).ln() + 2f64.sqrt().ln();
            prop_assert!(gauge_value(&ug, gauge).unwrap() - d <= bound + 1e-12);
        }
    }

    #[test]
    fn affine_inverse_composes_to_identity(m in real_matrix(2), t in prop::collection::vec(-3.0f64..3.0, 2)) {
        prop_assume!(m.det().norm() > 1e-3);
        let a = AffineElement::new(m, t.iter().map(|v| Complex64::new(*v, 0.0)).collect()).unwrap();
        let id = a.compose(&a.inverse().unwrap()).unwrap();
        for (i, z) in id.linear().entries().iter().enumerate() {
            let expected = if i % 3 == 0 { 1.0 } else { 0.0 };
            prop_assert!((z - Complex64::new(expected, 0.0)).norm() < 1e-8);
        }
        prop_assert!(id.translation().iter().all(|z| z.norm() < 1e-8));
    }

    #[test]
    fn bezout_coefficients(a in -10_000i64..10_000, b in -10_000i64..10_000) {
        prop_assume!(a != 0 || b != 0);
        let (g, s, t) = ext_gcd(a, b);
        prop_assert!(g > 0);
        prop_assert_eq!(a * s + b * t, g);
        prop_assert_eq!(a % g, 0);
        prop_assert_eq!(b % g, 0);
    }

    #[test]
    fn gaussian_bezout(ar in -50i64..50, ai in -50i64..50, br in -50i64..50, bi in -50i64..50) {
        let (a, b) = (GaussianInt::new(ar, ai), GaussianInt::new(br, bi));
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, s, t) = gaussian_ext_gcd(a, b);
        prop_assert_eq!(a * s + b * t, g);
        prop_assert_eq!(a.div_round(g) * g, a);
        prop_assert_eq!(b.div_round(g) * g, b);
    }

    #[test]
    fn exact_inverse(a in -20i64..20, b in -20i64..20) {
        let (g, s, t) = ext_gcd(a, b);
        prop_assume!(g == 1);
        let m = ExactMatrix::integer(2, &[a, b, -t, s]).unwrap();
        let inv = m.inverse().unwrap();
        prop_assert_eq!(m.mul(&inv).unwrap(), ExactMatrix::identity(2, FieldTag::Real));
        prop_assert_eq!(m.max_modulus(), inv.max_modulus());
    }
}

#[test]
fn frobenius_of_identity() {
    let g = GroupElement::Linear(MatrixElement::identity(4, FieldTag::Real));
    assert_relative_eq!(g.norm(NormGauge::Frobenius), 2.0);
}

#[test]
fn unknown_gauge_key_is_rejected() {
    assert!(NormGauge::from_key("spectral-radius").is_err());
    for g in [NormGauge::MaxEntry, NormGauge::Frobenius, NormGauge::Operator] {
        assert_eq!(NormGauge::from_key(g.key()).unwrap(), g);
        assert_eq!(NormGauge::from_code(g.code()).unwrap(), g);
    }
}

#[test]
fn affine_norm_uses_embedding() {
    let a = AffineElement::new(
        MatrixElement::identity(2, FieldTag::Real),
        vec![Complex64::new(3.0, 0.0), Complex64::new(-4.0, 0.0)],
    )
    .unwrap();
    let g = GroupElement::Affine(a);
    assert_eq!(g.norm(NormGauge::MaxEntry), 4.0);
    assert_relative_eq!(g.norm(NormGauge::Frobenius), 28f64.sqrt());
}
