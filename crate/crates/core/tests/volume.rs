use kappa_core::algebra::NormGauge;
use kappa_core::volume::{
    closed_form_exponent, estimate_growth_exponent, growth_exponent_closed_form, monte_carlo_log_volume, weighted_slope,
    CartanChart, DensityKind, FieldLabel, GroupDescriptor, McBudget, Rational, RootTerm, SimplexChart,
};
use kappa_core::Error;
use proptest::prelude::*;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn budget(samples: usize) -> McBudget {
    McBudget { samples, max_stderr: None }
}

#[test]
fn rank_one_exponential_chart_matches_closed_form() {
    let (w, m) = (0.5, 3.0);
    let chart = CartanChart::single(SimplexChart {
        norm_weights: vec![w],
        roots: vec![RootTerm { coeffs: vec![1.0], multiplicity: m }],
        density: DensityKind::Exp,
    });
    for t in [1.0, 4.0, 9.0] {
        let exact = (((m * t / w).exp() - 1.0) / m).ln();
        let lv = monte_carlo_log_volume(&chart, t, budget(100_000), 11).unwrap();
        assert!((lv.value - exact).abs() < 1e-9 + 5.0 * lv.stderr, "t = {t}: {} vs {exact}", lv.value);
    }
}

#[test]
fn rank_two_exponential_chart_matches_quadrature() {
    let (w1, w2, m1, m2) = (2.0 / 3.0, 1.0 / 3.0, 2.0, 1.0);
    let chart = CartanChart::single(SimplexChart {
        norm_weights: vec![w1, w2],
        roots: vec![
            RootTerm { coeffs: vec![1.0, 0.0], multiplicity: m1 },
            RootTerm { coeffs: vec![0.0, 1.0], multiplicity: m2 },
        ],
        density: DensityKind::Exp,
    });
    let t = 3.0;
    let inner = |u1: f64| (m1 * u1).exp() * (((m2 * (t - w1 * u1) / w2).exp() - 1.0) / m2);
    let exact = simpson(inner, 0.0, t / w1, 20_000).ln();
    let lv = monte_carlo_log_volume(&chart, t, budget(400_000), 5).unwrap();
    assert!((lv.value - exact).abs() < 5.0 * lv.stderr + 1e-6, "{} vs {exact} ± {}", lv.value, lv.stderr);
}

#[test]
fn sl2_increments_match_cosh_law() {
    // log-norm t: Cartan parameter u ≤ 2t, density sinh u
    let chart = CartanChart::for_group(&GroupDescriptor::SpecialLinear { n: 2, field: FieldLabel::Real }).unwrap();
    let v = |t: f64| monte_carlo_log_volume(&chart, t, budget(50_000), 3).unwrap().value;
    let exact = |t: f64| ((2.0 * t).cosh() - 1.0).ln();
    for (a, b) in [(1.0, 2.0), (2.0, 5.0), (5.0, 10.0)] {
        assert!(((v(b) - v(a)) - (exact(b) - exact(a))).abs() < 1e-3, "{a} → {b}");
    }
}

#[test]
fn closed_forms_table() {
    let r = Rational::new;
    let sl = |n, field| GroupDescriptor::SpecialLinear { n, field };
    let cases = [
        (sl(2, FieldLabel::Real), r(2, 1)),
        (sl(2, FieldLabel::Complex), r(4, 1)),
        (sl(3, FieldLabel::Real), r(6, 1)),
        (sl(3, FieldLabel::Complex), r(12, 1)),
        (GroupDescriptor::Sl2Image { blocks: vec![3], field: FieldLabel::Real }, r(1, 1)),
        (GroupDescriptor::Sl2Image { blocks: vec![4], field: FieldLabel::Real }, r(2, 3)),
        (GroupDescriptor::Sl2Image { blocks: vec![3, 2], field: FieldLabel::Real }, r(1, 1)),
        (GroupDescriptor::Diagonal { n: 3, field: FieldLabel::Real, copies: 2 }, r(6, 1)),
        (GroupDescriptor::Product(vec![sl(2, FieldLabel::Real), sl(2, FieldLabel::Complex)]), r(6, 1)),
    ];
    for (g, a) in cases {
        assert_eq!(closed_form_exponent(&g).unwrap(), a, "{g:?}");
        let vg = growth_exponent_closed_form(&g, NormGauge::Frobenius).unwrap();
        assert_eq!(vg.a_exact, Some((*a.numer(), *a.denom())));
    }
    assert!(closed_form_exponent(&sl(1, FieldLabel::Real)).is_err());
    assert!(closed_form_exponent(&GroupDescriptor::Product(vec![])).is_err());
}

#[test]
fn fits_need_four_levels_and_enough_samples() {
    let chart = CartanChart::for_group(&GroupDescriptor::SpecialLinear { n: 3, field: FieldLabel::Real }).unwrap();
    let err = estimate_growth_exponent(&chart, &[1.0, 2.0, 3.0], budget(100), 0, NormGauge::Operator).unwrap_err();
    assert_eq!(err, Error::TooFewPoints { needed: 4, have: 3 });
    let strict = McBudget { samples: 50, max_stderr: Some(1e-9) };
    assert!(matches!(monte_carlo_log_volume(&chart, 5.0, strict, 0), Err(Error::BudgetTooSmall { .. })));
    assert!(monte_carlo_log_volume(&chart, 5.0, budget(0), 0).is_err());
    assert!(CartanChart::for_group(&GroupDescriptor::SpecialLinear { n: 2, field: FieldLabel::PAdic(3) }).is_err());
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let chart = CartanChart::for_group(&GroupDescriptor::SpecialLinear { n: 3, field: FieldLabel::Real }).unwrap();
    let a = monte_carlo_log_volume(&chart, 6.0, budget(20_000), 9).unwrap();
    let b = monte_carlo_log_volume(&chart, 6.0, budget(20_000), 9).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn weighted_slope_recovers_exact_lines(
        slope in -5.0f64..5.0,
        icept in -5.0f64..5.0,
        sig in prop::collection::vec(0.01f64..2.0, 5..12),
    ) {
        let x: Vec<f64> = (0..sig.len()).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = x.iter().map(|v| slope * v + icept).collect();
        let (s, c, _) = weighted_slope(&x, &y, &sig).unwrap();
        prop_assert!((s - slope).abs() < 1e-9);
        prop_assert!((c - icept).abs() < 1e-9);
    }

    #[test]
    fn log_volume_is_increasing(t in 0.5f64..8.0, dt in 0.5f64..4.0) {
        let chart = CartanChart::for_group(&GroupDescriptor::SpecialLinear { n: 2, field: FieldLabel::Real }).unwrap();
        let a = monte_carlo_log_volume(&chart, t, budget(2_000), 1).unwrap();
        let b = monte_carlo_log_volume(&chart, t + dt, budget(2_000), 1).unwrap();
        prop_assert!(b.value > a.value);
    }
}
