mod common;

use kappa_core::algebra::{LatticeElement, NormGauge};
use kappa_core::enumeration::cache::{read_cache, write_cache};
use kappa_core::enumeration::{
    count, enumerate, exact_norm, EnumerationBudget, LatticeId, LatticeSpec, OverflowPolicy,
};
use kappa_core::Error;
use proptest::prelude::*;

fn flat(spec: LatticeSpec, radius: f64) -> Vec<Vec<i64>> {
    enumerate(spec, radius, EnumerationBudget::UNLIMITED).unwrap().elements.iter().map(|g| g.flat_entries()).collect()
}

#[test]
fn sl2z_matches_brute_force_to_50() {
    let spec = LatticeSpec::new(LatticeId::Sl2Z, NormGauge::MaxEntry);
    let got = flat(spec, 50.0);
    let want: Vec<Vec<i64>> = common::sl2z_ball(50).into_iter().map(|m| m.to_vec()).collect();
    // stream order is lexicographic, so no sort is needed
    assert_eq!(got, want);
    assert_eq!(count(spec, 50.0), want.len() as u64);
}

#[test]
fn sl3z_matches_brute_force_to_3() {
    let spec = LatticeSpec::new(LatticeId::Sl3Z, NormGauge::MaxEntry);
    for t in 1..=3 {
        let got = flat(spec, t as f64);
        let want: Vec<Vec<i64>> = common::sl3z_ball(t).into_iter().map(|m| m.to_vec()).collect();
        assert_eq!(got, want, "T = {t}");
        assert_eq!(count(spec, t as f64), want.len() as u64);
    }
}

#[test]
fn gaussian_linear_parts_match_brute_force() {
    let spec = LatticeSpec::new(LatticeId::Sl2GaussAffine, NormGauge::MaxEntry);
    for r in 1..=2 {
        let mut got: Vec<Vec<i64>> = kappa_core::enumeration::enumerate_affine_linear_parts(spec, r as f64, EnumerationBudget::UNLIMITED)
            .unwrap()
            .elements
            .iter()
            .map(|g| g.flat_entries())
            .collect();
        got.sort();
        let want: Vec<Vec<i64>> = common::sl2_gauss_ball(r).into_iter().map(|m| m.to_vec()).collect();
        assert_eq!(got, want, "radius {r}");
    }
}

#[test]
fn finer_gauges_filter_the_max_entry_ball() {
    for id in [LatticeId::Sl2Z, LatticeId::Sl2ZAffine] {
        let max_ball = enumerate(LatticeSpec::new(id, NormGauge::MaxEntry), 6.0, EnumerationBudget::UNLIMITED).unwrap();
        for gauge in [NormGauge::Frobenius, NormGauge::Operator] {
            let spec = LatticeSpec::new(id, gauge);
            let want: Vec<&LatticeElement> =
                max_ball.elements.iter().filter(|g| exact_norm(g, gauge) <= 6.0).collect();
            let got = enumerate(spec, 6.0, EnumerationBudget::UNLIMITED).unwrap();
            assert_eq!(got.elements.len(), want.len(), "{id:?} {gauge:?}");
            assert!(got.elements.iter().zip(want).all(|(a, b)| a == b));
            assert_eq!(count(spec, 6.0), got.elements.len() as u64);
        }
    }
}

#[test]
fn affine_count_factorises() {
    let spec = LatticeSpec::new(LatticeId::Sl2ZAffine, NormGauge::MaxEntry);
    let linear = common::sl2z_ball(3).len() as u64;
    assert_eq!(count(spec, 3.0), linear * 7 * 7);
    assert_eq!(flat(spec, 3.0).len() as u64, count(spec, 3.0));
}

#[test]
fn budget_policies() {
    let spec = LatticeSpec::new(LatticeId::Sl2Z, NormGauge::MaxEntry);
    let err = enumerate(spec, 10.0, EnumerationBudget::capped(5, OverflowPolicy::Error)).unwrap_err();
    assert_eq!(err, Error::BudgetExceeded(5));
    let cut = enumerate(spec, 10.0, EnumerationBudget::capped(5, OverflowPolicy::Truncate)).unwrap();
    assert!(cut.truncated);
    assert_eq!(cut.elements.len(), 5);
    let all = enumerate(spec, 1.0, EnumerationBudget::capped(100, OverflowPolicy::Error)).unwrap();
    assert!(!all.truncated);
}

#[test]
fn cache_round_trip() {
    for id in LatticeId::ALL {
        let spec = LatticeSpec::new(id, NormGauge::Frobenius);
        let radius = if id == LatticeId::Sl3Z { 2.0 } else { 2.5 };
        let elements = enumerate(spec, radius, EnumerationBudget::UNLIMITED).unwrap().elements;
        let file = tempfile::NamedTempFile::new().unwrap();
        write_cache(std::fs::File::create(file.path()).unwrap(), spec, radius, &elements).unwrap();
        let (spec2, radius2, elements2) = read_cache(std::fs::File::open(file.path()).unwrap()).unwrap();
        assert_eq!(spec2, spec);
        assert_eq!(radius2, radius);
        assert_eq!(elements2, elements);
    }
}

#[test]
fn cache_rejects_foreign_bytes() {
    assert!(read_cache(&b"NOPE and some more bytes"[..]).is_err());
    let spec = LatticeSpec::new(LatticeId::Sl2Z, NormGauge::MaxEntry);
    let mut buf = Vec::new();
    write_cache(&mut buf, spec, 1.0, &enumerate(spec, 1.0, EnumerationBudget::UNLIMITED).unwrap().elements).unwrap();
    buf.truncate(buf.len() - 3);
    assert!(read_cache(&buf[..]).is_err());
}

#[test]
fn empty_and_nan_radius() {
    let spec = LatticeSpec::new(LatticeId::Sl2Z, NormGauge::MaxEntry);
    assert!(flat(spec, 0.9).is_empty());
    assert!(enumerate(spec, f64::NAN, EnumerationBudget::UNLIMITED).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_nested_and_bounded(r in 1.0f64..12.0, dr in 0.0f64..4.0) {
        for gauge in [NormGauge::MaxEntry, NormGauge::Frobenius, NormGauge::Operator] {
            let spec = LatticeSpec::new(LatticeId::Sl2Z, gauge);
            let small = enumerate(spec, r, EnumerationBudget::UNLIMITED).unwrap().elements;
            prop_assert!(small.iter().all(|g| exact_norm(g, gauge) <= r * (1.0 + 1e-12)));
            let big = count(spec, r + dr);
            prop_assert!(big >= small.len() as u64);
        }
    }
}
