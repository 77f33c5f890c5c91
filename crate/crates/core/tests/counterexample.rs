use num_bigint::BigInt;
use proptest::prelude::*;
use rlab_core::counterexample::{
    bound_b, bound_d, build_explicit, certify, plan, sym_integral_trend, CertVerdict, SymSource,
};
use rlab_core::dyadic::to_f64;
use rlab_core::rearrangement::{decreasing_rearrangement, equimeasurable};
use rlab_core::Error;

#[test]
fn two_block_certificate_passes_with_the_stated_terms() {
    let p = plan(&[1, 16], true).unwrap();
    let c = certify(&p, 2, 256).unwrap();
    assert_eq!(c.verdict, CertVerdict::Pass);
    assert!(c.inequalities.iter().all(|i| i.holds));
    // α_2·bound_B = 2√2·65536^{−1/4} = √2/8.
    let f2: f64 = c.f_partial_sums[1].hi.parse::<f64>().unwrap()
        - c.f_partial_sums[0].lo.parse::<f64>().unwrap();
    assert!((f2 - 2f64.sqrt() / 8.0).abs() < 1e-9, "{f2}");
    // α_2·½ n^{3/2} 2^{−N_2} = ½·65536^{1/4}·2^{−2} = 2.
    assert_eq!(c.g_terms[1].as_deref(), Some("2"));
}

#[test]
fn explicit_build_is_equimeasurable_and_disjoint() {
    let p = plan(&[2, 3], false).unwrap();
    let b = build_explicit(&p, 2).unwrap();
    assert!(b.disjoint && b.equimeasurable);
    assert!(equimeasurable(&b.f, &b.g));
    assert_eq!(
        decreasing_rearrangement(&b.f),
        decreasing_rearrangement(&b.g)
    );
    // m(B_1) + m(B_2) = 4/16 + 8/4096.
    let support = to_f64(&b.f.support_measure());
    assert!((support - (0.25 + 8.0 / 4096.0)).abs() < 1e-15);
}

#[test]
fn strict_plans_reject_small_second_blocks() {
    assert!(matches!(
        plan(&[1, 15], true),
        Err(Error::Condition185Violated { block: 2, .. })
    ));
    assert!(matches!(
        certify(&plan(&[2, 3], false).unwrap(), 2, 64),
        Err(Error::InvalidPlan(_))
    ));
}

#[test]
fn sym_partial_sums_grow() {
    let p = plan(&[1, 16], true).unwrap();
    let s = sym_integral_trend(SymSource::Plan(&p, 2)).unwrap();
    assert!(s.partial_sums[1] > s.partial_sums[0]);
    // The first block alone: α_1 = 2^{2 − 5/4} on [0, 1/2].
    let alpha = 2f64.powf(0.75);
    let oracle = alpha * rlab_core::quad::loghalf_integral(0.5);
    assert!((s.partial_sums[0] - oracle).abs() < 1e-9 * oracle);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_bounds_hold(m in 2u32..40, prefix in 0u64..1_000_000) {
        let n = BigInt::from(1u8) << m as usize;
        let b = bound_b(&n, &BigInt::from(prefix), 128).unwrap();
        prop_assert!(b.holds(), "{:?}", b.chain);
        let d = bound_d(&n, &BigInt::from(prefix), 128).unwrap();
        prop_assert!(d.holds(), "{:?}", d.chain);
        // Oracle in floats: witness = (n − 2)·√n·2^{−(N+n)} in log form.
        let nf = (1u64 << m) as f64;
        let log2_w = (nf - 2.0).log2() + 0.5 * f64::from(m) - (prefix as f64 + nf);
        let got = d.to_f64();
        if got > 0.0 && got.is_finite() {
            prop_assert!((got.log2() - log2_w).abs() < 1e-9);
        }
    }

    #[test]
    fn plans_validate_monotonicity(a in 1u64..30, gap in 0u64..5) {
        let r = plan(&[a, a + gap], false);
        if gap == 0 {
            prop_assert!(r.is_err());
        } else {
            let p = r.unwrap();
            let needs = 8 * (1u64 << a);
            prop_assert_eq!(p.violations.is_empty(), a + gap >= needs);
        }
    }
}
