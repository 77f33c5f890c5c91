use num_bigint::BigInt;
use proptest::prelude::*;
use rlab_core::counterexample::{bound_b, bound_d};
use rlab_core::dyadic::{hadamard_select, integer, rational, single_negative_select, to_f64};
use rlab_core::rademacher::{
    block_head_l1, coefficients, khintchine_check, l1_norm_exact, multiplicator_norm, project,
    weighted_project,
};
use rlab_core::{CoeffSeq, Rational, SpaceSpec, StepFunction, Weight};

fn step_strategy(max_level: u32) -> impl Strategy<Value = StepFunction> {
    (1u32..=max_level).prop_flat_map(|level| {
        prop::collection::vec(-15i64..=15, 1usize << level).prop_map(move |v| {
            StepFunction::new(level, v.into_iter().map(|p| rational(p, 4)).collect()).unwrap()
        })
    })
}

fn weight_strategy() -> impl Strategy<Value = Weight> {
    (1u32..=4).prop_flat_map(|level| {
        prop::collection::vec(1i64..=9, 1usize << level).prop_map(move |v| {
            Weight::new(
                StepFunction::new(level, v.into_iter().map(|p| rational(p, 3)).collect()).unwrap(),
            )
            .unwrap()
        })
    })
}

/// ‖Σ a_k r_k‖₁ by brute force over sign vectors, independent of the library enumeration.
fn l1_by_signs(a: &[i64]) -> Rational {
    let n = a.len();
    let total: i64 = (0..1u64 << n)
        .map(|mask| {
            a.iter()
                .enumerate()
                .map(|(i, &x)| if mask >> i & 1 == 1 { -x } else { x })
                .sum::<i64>()
                .abs()
        })
        .sum();
    rational(total, 1 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn khintchine_window_holds(a in prop::collection::vec(-30i64..=30, 1..11)) {
        prop_assume!(a.iter().any(|&x| x != 0));
        let c = CoeffSeq::from_ints(&a).unwrap();
        let exact = l1_norm_exact(&c).unwrap();
        prop_assert_eq!(&exact, &l1_by_signs(&a));
        let r = khintchine_check(&c).unwrap();
        prop_assert!(r.lower_ok && r.upper_ok);
        // ½‖a‖₂² ≤ ‖S‖₁² ≤ ‖a‖₂² in exact arithmetic.
        let l2sq = c.l2_squared();
        prop_assert!(&exact * &exact <= l2sq);
        prop_assert!(&exact * &exact * integer(2) >= l2sq);
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint(f in step_strategy(6), g in step_strategy(6), n in 1u32..=6) {
        let pf = project(&f, n).unwrap();
        prop_assert_eq!(project(&pf, n).unwrap(), pf.clone());
        let pg = project(&g, n).unwrap();
        prop_assert_eq!(pf.inner(&g), f.inner(&pg));
        // Coefficients of P_n f match those of f.
        prop_assert_eq!(coefficients(&pf, n).unwrap(), coefficients(&f, n).unwrap());
    }

    #[test]
    fn weighted_projection_identity(f in step_strategy(5), g in step_strategy(5), w in weight_strategy(), n in 1u32..=5) {
        let pw = weighted_project(&f, &w, n).unwrap();
        // P_w = w P (·/w) is a projection, self-adjoint for the pairing ⟨u, v⟩ = ∫ u v / w².
        prop_assert_eq!(weighted_project(&pw, &w, n).unwrap(), pw.clone());
        let pg = weighted_project(&g, &w, n).unwrap();
        let pair = |u: &StepFunction, v: &StepFunction| w.divide(&w.divide(u)).inner(v);
        prop_assert_eq!(pair(&pw, &g), pair(&f, &pg));
        if w.is_one() {
            prop_assert_eq!(pw, project(&f, n).unwrap());
        }
    }
}

#[test]
fn pair_of_equal_signs_attains_the_lower_constant() {
    let c = CoeffSeq::from_ints(&[1, 1]).unwrap();
    assert_eq!(l1_norm_exact(&c).unwrap(), integer(1));
    assert!(khintchine_check(&c).unwrap().lower_attained);
}

#[test]
fn brackets_are_consistent() {
    let l1 = SpaceSpec::lp(1.0);
    let f = StepFunction::new(2, vec![integer(1), integer(2), integer(-1), integer(3)]).unwrap();
    for seed in 0..3 {
        let b = multiplicator_norm(&l1, &f, 6, 256, seed).unwrap();
        assert!(b.is_consistent(), "{b:?}");
        // |f| ≤ ‖f‖_∞ gives ‖f‖_{M(L₁)} ≤ 3.
        assert!(b.upper <= 3.0 + 1e-12);
        assert!(b.lower > 0.0);
    }
    // Constants multiply every Rademacher sum by the same factor.
    let c = multiplicator_norm(&l1, &StepFunction::constant(rational(5, 2)), 6, 256, 0).unwrap();
    assert!(
        (c.lower - 2.5).abs() < 1e-12 && (c.upper - 2.5).abs() < 1e-12,
        "{c:?}"
    );
    // More budget never lowers the reported lower bound for the same seed.
    let small = multiplicator_norm(&l1, &f, 6, 128, 7).unwrap();
    let large = multiplicator_norm(&l1, &f, 6, 1024, 7).unwrap();
    assert!(large.lower >= small.lower - 1e-12);
}

#[test]
fn block_brackets_respect_the_closed_form_bounds() {
    let l1 = SpaceSpec::lp(1.0);
    for &n in &[4u32, 8, 16] {
        let big = BigInt::from(n);
        let b_set = hadamard_select(n).unwrap();
        let chi_b = StepFunction::indicator(n, &b_set.indices).unwrap();
        let up = multiplicator_norm(&l1, &chi_b, n, 512, 3).unwrap();
        let bb = bound_b(&big, &BigInt::from(0), 128).unwrap();
        assert!(
            up.upper <= bb.to_f64() * (1.0 + 1e-12),
            "n = {n}: {} vs {}",
            up.upper,
            bb.to_f64()
        );

        let d_set = single_negative_select(n).unwrap();
        let chi_d = StepFunction::indicator(n, &d_set.indices).unwrap();
        let lo = multiplicator_norm(&l1, &chi_d, n, 512, 3).unwrap();
        let bd = bound_d(&big, &BigInt::from(0), 128).unwrap();
        assert!(
            lo.lower >= bd.to_f64() - 1e-12,
            "n = {n}: {} vs {}",
            lo.lower,
            bd.to_f64()
        );

        // The flat vector b = (1, ..., 1) on D gives (n − 2)·n·2^{−n} = ‖b‖₂·witness.
        let flat: Vec<Rational> = vec![integer(1); n as usize];
        let head = block_head_l1(&d_set, &flat);
        assert_eq!(head, rational((i64::from(n) - 2) * i64::from(n), 1 << n));
        let ratio = to_f64(&head) / f64::from(n).sqrt();
        assert!((ratio - bd.to_f64()).abs() <= 1e-12 * ratio);
    }
}
