use proptest::prelude::*;
use rlab_core::dyadic::{
    column_pattern, hadamard_select, integer, rademacher, rademacher_sum, rational, sign_matrix,
    single_negative_select,
};
use rlab_core::rearrangement::{decreasing_rearrangement, distribution, equimeasurable};
use rlab_core::{CoeffSeq, Rational, StepFunction};

fn step_strategy(max_level: u32) -> impl Strategy<Value = StepFunction> {
    (0..=max_level).prop_flat_map(|level| {
        prop::collection::vec((-20i64..=20, 1i64..=4), 1usize << level).prop_map(move |v| {
            StepFunction::new(level, v.into_iter().map(|(p, q)| rational(p, q)).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_and_products_commute(f in step_strategy(5), g in step_strategy(5)) {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.add(&g).integral(), f.integral() + g.integral());
        prop_assert_eq!(f.sub(&f), StepFunction::zero());
    }

    #[test]
    fn rearrangement_preserves_distribution(f in step_strategy(6)) {
        let r = decreasing_rearrangement(&f);
        prop_assert!(equimeasurable(&f, &r));
        prop_assert_eq!(r.abs().integral(), f.abs().integral());
        // f* is nonincreasing.
        let cells = r.cells(r.level()).unwrap();
        prop_assert!(cells.windows(2).all(|w| w[0] >= w[1]));
        let d = distribution(&f);
        for (tau, _) in d.breakpoints() {
            prop_assert_eq!(d.eval(&tau), distribution(&r).eval(&tau));
        }
    }

    #[test]
    fn rademacher_sums_are_exact(a in prop::collection::vec(-9i64..=9, 1..8)) {
        let c = CoeffSeq::from_ints(&a).unwrap();
        let s = rademacher_sum(&c).unwrap();
        let n = a.len() as u32;
        // ∫ S r_k = a_k and ∫ S² = Σ a_k².
        for (k, &ak) in a.iter().enumerate() {
            let r = rademacher(k as u32 + 1, n).unwrap();
            prop_assert_eq!(s.inner(&r), integer(ak));
        }
        prop_assert_eq!(s.inner(&s), c.l2_squared());
    }
}

#[test]
fn sign_matrix_columns_follow_big_endian_indexing() {
    for n in 1..=6u32 {
        let m = sign_matrix(n).unwrap();
        for j in 1..=(1usize << n) {
            let col = m.column(j);
            assert_eq!(col, column_pattern(n, j as u64));
            // j = 1 + Σ b_i 2^{n−i} with b_i = 1 where ε_ij = −1.
            let idx: usize = col
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    if e < 0 {
                        1usize << (n as usize - 1 - i)
                    } else {
                        0
                    }
                })
                .sum();
            assert_eq!(idx + 1, j);
        }
    }
}

#[test]
fn selections_have_the_stated_gram_matrices() {
    for &n in &[2u32, 4, 8, 16] {
        let h = hadamard_select(n).unwrap();
        let pats = h.patterns();
        for (i, x) in pats.iter().enumerate() {
            for (j, y) in pats.iter().enumerate() {
                let dot: i64 = x.iter().zip(y).map(|(a, b)| i64::from(a * b)).sum();
                assert_eq!(dot, if i == j { i64::from(n) } else { 0 });
                assert_eq!(h.gram()[i][j], dot);
            }
        }
        let s = single_negative_select(n).unwrap();
        for p in s.patterns() {
            assert_eq!(p.iter().filter(|&&e| e < 0).count(), 1);
        }
    }
}

#[test]
fn rademacher_functions_are_orthonormal() {
    let level = 6;
    for i in 1..=level {
        for j in 1..=level {
            let ri = rademacher(i, level).unwrap();
            let rj = rademacher(j, level).unwrap();
            let expected: Rational = if i == j { integer(1) } else { integer(0) };
            assert_eq!(ri.inner(&rj), expected);
        }
    }
}
