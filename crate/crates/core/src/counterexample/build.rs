//! Explicit step-function realization of f and g for plans small enough to materialize.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dyadic::{
    check_level, format_rational, from_f64, hadamard_select, rational_dyadic,
    single_negative_select, ColumnSet, StepFunction,
};
use crate::error::{Error, Result};
use crate::rearrangement::equimeasurable;

use super::CounterexamplePlan;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitBuild {
    pub plan: CounterexamplePlan,
    pub blocks: usize,
    /// α_k rounded to the nearest double, as exact rationals.
    pub heights: Vec<String>,
    /// Rank-N_k interval indices of B_k and D_k.
    pub b_sets: Vec<ColumnSet>,
    pub d_sets: Vec<ColumnSet>,
    /// Rank-N_k index of the interval I_k that block k + 1 is nested into.
    pub b_nests: Vec<u64>,
    pub d_nests: Vec<u64>,
    /// m(B_k) = m(D_k) = n_k 2^{−N_k}.
    pub measures: Vec<String>,
    pub disjoint: bool,
    pub equimeasurable: bool,
    pub f: StepFunction,
    pub g: StepFunction,
}

/// Places `local` (indices of a rank-n selection) inside the interval `outer` of rank
/// level − n, giving indices of rank `level`.
fn nest(outer: u64, level: u32, local: &ColumnSet) -> ColumnSet {
    ColumnSet {
        n: level,
        indices: local
            .indices
            .iter()
            .map(|&j| ((outer - 1) << local.n) + j)
            .collect(),
    }
}

/// Smallest rank-(level + n) interval inside rank-`level` interval `outer` whose local index is
/// not in `taken`.
fn first_free(outer: u64, n: u32, taken: &ColumnSet) -> u64 {
    let mut local = 1u64;
    for &j in &taken.indices {
        if j == local {
            local += 1;
        } else if j > local {
            break;
        }
    }
    ((outer - 1) << n) + local
}

fn union(
    level: u32,
    sets: &[&ColumnSet],
    heights: &[crate::dyadic::Rational],
) -> Result<StepFunction> {
    let mut f = StepFunction::zero();
    for (set, h) in sets.iter().zip(heights) {
        let chi = StepFunction::indicator(set.n, &set.indices)?;
        f = f.add(&chi.scale(h));
    }
    debug_assert!(f.level() <= level);
    Ok(f)
}

/// Materializes B_1..B_K and D_1..D_K with f = Σ α_k χ_{B_k}, g = Σ α_k χ_{D_k}. Block k + 1 is
/// nested into the smallest rank-N_k interval inside I_{k−1} that block k leaves free.
pub fn build_explicit(plan: &CounterexamplePlan, blocks: usize) -> Result<ExplicitBuild> {
    if blocks == 0 || blocks > plan.len() {
        return Err(Error::InvalidPlan(format!(
            "blocks must lie in 1..={} for this plan, got {blocks}",
            plan.len()
        )));
    }
    let top = plan.prefix_level(blocks).ok_or(Error::LevelCapExceeded {
        level: u32::MAX,
        cap: crate::dyadic::level_cap(),
    })?;
    check_level(top)?;
    let mut b_outer = 1u64;
    let mut d_outer = 1u64;
    let (mut b_sets, mut d_sets, mut b_nests, mut d_nests) = (vec![], vec![], vec![], vec![]);
    let mut heights = Vec::new();
    let mut measures = Vec::new();
    for k in 1..=blocks {
        let n = 1u32 << plan.m(k);
        let level = plan.prefix_level(k).expect("below the top level");
        let h = hadamard_select(n)?;
        let s = single_negative_select(n)?;
        let b = nest(b_outer, level, &h);
        let d = nest(d_outer, level, &s);
        b_outer = first_free(b_outer, n, &h);
        d_outer = first_free(d_outer, n, &s);
        b_nests.push(b_outer);
        d_nests.push(d_outer);
        b_sets.push(b);
        d_sets.push(d);
        let alpha = plan.alpha(k).to_f64();
        heights.push(from_f64(alpha)?);
        measures.push(format_rational(&rational_dyadic(u64::from(n), level)));
    }
    let bs: Vec<&ColumnSet> = b_sets.iter().collect();
    let ds: Vec<&ColumnSet> = d_sets.iter().collect();
    let f = union(top, &bs, &heights)?;
    let g = union(top, &ds, &heights)?;
    let disjoint = [&bs, &ds].iter().all(|sets| {
        let mut total = StepFunction::zero();
        for set in sets.iter() {
            total = total.add(&StepFunction::indicator(set.n, &set.indices).expect("valid set"));
        }
        let expected = sets.iter().fold(crate::dyadic::Rational::zero(), |acc, s| {
            acc + rational_dyadic(s.len() as u64, s.n)
        });
        total.max_abs() <= crate::dyadic::integer(1) && total.integral() == expected
    });
    let equimeasurable = equimeasurable(&f, &g);
    if !disjoint || !equimeasurable {
        return Err(Error::InvalidPlan(format!(
            "construction check failed (disjoint = {disjoint}, equimeasurable = {equimeasurable})"
        )));
    }
    Ok(ExplicitBuild {
        plan: plan.clone(),
        blocks,
        heights: heights.iter().map(format_rational).collect(),
        b_sets,
        d_sets,
        b_nests,
        d_nests,
        measures,
        disjoint,
        equimeasurable,
        f,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::plan;
    use crate::dyadic::rational;

    #[test]
    fn one_block() {
        let p = plan(&[2], false).unwrap();
        let b = build_explicit(&p, 1).unwrap();
        assert_eq!(b.measures, vec!["1/4"]);
        assert_eq!(b.f.support_measure(), rational(1, 4));
        assert!(b.equimeasurable);
    }

    #[test]
    fn two_blocks_nest_and_stay_disjoint() {
        let p = plan(&[2, 3], false).unwrap();
        let b = build_explicit(&p, 2).unwrap();
        assert_eq!(b.measures[1], "1/512");
        assert_eq!(rational(8, 1 << 12), rational(1, 512));
        assert!(b.disjoint && b.equimeasurable);
        // B_2 lies inside I_1, the smallest rank-4 interval missed by J_1(4).
        let i1 = b.b_nests[0];
        assert!(!b.b_sets[0].indices.contains(&i1));
        assert!(b.b_sets[1].indices.iter().all(|&j| (j - 1) >> 8 == i1 - 1));
        // The rows N_1 < i ≤ N_2 of the sign matrix restricted to B_2 form a Hadamard matrix.
        let pats: Vec<Vec<i8>> = b.b_sets[1]
            .indices
            .iter()
            .map(|&j| crate::dyadic::column_pattern(12, j)[4..].to_vec())
            .collect();
        for (a, x) in pats.iter().enumerate() {
            for (c, y) in pats.iter().enumerate() {
                let dot: i64 = x.iter().zip(y).map(|(p, q)| i64::from(p * q)).sum();
                assert_eq!(dot, if a == c { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn level_cap_is_enforced() {
        let p = plan(&[2, 5], false).unwrap();
        assert!(matches!(
            build_explicit(&p, 2),
            Err(Error::LevelCapExceeded { .. })
        ));
    }
}
