//! Empirical constants in ‖Σ a_k r_k‖_{X(w)} ≍ ‖a‖₂ over the first n Rademachers.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dyadic::sum_cells_f64;
use crate::error::Result;
use crate::par::{map_range, stream_rng};
use crate::spaces::{norm_cells, SpaceSpec};
use crate::weighted::Weight;

use super::refine_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub space: String,
    pub weight: String,
    pub n: u32,
    pub trials: usize,
    pub seed: u64,
    pub c_low: f64,
    pub c_high: f64,
    /// Test vector attaining each extreme: `e_k`, `flat` or `random:i`.
    pub low_witness: String,
    pub high_witness: String,
}

/// Cell values of w on the grid used for products with level-n Rademacher sums.
pub(crate) struct WeightGrid {
    pub cells: Option<Vec<f64>>,
    pub level: u32,
}

impl WeightGrid {
    pub fn new(w: &Weight, n: u32) -> Self {
        if w.is_one() {
            return Self {
                cells: None,
                level: n,
            };
        }
        let level = n.max(w.function().level());
        Self {
            cells: Some(w.function().cells_f64(level)),
            level,
        }
    }

    /// ‖(Σ a_k r_k)·w‖_X.
    pub fn sum_norm(&self, x: &SpaceSpec, a: &[f64]) -> f64 {
        let n = a.len() as u32;
        let s = sum_cells_f64(a);
        match &self.cells {
            None => norm_cells(x, &s),
            Some(w) => {
                let s = refine_f64(&s, n, self.level);
                let prod: Vec<f64> = s.iter().zip(w).map(|(a, b)| a * b).collect();
                norm_cells(x, &prod)
            }
        }
    }
}

/// Random unit vector number `i` of the stream determined by `seed`.
pub(crate) fn random_unit(seed: u64, i: u64, n: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, i);
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let l2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l2 > 0.0 {
            return v.into_iter().map(|x| x / l2).collect();
        }
    }
}

/// Canonical vectors e_k, the flat vector n^{−1/2}(1, ..., 1) and `trials` seeded random unit
/// vectors; reports min and max of ‖Σ a_k r_k‖_{X(w)}.
pub fn equivalence_constants(
    x: &SpaceSpec,
    w: &Weight,
    n: u32,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    x.validate()?;
    crate::dyadic::check_level(n.max(w.function().level()))?;
    let grid = WeightGrid::new(w, n);
    let nn = n as usize;
    let mut tests: Vec<(String, Vec<f64>)> = (0..nn)
        .map(|k| {
            let mut e = vec![0.0; nn];
            e[k] = 1.0;
            (format!("e_{}", k + 1), e)
        })
        .collect();
    tests.push(("flat".into(), vec![1.0 / (n as f64).sqrt(); nn]));
    let base = tests.len();
    let randoms = map_range(trials, |i| random_unit(seed, i as u64, nn));
    tests.extend(
        randoms
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("random:{i}"), v)),
    );
    let values = map_range(tests.len(), |i| grid.sum_norm(x, &tests[i].1));
    debug_assert!(values.len() >= base);
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    Ok(EquivalenceReport {
        space: x.to_string(),
        weight: w.to_string(),
        n,
        trials,
        seed,
        c_low: values[lo],
        c_high: values[hi],
        low_witness: tests[lo].0.clone(),
        high_witness: tests[hi].0.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_constants_are_one() {
        let r = equivalence_constants(&SpaceSpec::lp(2.0), &Weight::one(), 8, 50, 3).unwrap();
        assert!((r.c_low - 1.0).abs() < 1e-12 && (r.c_high - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_constants_within_khintchine_window() {
        let r = equivalence_constants(&SpaceSpec::lp(1.0), &Weight::one(), 10, 200, 7).unwrap();
        assert!(r.c_low >= std::f64::consts::FRAC_1_SQRT_2 - 1e-12);
        assert!(r.c_high <= 1.0 + 1e-12);
        assert_eq!(r.high_witness, "e_1");
    }

    #[test]
    fn deterministic_under_seed() {
        let x = SpaceSpec::parse("explp:2").unwrap();
        let a = equivalence_constants(&x, &Weight::one(), 6, 30, 11).unwrap();
        let b = equivalence_constants(&x, &Weight::one(), 6, 30, 11).unwrap();
        assert_eq!(a, b);
    }
}
