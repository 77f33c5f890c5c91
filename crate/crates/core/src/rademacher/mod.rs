//! Rademacher coefficients c_k(f) = ∫ f r_k, the projection P_n f = Σ_{k≤n} c_k(f) r_k and its
//! weighted form P_w f = w·P_n(f/w), together with the experiments built on them.

mod equivalence;
mod khintchine;
mod multiplicator;
mod predicates;
mod projection;

use num_traits::Zero;

use crate::dyadic::{
    check_level, rademacher_sum, sign_sum, sum_cells_f64, CoeffSeq, Rational, StepFunction,
};
use crate::error::{Error, Result};
use crate::weighted::Weight;

pub use equivalence::{equivalence_constants, EquivalenceReport};
pub use khintchine::{khintchine_check, l1_norm_exact, KhintchineReport, KHINTCHINE_MAX_N};
pub use multiplicator::{
    block_head_l1, multiplicator_norm, restricted_ratio, Method, NormBracket, EVALS_PER_START,
};
pub use predicates::{
    explp_multiplier_exponent, theorem_predicates, theorem_predicates_with, Branch,
    MembershipTrend, PredicateOptions, PredicateReport,
};
pub use projection::{projection_norm, projection_profile, ProjectionProfile, ProjectionReport};

/// c_1(f), ..., c_n(f), exact.
pub fn coefficients(f: &StepFunction, n: u32) -> Result<CoeffSeq> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "at least one coefficient is required".into(),
        ));
    }
    check_level(n)?;
    let level = f.level();
    let denom = Rational::from_integer(num_bigint::BigInt::from(1u8) << level as usize);
    let coeffs = (1..=n)
        .map(|k| {
            if k > level {
                // r_k has mean zero on every rank-(k−1) interval.
                return Rational::zero();
            }
            let sum = f.spans().fold(Rational::zero(), |acc, (start, len, v)| {
                let s = sign_sum(k, level, start, len);
                if s == 0 || v.is_zero() {
                    acc
                } else {
                    acc + v * Rational::from_integer(s.into())
                }
            });
            sum / &denom
        })
        .collect();
    CoeffSeq::new(coeffs)
}

/// P_n f, exact.
pub fn project(f: &StepFunction, n: u32) -> Result<StepFunction> {
    let c = coefficients(f, n)?;
    if c.as_slice().iter().all(|x| x.is_zero()) {
        return Ok(StepFunction::zero());
    }
    rademacher_sum(&c)
}

/// P_w f = Σ_{k≤n} (∫ f r_k / w) r_k w = w·P_n(f/w), exact.
pub fn weighted_project(f: &StepFunction, w: &Weight, n: u32) -> Result<StepFunction> {
    Ok(w.apply(&project(&w.divide(f), n)?))
}

/// c_1, ..., c_n of cell values at `level` in floating point, by repeated pairwise block sums.
pub fn coefficients_f64(cells: &[f64], level: u32, n: u32) -> Vec<f64> {
    debug_assert_eq!(cells.len(), 1usize << level);
    let mut out = vec![0.0; n as usize];
    let mut blocks = cells.to_vec();
    let scale = 1.0 / cells.len() as f64;
    for k in (1..=level).rev() {
        if k <= n {
            out[k as usize - 1] = blocks.chunks_exact(2).map(|p| p[0] - p[1]).sum::<f64>() * scale;
        }
        blocks = blocks.chunks_exact(2).map(|p| p[0] + p[1]).collect();
    }
    out
}

/// Repeats each cell so that `cells` at level `from` become cells at level `to`.
pub fn refine_f64(cells: &[f64], from: u32, to: u32) -> Vec<f64> {
    if to == from {
        return cells.to_vec();
    }
    let rep = 1usize << (to - from);
    cells
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, rep))
        .collect()
}

/// Cell values of P_n f at level max(level, n) in floating point.
pub fn project_cells_f64(cells: &[f64], level: u32, n: u32) -> Vec<f64> {
    let c = coefficients_f64(cells, level, n);
    let top = level.max(n);
    refine_f64(&sum_cells_f64(&c), n, top)
}
