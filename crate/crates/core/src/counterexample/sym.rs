//! Partial sums of ∫₀¹ f*(t) log^{1/2}(e/t) dt, the quantity whose divergence puts f outside
//! Sym(L₁).
//!
//! For plan blocks the heights and measures span thousands of binary orders of magnitude, so
//! every contribution is computed as a logarithm: with I(t) = ∫₀^t ℓ, ln I(t) = ln t + ln L(x)
//! where L(x) is the mean of ℓ over [0, t] at x = 1 + ln(1/t).

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::dyadic::StepFunction;
use crate::error::{Error, Result};
use crate::quad::{loghalf_mean_at, loghalf_window};
use crate::rearrangement::Profile;
use crate::serde_util::{extended_f64, vec_extended};
use crate::spaces::TrendCertificate;

use super::CounterexamplePlan;

pub enum SymSource<'a> {
    Step(&'a StepFunction),
    /// The first K blocks of f = Σ α_k χ_{B_k}.
    Plan(&'a CounterexamplePlan, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymIntegral {
    /// ln of each contribution v·∫_window ℓ in the full truncation, in source order (runs of
    /// f* for a step function, blocks for a plan).
    #[serde(with = "vec_extended")]
    pub ln_contributions: Vec<f64>,
    /// Value of the integral after each successive run or block.
    #[serde(with = "vec_extended")]
    pub partial_sums: Vec<f64>,
    #[serde(with = "extended_f64")]
    pub total: f64,
    pub certificate: TrendCertificate,
}

/// ln I(t) for ln t.
fn ln_loghalf_integral(ln_t: f64) -> f64 {
    if ln_t == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    ln_t + loghalf_mean_at(1.0 - ln_t).ln()
}

/// ln(e^a + e^b).
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// ln ∫_a^b ℓ from ln a < ln b.
fn ln_window(ln_a: f64, ln_b: f64) -> Result<f64> {
    let ib = ln_loghalf_integral(ln_b);
    let ia = ln_loghalf_integral(ln_a);
    let r = (ia - ib).exp();
    if !(r < 1.0) {
        return Err(Error::QuadratureFailure(format!(
            "window [e^{ln_a}, e^{ln_b}] is too narrow to resolve"
        )));
    }
    Ok(ib + (-r).ln_1p())
}

/// ln α_k and ln m(B_k) for a plan block, infinite when out of double range.
fn ln_block(plan: &CounterexamplePlan, k: usize) -> (f64, f64) {
    let ln2 = std::f64::consts::LN_2;
    let m = plan.m(k) as f64;
    let n = plan.n(k).to_f64().unwrap_or(f64::INFINITY);
    let prefix = plan.prefix(k).to_f64().unwrap_or(f64::INFINITY);
    ((n - 1.25 * m) * ln2, (m - prefix) * ln2)
}

/// Contributions for runs given as (ln value, ln measure), largest value first.
fn ln_contributions(runs: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut ln_start = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(runs.len());
    for &(ln_v, ln_m) in runs {
        let ln_end = log_add(ln_start, ln_m);
        if !ln_v.is_finite() || !ln_end.is_finite() {
            out.push(f64::INFINITY);
            ln_start = ln_end;
            continue;
        }
        let w = if ln_start == f64::NEG_INFINITY {
            ln_loghalf_integral(ln_end)
        } else {
            ln_window(ln_start, ln_end)?
        };
        out.push(ln_v + w);
        ln_start = ln_end;
    }
    Ok(out)
}

fn sum_exp(v: &[f64]) -> f64 {
    v.iter().map(|x| x.exp()).sum()
}

pub fn sym_integral_trend(source: SymSource<'_>) -> Result<SymIntegral> {
    let (ln_contributions, partial_sums) = match source {
        SymSource::Step(f) => {
            let prof = Profile::of(f);
            let mut start = 0.0;
            let mut sums = Vec::with_capacity(prof.len());
            let mut lns = Vec::with_capacity(prof.len());
            let mut acc = 0.0;
            for (v, m) in prof.values.iter().zip(&prof.measures) {
                let c = v * loghalf_window(start, (start + m).min(1.0));
                start += m;
                acc += c;
                lns.push(c.ln());
                sums.push(acc);
            }
            (lns, sums)
        }
        SymSource::Plan(plan, blocks) => {
            if blocks == 0 || blocks > plan.len() {
                return Err(Error::InvalidPlan(format!(
                    "blocks must lie in 1..={}, got {blocks}",
                    plan.len()
                )));
            }
            // α_k increases with k, so f* lists the blocks in reverse order.
            let contributions_for = |k_max: usize| -> Result<Vec<f64>> {
                let runs: Vec<(f64, f64)> = (1..=k_max).rev().map(|k| ln_block(plan, k)).collect();
                let mut c = ln_contributions(&runs)?;
                c.reverse();
                Ok(c)
            };
            let mut sums = Vec::with_capacity(blocks);
            let mut last = Vec::new();
            for k in 1..=blocks {
                last = contributions_for(k)?;
                sums.push(sum_exp(&last));
            }
            (last, sums)
        }
    };
    let total = partial_sums.last().copied().unwrap_or(0.0);
    let certificate = TrendCertificate::from_values(
        (1..=partial_sums.len()).map(|i| i as f64).collect(),
        partial_sums.clone(),
    );
    Ok(SymIntegral {
        ln_contributions,
        partial_sums,
        total,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{build_explicit, plan};
    use crate::quad::{integrate, loghalf};

    #[test]
    fn single_block_matches_quadrature() {
        let p = plan(&[2], false).unwrap();
        let s = sym_integral_trend(SymSource::Plan(&p, 1)).unwrap();
        let alpha = 16.0 * 4f64.powf(-1.25);
        let oracle = alpha * integrate(loghalf, 1e-30, 0.25, 1e-10, 0.0).unwrap();
        assert!((s.total - oracle).abs() < 1e-6, "{} vs {oracle}", s.total);
        // The materialized f gives the same value.
        let b = build_explicit(&p, 1).unwrap();
        let t = sym_integral_trend(SymSource::Step(&b.f)).unwrap();
        assert!((t.total - oracle).abs() < 1e-6);
    }

    #[test]
    fn two_block_plan_matches_step_function() {
        let p = plan(&[2, 3], false).unwrap();
        let b = build_explicit(&p, 2).unwrap();
        let a = sym_integral_trend(SymSource::Plan(&p, 2)).unwrap();
        let s = sym_integral_trend(SymSource::Step(&b.f)).unwrap();
        assert!((a.total - s.total).abs() < 1e-9 * s.total);
    }

    #[test]
    fn later_blocks_dominate() {
        let p = plan(&[1, 16], true).unwrap();
        let s = sym_integral_trend(SymSource::Plan(&p, 2)).unwrap();
        assert!(s.ln_contributions[1] > s.ln_contributions[0], "{s:?}");
        assert!(s.partial_sums[1] > s.partial_sums[0]);
    }

    #[test]
    fn zero_function() {
        let s = sym_integral_trend(SymSource::Step(&StepFunction::zero())).unwrap();
        assert_eq!(s.total, 0.0);
        assert!(s.partial_sums.is_empty());
    }
}
