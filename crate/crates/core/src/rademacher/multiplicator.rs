//! Brackets for the Rademacher multiplicator norm
//! ‖f‖_{M(X)} = sup{‖f·Σ a_k r_k‖_X : ‖Σ a_k r_k‖_X ≤ 1}.
//!
//! Lower bounds come from explicit test vectors over the first n Rademachers (structured
//! witnesses and a seeded multi-start coordinate ascent). Upper bounds cover the whole
//! Rademacher span:
//!
//! * `sym-upper`: if ℓ = log^{1/2}(e/t) ∈ X, then (f·S)* ≺ f*·S*, S* ≤ √2‖a‖₂ℓ (Hoeffding) and
//!   ‖S‖_X ≥ φ_X(1)‖S‖₁ ≥ φ_X(1)‖a‖₂/√2 give ‖f‖_{M(X)} ≤ (2/φ_X(1))‖f*ℓ‖_X;
//! * `tail-bound` (X = L₁, f = χ_A with A a union of rank-n intervals): the head
//!   ‖χ_A Σ_{i≤n} b_i r_i‖₁ = 2^{−n} Σ_{j∈A} |Σ_i ε_ij b_i| is bounded by H‖b_head‖₂ with H
//!   computed by enumeration, the tail by m(A)‖b_tail‖₂, and ‖b‖₂ ≤ √2‖S‖₁;
//! * `sup-norm`: ‖f‖_{M(X)} ≤ ‖f‖_∞ in any symmetric space.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{column_pattern, hadamard_select, ColumnSet, Rational, StepFunction};
use crate::error::{Error, Result};
use crate::par::map_range;
use crate::serde_util::extended_f64;
use crate::spaces::{contains_loghalf, fundamental, norm_cells, sym_kernel_trend, SpaceSpec};

use super::equivalence::random_unit;
use super::refine_f64;

/// Objective evaluations per optimizer start.
pub const EVALS_PER_START: usize = 256;
/// Largest n for the restricted optimization (2^n cells per evaluation).
pub const MULTIPLICATOR_MAX_N: u32 = 20;
/// Largest |A| (in rank-n cells) for the enumerated head constant.
const HEAD_ENUM_MAX: usize = 20;
const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Witness,
    Optimizer,
    SymUpper,
    TailBound,
    /// |f·S| ≤ ‖f‖_∞|S| and the lattice property.
    SupNorm,
    /// No finite bound is available.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    #[serde(with = "extended_f64")]
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
    /// Test vector attaining the lower bound.
    pub lower_witness: String,
    pub n: u32,
    pub budget: usize,
    pub seed: u64,
    /// Some optimizer start stopped on the evaluation budget rather than converging.
    pub budget_exhausted: bool,
    pub notes: Vec<String>,
}

impl NormBracket {
    pub fn method(&self) -> Method {
        if self.lower_method == Method::Exact && self.upper_method == Method::Exact {
            Method::Exact
        } else {
            self.lower_method
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper * (1.0 + 1e-12)
    }
}

/// ‖f·S‖_X / ‖S‖_X for S = Σ_{k≤n} a_k r_k, in floating point.
pub fn restricted_ratio(x: &SpaceSpec, f: &StepFunction, a: &[f64]) -> f64 {
    let n = a.len() as u32;
    let level = n.max(f.level());
    Objective::new(x, f, n, level).ratio(a)
}

struct Objective<'a> {
    x: &'a SpaceSpec,
    f: Vec<f64>,
    n: u32,
    level: u32,
}

impl<'a> Objective<'a> {
    fn new(x: &'a SpaceSpec, f: &StepFunction, n: u32, level: u32) -> Self {
        Self {
            x,
            f: f.cells_f64(level),
            n,
            level,
        }
    }

    fn ratio(&self, a: &[f64]) -> f64 {
        let s = refine_f64(&crate::dyadic::sum_cells_f64(a), self.n, self.level);
        let den = norm_cells(self.x, &s);
        if !(den > 0.0) {
            return f64::NEG_INFINITY;
        }
        let prod: Vec<f64> = s.iter().zip(&self.f).map(|(a, b)| a * b).collect();
        norm_cells(self.x, &prod) / den
    }

    /// Coordinate ascent from `a` for at most `evals` evaluations; returns (best, a, converged).
    fn ascend(&self, mut a: Vec<f64>, evals: usize) -> (f64, Vec<f64>, bool) {
        let mut best = self.ratio(&a);
        let mut used = 1;
        let mut step = 0.5;
        while step >= MIN_STEP {
            let mut improved = false;
            for k in 0..a.len() {
                for sign in [1.0, -1.0] {
                    if used >= evals {
                        return (best, a, false);
                    }
                    let old = a[k];
                    a[k] = old + sign * step;
                    let r = self.ratio(&a);
                    used += 1;
                    if r > best {
                        best = r;
                        improved = true;
                    } else {
                        a[k] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, a, true)
    }
}

fn structured_witnesses(n: u32) -> Vec<(String, Vec<f64>)> {
    let nn = n as usize;
    let mut out: Vec<(String, Vec<f64>)> = (0..nn)
        .map(|k| {
            let mut e = vec![0.0; nn];
            e[k] = 1.0;
            (format!("e_{}", k + 1), e)
        })
        .collect();
    out.push(("flat".into(), vec![1.0 / (n as f64).sqrt(); nn]));
    if n.is_power_of_two() && n <= 16 {
        if let Ok(set) = hadamard_select(n) {
            for (c, p) in set.patterns().into_iter().enumerate() {
                let scale = 1.0 / (n as f64).sqrt();
                out.push((
                    format!("hadamard:{}", set.indices[c]),
                    p.iter().map(|&s| f64::from(s) * scale).collect(),
                ));
            }
        }
    }
    out
}

/// A bracket for ‖f‖_{M(X)} from the first n Rademachers, `budget` optimizer evaluations and
/// the upper bounds described in the module docs.
pub fn multiplicator_norm(
    x: &SpaceSpec,
    f: &StepFunction,
    n: u32,
    budget: usize,
    seed: u64,
) -> Result<NormBracket> {
    x.validate()?;
    if n == 0 || n > MULTIPLICATOR_MAX_N {
        return Err(Error::TooManyCoefficients {
            n: n as usize,
            limit: MULTIPLICATOR_MAX_N as usize,
        });
    }
    let level = n.max(f.level());
    crate::dyadic::check_level(level)?;
    let mut notes = Vec::new();
    if f.level() == 0 {
        let c = crate::dyadic::to_f64(&f.max_abs());
        return Ok(NormBracket {
            lower: c,
            upper: c,
            lower_method: Method::Exact,
            upper_method: Method::Exact,
            lower_witness: "any".into(),
            n,
            budget,
            seed,
            budget_exhausted: false,
            notes: vec!["constant multiplier: ‖c·S‖ = |c|·‖S‖".into()],
        });
    }
    let obj = Objective::new(x, f, n, level);
    let witnesses = structured_witnesses(n);
    let values = map_range(witnesses.len(), |i| obj.ratio(&witnesses[i].1));
    let (wi, &wbest) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty witnesses");
    let mut lower = wbest;
    let mut lower_method = Method::Witness;
    let mut lower_witness = witnesses[wi].0.clone();

    let starts = budget / EVALS_PER_START;
    let runs = map_range(starts, |s| {
        let a0 = if s == 0 {
            witnesses[wi].1.clone()
        } else {
            random_unit(seed, s as u64, n as usize)
        };
        obj.ascend(a0, EVALS_PER_START)
    });
    let mut budget_exhausted = false;
    for (s, (r, _, converged)) in runs.iter().enumerate() {
        budget_exhausted |= !converged;
        if *r > lower {
            lower = *r;
            lower_method = Method::Optimizer;
            lower_witness = format!("optimizer:start {s}");
        }
    }
    if budget_exhausted {
        notes.push("budget exhausted before every start converged".into());
    }

    let mut upper = f64::INFINITY;
    let mut upper_method = Method::None;
    if let Some(u) = l1_indicator_upper(x, f, n)? {
        upper = u;
        upper_method = Method::TailBound;
    }
    match sym_upper(x, f)? {
        Some(u) if u < upper => {
            upper = u;
            upper_method = Method::SymUpper;
        }
        Some(_) => {}
        None => {
            notes.push("no symmetric-kernel upper bound (log^(1/2) ∉ X or sup-form norm)".into())
        }
    }
    let sup = crate::dyadic::to_f64(&f.max_abs());
    if sup < upper {
        upper = sup;
        upper_method = Method::SupNorm;
    }
    let bracket = NormBracket {
        lower,
        upper,
        lower_method,
        upper_method,
        lower_witness,
        n,
        budget,
        seed,
        budget_exhausted,
        notes,
    };
    debug_assert!(bracket.is_consistent(), "{bracket:?}");
    Ok(bracket)
}

fn sym_upper(x: &SpaceSpec, f: &StepFunction) -> Result<Option<f64>> {
    if x.equivalent_norm_convention() || !contains_loghalf(x)?.contained {
        return Ok(None);
    }
    let k = sym_kernel_trend(x, f)?;
    if k.is_diverging() {
        return Ok(None);
    }
    Ok(Some(2.0 / fundamental(x, 1.0)? * k.value))
}

fn l1_indicator_upper(x: &SpaceSpec, f: &StepFunction, n: u32) -> Result<Option<f64>> {
    if *x != SpaceSpec::lp(1.0) || f.level() > n {
        return Ok(None);
    }
    let one = Rational::from_integer(1.into());
    if f.runs()
        .iter()
        .any(|r| !r.value.is_zero() && r.value != one)
    {
        return Ok(None);
    }
    let shift = n - f.level();
    let mut cells = Vec::new();
    for (start, len, v) in f.spans() {
        if v == &one {
            cells.extend((start << shift)..((start + len) << shift));
        }
    }
    if cells.len() > HEAD_ENUM_MAX {
        return Ok(None);
    }
    let set = ColumnSet {
        n,
        indices: cells.iter().map(|c| c + 1).collect(),
    };
    let head = head_constant(&set);
    let measure = cells.len() as f64 / (1u64 << n) as f64;
    Ok(Some(std::f64::consts::SQRT_2 * head.hypot(measure)))
}

/// H = sup_{‖b‖₂=1} 2^{−n} Σ_{j∈J} |Σ_i ε_ij b_i| = 2^{−n} max_s ‖Σ_j s_j ε_j‖₂.
fn head_constant(set: &ColumnSet) -> f64 {
    let cols = set.patterns();
    let m = cols.len();
    if m == 0 {
        return 0.0;
    }
    let n = set.n as usize;
    // Fix s_0 = +1 by symmetry.
    let best = map_range(1usize << (m - 1), |mask| {
        let mut v = vec![0i64; n];
        for (j, col) in cols.iter().enumerate() {
            let s = if j == 0 || (mask >> (j - 1)) & 1 == 0 {
                1
            } else {
                -1
            };
            for i in 0..n {
                v[i] += s * i64::from(col[i]);
            }
        }
        v.iter().map(|x| x * x).sum::<i64>()
    })
    .into_iter()
    .max()
    .unwrap_or(0);
    (best as f64).sqrt() / (1u64 << set.n) as f64
}

/// ‖χ_A Σ_{i≤n} b_i r_i‖₁ = 2^{−n} Σ_{j∈J} |Σ_i ε_ij b_i| for A = ∪_{j∈J} Δ_n^j, exact.
pub fn block_head_l1(set: &ColumnSet, b: &[Rational]) -> Rational {
    let total = set.indices.iter().fold(Rational::zero(), |acc, &j| {
        let col = column_pattern(set.n, j);
        let s = col.iter().zip(b).fold(
            Rational::zero(),
            |s, (&e, bi)| if e > 0 { s + bi } else { s - bi },
        );
        acc + s.abs()
    });
    total / Rational::from_integer(num_bigint::BigInt::from(1u8) << set.n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{integer, rational, single_negative_select};

    fn block(set: &ColumnSet) -> StepFunction {
        StepFunction::indicator(set.n, &set.indices).unwrap()
    }

    #[test]
    fn constant_multiplier_is_exact() {
        let b = multiplicator_norm(&SpaceSpec::lp(1.0), &StepFunction::one(), 4, 0, 1).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert_eq!(b.method(), Method::Exact);
    }

    #[test]
    fn hadamard_block_upper_bound() {
        let set = hadamard_select(4).unwrap();
        let b = multiplicator_norm(&SpaceSpec::lp(1.0), &block(&set), 4, 1024, 5).unwrap();
        assert!(b.upper <= 2.0 * 2f64.sqrt() * 4.0 / 16.0 + 1e-12, "{b:?}");
        assert_eq!(b.upper_method, Method::TailBound);
        assert!(b.is_consistent());
    }

    #[test]
    fn single_negative_block_lower_bound() {
        let set = single_negative_select(4).unwrap();
        let b = multiplicator_norm(&SpaceSpec::lp(1.0), &block(&set), 4, 0, 5).unwrap();
        assert!(b.lower >= 0.25, "{b:?}");
        // Witness n^{-1/2}(1,1,1,1): ‖χ_D S‖₁ = 1/4 and ‖S‖₁ = 3/4.
        let flat = restricted_ratio(&SpaceSpec::lp(1.0), &block(&set), &[0.5; 4]);
        assert!((flat - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn head_identity_and_cauchy_schwarz() {
        let set = hadamard_select(4).unwrap();
        let b: Vec<Rational> = [3, -1, 2, 5].iter().map(|&v| integer(v)).collect();
        let head = block_head_l1(&set, &b);
        // Oracle: integrate |χ_B Σ b_i r_i| cell by cell.
        let f = block(&set).mul(
            &crate::dyadic::rademacher_sum(&crate::CoeffSeq::new(b.clone()).unwrap()).unwrap(),
        );
        assert_eq!(head, f.abs().integral());
        let l2sq: Rational = b.iter().map(|x| x * x).sum();
        // Orthogonal columns: (2^{-n} Σ_j |⟨ε_j, b⟩|)² ≤ n² 2^{-2n} ‖b‖².
        let bound_sq = l2sq * rational(16, 256);
        assert!(&head * &head <= bound_sq);
        assert!((head_constant(&set) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn budget_never_decreases_lower() {
        let f = StepFunction::new(2, vec![integer(3), integer(1), integer(0), integer(2)]).unwrap();
        let x = SpaceSpec::lp(1.0);
        let mut last = 0.0;
        for budget in [0, 256, 1024, 2048] {
            let b = multiplicator_norm(&x, &f, 4, budget, 9).unwrap();
            assert!(b.lower >= last);
            assert!(b.is_consistent());
            last = b.lower;
        }
    }
}
