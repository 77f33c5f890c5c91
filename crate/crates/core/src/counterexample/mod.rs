//! A function f = Σ α_k χ_{B_k} in M(L₁) with an equimeasurable g = Σ α_k χ_{D_k} outside it.
//!
//! Block k uses n_k = 2^{m_k} Rademachers r_i, N_{k−1} < i ≤ N_k, where N_k = n_1 + ... + n_k.
//! B_k is a union of n_k rank-N_k intervals whose sign patterns form a Hadamard matrix, D_k a
//! union of n_k intervals whose patterns have a single −1; both are nested into one rank-N_{k−1}
//! interval missed by the previous block. With α_k = 2^{n_k} n_k^{−5/4} the B-blocks give
//! ‖f‖_{M(L₁)} ≤ 2√2 Σ n_k^{−1/4}, while ‖g‖_{M(L₁)} ≥ ½ n_k^{1/4} 2^{−N_{k−1}} for every k,
//! which is unbounded once n_k^{1/8} ≥ 2^{N_{k−1}}, i.e. m_k ≥ 8 N_{k−1}.
//!
//! Small relaxed plans are materialized as step functions; strict plans are checked through
//! exact bound arithmetic only.

mod bounds;
mod build;
mod sym;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{render_integer as render_int, Monomial};

pub use bounds::{bound_b, bound_d, certify, BlockBound, CertVerdict, Certificate, Inequality};
pub use build::{build_explicit, ExplicitBuild};
pub use sym::{sym_integral_trend, SymIntegral, SymSource};

/// Largest m_k; n_k = 2^{m_k} is held as an explicit integer.
pub const MAX_M: u64 = 1 << 21;

/// Default binary precision of certificate enclosures.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexamplePlan {
    pub m_list: Vec<u64>,
    pub strict: bool,
    /// 1-based blocks k ≥ 2 with m_k < 8 N_{k−1} (relaxed plans only).
    pub violations: Vec<usize>,
}

/// Rendering of a plan with derived sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub m_list: Vec<u64>,
    pub strict: bool,
    pub violations: Vec<usize>,
    /// n_k = 2^{m_k}.
    pub n: Vec<String>,
    /// N_k = n_1 + ... + n_k.
    pub prefix: Vec<String>,
    /// α_k = 2^{n_k} n_k^{−5/4}, symbolic.
    pub alpha: Vec<String>,
    /// Condition m_k ≥ 8 N_{k−1} per block k ≥ 2.
    pub condition: Vec<bool>,
}

pub(crate) fn pow2_int(e: u64) -> BigInt {
    BigInt::from(1u8) << e as usize
}

/// Required smallest m_k: 8 N_{k−1}.
fn required_m(prefix: &BigInt) -> BigInt {
    prefix * 8
}

/// Validates an increasing list of positive m_k. Strict plans must satisfy m_k ≥ 8 N_{k−1}
/// for k ≥ 2; relaxed plans record the blocks where it fails.
pub fn plan(m_list: &[u64], strict: bool) -> Result<CounterexamplePlan> {
    if m_list.is_empty() {
        return Err(Error::InvalidPlan("the m list is empty".into()));
    }
    if m_list[0] == 0 {
        return Err(Error::InvalidPlan("m_k must be positive".into()));
    }
    if let Some(w) = m_list.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPlan(format!(
            "m list must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    if m_list.iter().any(|&m| m > MAX_M) {
        return Err(Error::InvalidPlan(format!(
            "m_k above {MAX_M} is not supported"
        )));
    }
    let mut prefix = BigInt::zero();
    let mut violations = Vec::new();
    for (i, &m) in m_list.iter().enumerate() {
        if i > 0 {
            let req = required_m(&prefix);
            if BigInt::from(m) < req {
                if strict {
                    return Err(Error::Condition185Violated {
                        block: i + 1,
                        m,
                        required: render_int(&req),
                    });
                }
                violations.push(i + 1);
            }
        }
        prefix += pow2_int(m);
    }
    Ok(CounterexamplePlan {
        m_list: m_list.to_vec(),
        strict,
        violations,
    })
}

impl CounterexamplePlan {
    pub fn len(&self) -> usize {
        self.m_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_list.is_empty()
    }

    /// m_k for 1-based k.
    pub fn m(&self, k: usize) -> u64 {
        self.m_list[k - 1]
    }

    /// n_k = 2^{m_k}.
    pub fn n(&self, k: usize) -> BigInt {
        pow2_int(self.m(k))
    }

    /// N_k = n_1 + ... + n_k, with N_0 = 0.
    pub fn prefix(&self, k: usize) -> BigInt {
        (1..=k).map(|i| self.n(i)).sum()
    }

    /// N_k as a grid level when it is small enough to materialize.
    pub fn prefix_level(&self, k: usize) -> Option<u32> {
        self.prefix(k).to_u32()
    }

    /// α_k = 2^{n_k} n_k^{−5/4} = 2^{(8 n_k − 10 m_k)/8}.
    pub fn alpha(&self, k: usize) -> Monomial {
        Monomial::pow2_8ths(self.n(k) * 8 - BigInt::from(self.m(k)) * 10)
    }

    /// The plan with blocks appended until it has `blocks` entries, taking the smallest
    /// admissible m_k = max(m_{k−1} + 1, 8 N_{k−1}) for each new block.
    pub fn extended(&self, blocks: usize) -> Result<Self> {
        let mut m_list = self.m_list.clone();
        while m_list.len() < blocks {
            let prefix: BigInt = m_list.iter().map(|&m| pow2_int(m)).sum();
            let req = required_m(&prefix);
            let last = BigInt::from(*m_list.last().expect("nonempty plan") + 1);
            let next = if req > last { req } else { last };
            let next = next.to_u64().filter(|&m| m <= MAX_M).ok_or_else(|| {
                Error::InvalidPlan(format!(
                    "block {} would need m = {} which is beyond reach",
                    m_list.len() + 1,
                    render_int(&next)
                ))
            })?;
            m_list.push(next);
        }
        let mut p = plan(&m_list, false)?;
        p.strict = self.strict;
        if p.strict && !p.violations.is_empty() {
            let k = p.violations[0];
            return Err(Error::Condition185Violated {
                block: k,
                m: p.m(k),
                required: render_int(&required_m(&p.prefix(k - 1))),
            });
        }
        Ok(p)
    }

    pub fn summary(&self) -> PlanSummary {
        let k = self.len();
        PlanSummary {
            m_list: self.m_list.clone(),
            strict: self.strict,
            violations: self.violations.clone(),
            n: (1..=k).map(|i| render_int(&self.n(i))).collect(),
            prefix: (1..=k).map(|i| render_int(&self.prefix(i))).collect(),
            alpha: (1..=k).map(|i| self.alpha(i).symbolic()).collect(),
            condition: (2..=k).map(|i| !self.violations.contains(&i)).collect(),
        }
    }
}
