//! The L₁ Khintchine inequality (1/√2)‖a‖₂ ≤ ‖Σ a_k r_k‖₁ ≤ ‖a‖₂, checked by exact enumeration.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{format_rational, integer_sum_cells, to_f64, CoeffSeq, Rational};
use crate::error::{Error, Result};

/// Largest n enumerated exactly (2^n cells).
pub const KHINTCHINE_MAX_N: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineReport {
    pub n: usize,
    pub coefficients: CoeffSeq,
    /// ‖Σ a_k r_k‖₁ as an exact rational `p/q`.
    pub l1_exact: String,
    pub l1: f64,
    pub l2: f64,
    pub lower_bound: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub lower_attained: bool,
    pub upper_attained: bool,
}

/// ‖Σ a_k r_k‖₁ = 2^{−n} Σ_cells |value|, exact.
pub fn l1_norm_exact(a: &CoeffSeq) -> Result<Rational> {
    let n = a.len();
    if n > KHINTCHINE_MAX_N {
        return Err(Error::TooManyCoefficients {
            n,
            limit: KHINTCHINE_MAX_N,
        });
    }
    let (numers, denom) = a.scaled_integers();
    let small: Option<Vec<i64>> = numers.iter().map(|p| p.to_i64()).collect();
    let fits = small.as_ref().is_some_and(|s| {
        s.iter().map(|x| u128::from(x.unsigned_abs())).sum::<u128>() < (i64::MAX as u128) >> 1
    });
    let total: BigInt = if fits {
        let cells = integer_sum_cells(&small.unwrap());
        BigInt::from(cells.iter().map(|&x| i128::from(x).abs()).sum::<i128>())
    } else {
        let mut v = vec![BigInt::zero()];
        for p in &numers {
            v = v.iter().flat_map(|x| [x + p, x - p]).collect();
        }
        v.iter().map(|x| x.abs()).sum()
    };
    Ok(Rational::new(total, denom << n))
}

pub fn khintchine_check(a: &CoeffSeq) -> Result<KhintchineReport> {
    let l1 = l1_norm_exact(a)?;
    let l2sq = a.l2_squared();
    let l1sq = &l1 * &l1;
    let two = Rational::from_integer(2.into());
    let lower = &two * &l1sq;
    Ok(KhintchineReport {
        n: a.len(),
        coefficients: a.clone(),
        l1_exact: format_rational(&l1),
        l1: to_f64(&l1),
        l2: a.l2(),
        lower_bound: a.l2() / std::f64::consts::SQRT_2,
        lower_ok: lower >= l2sq,
        upper_ok: l1sq <= l2sq,
        lower_attained: lower == l2sq,
        upper_attained: l1sq == l2sq,
    })
}
