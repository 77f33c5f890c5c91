//! Exact piecewise-constant functions on dyadic partitions of [0,1].
//!
//! A [`StepFunction`] of level `n` assigns an exact rational to each dyadic interval
//! Δ_n^j = [(j-1)2^{-n}, j 2^{-n}], j = 1..2^n. Values are stored run-length encoded, so
//! indicators of a few fine intervals stay cheap even at high levels.
//!
//! Canonical form: adjacent runs carry distinct values and the level is the smallest one at
//! which the function is representable. Two step functions are equal as functions iff their
//! canonical forms are equal, which is what the derived `PartialEq` compares.

mod rademacher;
mod rational;
mod sign;

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) use rademacher::integer_sum_cells;
pub use rademacher::{
    rademacher, rademacher_sign, rademacher_sum, sign_sum, sum_cells_f64, CoeffSeq,
};
pub use rational::{
    format_rational, from_f64, integer, parse_rational, rational, to_f64, Rational,
};
pub use sign::{
    column_pattern, hadamard_select, pattern_index, sign_matrix, single_negative_select, ColumnSet,
    SignMatrix, MAX_INDEXED, MAX_MATERIALIZED,
};

pub const DEFAULT_LEVEL_CAP: u32 = 26;
pub const MAX_LEVEL_CAP: u32 = 28;
pub const LEVEL_CAP_ENV: &str = "RLAB_LEVEL_CAP";

/// Finest level a step function may use. `RLAB_LEVEL_CAP` overrides the default, clamped
/// to [`MAX_LEVEL_CAP`]; the variable is read once per process.
pub fn level_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(LEVEL_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .map(|v| v.min(MAX_LEVEL_CAP))
            .unwrap_or(DEFAULT_LEVEL_CAP)
    })
}

pub(crate) fn check_level(level: u32) -> Result<()> {
    let cap = level_cap();
    if level > cap {
        Err(Error::LevelCapExceeded { level, cap })
    } else {
        Ok(())
    }
}

/// `len` consecutive cells at the owning function's level sharing `value`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub len: u64,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    level: u32,
    runs: Vec<Run>,
}

/// Cellwise binary operations for [`StepFunction::combine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    /// `f · χ_A` where A is the support of the second operand.
    Restrict,
}

impl StepFunction {
    /// Builds a step function from its `2^level` cell values and canonicalizes it.
    pub fn new(level: u32, values: Vec<Rational>) -> Result<Self> {
        check_level(level)?;
        let expected = 1u64 << level;
        if values.len() as u64 != expected {
            return Err(Error::LengthMismatch {
                level,
                expected,
                actual: values.len() as u64,
            });
        }
        let runs = values
            .into_iter()
            .map(|value| Run { len: 1, value })
            .collect();
        Ok(Self::canonical(level, runs))
    }

    /// Builds a step function from `(cell count, value)` runs covering all `2^level` cells.
    pub fn from_runs(level: u32, runs: Vec<(u64, Rational)>) -> Result<Self> {
        check_level(level)?;
        let expected = 1u64 << level;
        let actual: u64 = runs.iter().map(|(len, _)| *len).sum();
        if actual != expected {
            return Err(Error::LengthMismatch {
                level,
                expected,
                actual,
            });
        }
        let runs = runs
            .into_iter()
            .map(|(len, value)| Run { len, value })
            .collect();
        Ok(Self::canonical(level, runs))
    }

    pub fn constant(value: Rational) -> Self {
        Self {
            level: 0,
            runs: vec![Run { len: 1, value }],
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn one() -> Self {
        Self::constant(integer(1))
    }

    /// Indicator of the union of Δ_level^j over the given 1-based interval indices.
    pub fn indicator(level: u32, intervals: &[u64]) -> Result<Self> {
        check_level(level)?;
        let total = 1u64 << level;
        let mut cells: Vec<u64> = intervals.to_vec();
        cells.sort_unstable();
        cells.dedup();
        if let Some(&j) = cells.iter().find(|&&j| j == 0 || j > total) {
            return Err(Error::InvalidInput(format!(
                "interval index {j} outside 1..={total} at level {level}"
            )));
        }
        let mut runs = Vec::with_capacity(2 * cells.len() + 1);
        let mut pos = 0u64;
        for j in cells {
            let start = j - 1;
            if start > pos {
                runs.push(Run {
                    len: start - pos,
                    value: Rational::zero(),
                });
            }
            runs.push(Run {
                len: 1,
                value: integer(1),
            });
            pos = start + 1;
        }
        if pos < total {
            runs.push(Run {
                len: total - pos,
                value: Rational::zero(),
            });
        }
        Ok(Self::canonical(level, runs))
    }

    /// χ_{[0, cells·2^{-level}]}.
    pub fn prefix_indicator(level: u32, cells: u64) -> Result<Self> {
        check_level(level)?;
        let total = 1u64 << level;
        if cells > total {
            return Err(Error::InvalidInput(format!(
                "{cells} cells exceed the {total} cells of level {level}"
            )));
        }
        Self::from_runs(
            level,
            vec![(cells, integer(1)), (total - cells, Rational::zero())],
        )
    }

    fn canonical(level: u32, runs: Vec<Run>) -> Self {
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for run in runs {
            if run.len == 0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.value == run.value => last.len += run.len,
                _ => merged.push(run),
            }
        }
        // A sibling pair differs iff a run boundary falls on an odd cell position, so the
        // level can drop by the minimum number of trailing zeros over interior boundaries.
        let mut shift = level;
        let mut pos = 0u64;
        for run in &merged[..merged.len().saturating_sub(1)] {
            pos += run.len;
            shift = shift.min(pos.trailing_zeros());
            if shift == 0 {
                break;
            }
        }
        if shift > 0 {
            for run in &mut merged {
                run.len >>= shift;
            }
        }
        Self {
            level: level - shift,
            runs: merged,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Runs as `(start cell, len, value)` at the function's own level, starts 0-based.
    pub fn spans(&self) -> impl Iterator<Item = (u64, u64, &Rational)> + '_ {
        let mut pos = 0u64;
        self.runs.iter().map(move |r| {
            let start = pos;
            pos += r.len;
            (start, r.len, &r.value)
        })
    }

    fn scaled_runs(&self, level: u32) -> impl Iterator<Item = (u64, &Rational)> + '_ {
        let shift = level - self.level;
        self.runs.iter().map(move |r| (r.len << shift, &r.value))
    }

    /// The `2^level` cell values at `level ≥ self.level()`.
    pub fn cells(&self, level: u32) -> Result<Vec<Rational>> {
        check_level(level)?;
        if level < self.level {
            return Err(Error::InvalidInput(format!(
                "cannot sample a level-{} function on the coarser level {level}",
                self.level
            )));
        }
        let mut out = Vec::with_capacity(1usize << level);
        for (len, value) in self.scaled_runs(level) {
            out.extend(std::iter::repeat_n(value.clone(), len as usize));
        }
        Ok(out)
    }

    /// Cell values at `level` as doubles (refining or coarsening is not done; `level ≥ self.level()`).
    pub fn cells_f64(&self, level: u32) -> Vec<f64> {
        assert!(
            level >= self.level,
            "cells_f64 needs level >= {}",
            self.level
        );
        let mut out = Vec::with_capacity(1usize << level);
        for (len, value) in self.scaled_runs(level) {
            out.extend(std::iter::repeat_n(to_f64(value), len as usize));
        }
        out
    }

    /// Value on Δ_level^j (1-based j), for any level at least as fine as the function's.
    pub fn value_on(&self, level: u32, j: u64) -> Result<&Rational> {
        if level < self.level || j == 0 || j > (1u64 << level) {
            return Err(Error::InvalidInput(format!(
                "no interval {j} at level {level} for a level-{} function",
                self.level
            )));
        }
        let cell = (j - 1) >> (level - self.level);
        let mut pos = 0u64;
        for run in &self.runs {
            pos += run.len;
            if cell < pos {
                return Ok(&run.value);
            }
        }
        unreachable!("runs cover every cell")
    }

    /// ∫₀¹ f.
    pub fn integral(&self) -> Rational {
        let sum = self.runs.iter().fold(Rational::zero(), |acc, r| {
            acc + &r.value * integer(r.len as i64)
        });
        sum / integer(1).mul_pow2(self.level)
    }

    /// Measure of {f ≠ 0}.
    pub fn support_measure(&self) -> Rational {
        let cells: u64 = self
            .runs
            .iter()
            .filter(|r| !r.value.is_zero())
            .map(|r| r.len)
            .sum();
        rational_dyadic(cells, self.level)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        let runs = self
            .runs
            .iter()
            .map(|r| Run {
                len: r.len,
                value: f(&r.value),
            })
            .collect();
        Self::canonical(self.level, runs)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|v| v * c)
    }

    /// Cellwise 1/f; fails if some cell is zero.
    pub fn reciprocal(&self) -> Result<Self> {
        if let Some(r) = self.runs.iter().find(|r| r.value.is_zero()) {
            return Err(Error::NonPositiveWeight(format_rational(&r.value)));
        }
        Ok(self.map(|v| v.recip()))
    }

    pub fn is_zero(&self) -> bool {
        self.runs.len() == 1 && self.runs[0].value.is_zero()
    }

    pub fn max_abs(&self) -> Rational {
        self.runs
            .iter()
            .map(|r| r.value.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn min_value(&self) -> Rational {
        self.runs
            .iter()
            .map(|r| r.value.clone())
            .min()
            .unwrap_or_else(Rational::zero)
    }

    /// Cellwise combination on the common refinement.
    pub fn combine(&self, other: &Self, op: BinaryOp) -> Self {
        match op {
            BinaryOp::Add => self.zip_with(other, |a, b| a + b),
            BinaryOp::Sub => self.zip_with(other, |a, b| a - b),
            BinaryOp::Mul => self.zip_with(other, |a, b| a * b),
            BinaryOp::Restrict => self.zip_with(other, |a, b| {
                if b.is_zero() {
                    Rational::zero()
                } else {
                    a.clone()
                }
            }),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, BinaryOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, BinaryOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, BinaryOp::Mul)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let level = self.level.max(other.level);
        let mut a = self.scaled_runs(level);
        let mut b = other.scaled_runs(level);
        let (mut rem_a, mut va) = a.next().expect("nonempty");
        let (mut rem_b, mut vb) = b.next().expect("nonempty");
        let mut out = Vec::with_capacity(self.runs.len() + other.runs.len());
        loop {
            let take = rem_a.min(rem_b);
            out.push(Run {
                len: take,
                value: f(va, vb),
            });
            rem_a -= take;
            rem_b -= take;
            if rem_a == 0 {
                match a.next() {
                    Some((len, v)) => {
                        rem_a = len;
                        va = v;
                    }
                    None => break,
                }
            }
            if rem_b == 0 {
                let (len, v) = b.next().expect("operands cover the same cells");
                rem_b = len;
                vb = v;
            }
        }
        Self::canonical(level, out)
    }

    /// ∫₀¹ f·g, exactly.
    pub fn inner(&self, other: &Self) -> Rational {
        self.mul(other).integral()
    }

    /// JSON document `{"level": n, "runs": [[len, "p/q"], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step functions always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// k·2^{-level} as a rational.
pub fn rational_dyadic(cells: u64, level: u32) -> Rational {
    BigRational::new(
        cells.into(),
        num_bigint::BigInt::from(1u8) << level as usize,
    )
}

trait MulPow2 {
    fn mul_pow2(self, k: u32) -> Self;
}

impl MulPow2 for Rational {
    fn mul_pow2(self, k: u32) -> Self {
        self * BigRational::from_integer(num_bigint::BigInt::from(1u8) << k as usize)
    }
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    level: u32,
    runs: Vec<(u64, String)>,
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepRepr {
            level: self.level,
            runs: self
                .runs
                .iter()
                .map(|r| (r.len, format_rational(&r.value)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = StepRepr::deserialize(d)?;
        let runs = repr
            .runs
            .into_iter()
            .map(|(len, v)| parse_rational(&v).map(|v| (len, v)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        StepFunction::from_runs(repr.level, runs).map_err(serde::de::Error::custom)
    }
}
