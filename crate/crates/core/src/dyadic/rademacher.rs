//! Rademacher functions r_k(t) = sign(sin 2^k π t) and finite Rademacher sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{check_level, format_rational, parse_rational, to_f64, Rational, StepFunction};
use crate::error::{Error, Result};

/// Value of r_k on the 0-based cell `cell` of level `level` (requires k ≤ level).
#[inline]
pub fn rademacher_sign(k: u32, level: u32, cell: u64) -> i64 {
    debug_assert!(k >= 1 && k <= level);
    if (cell >> (level - k)) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Σ of r_k over the cells `start..start+len` of level `level`, in O(1).
pub fn sign_sum(k: u32, level: u32, start: u64, len: u64) -> i64 {
    let block = 1u64 << (level - k);
    let prefix = |x: u64| -> i64 {
        let r = x % (2 * block);
        if r <= block {
            r as i64
        } else {
            (2 * block - r) as i64
        }
    };
    prefix(start + len) - prefix(start)
}

/// r_k as an exact step function; `level` only validates that r_k is constant on rank-`level`
/// intervals, the result is canonical (level k).
pub fn rademacher(k: u32, level: u32) -> Result<StepFunction> {
    if k == 0 {
        return Err(Error::InvalidInput("Rademacher index starts at 1".into()));
    }
    if level < k {
        return Err(Error::LevelTooLow { k, level });
    }
    check_level(level)?;
    let cells = 1u64 << k;
    let one = Rational::one();
    let runs = (0..cells)
        .map(|j| {
            let v = if j % 2 == 0 {
                one.clone()
            } else {
                -one.clone()
            };
            (1u64, v)
        })
        .collect();
    StepFunction::from_runs(k, runs)
}

/// A finite coefficient sequence (a_1, ..., a_n) with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffSeq(Vec<Rational>);

impl CoeffSeq {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "coefficient sequence must be nonempty".into(),
            ));
        }
        Ok(Self(coeffs))
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// Parses a comma-separated list such as `1,1/2,-0.25`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(
            s.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(parse_rational)
                .collect::<Result<_>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }

    /// ‖a‖₂², exact.
    pub fn l2_squared(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, a| acc + a * a)
    }

    pub fn l2(&self) -> f64 {
        to_f64(&self.l2_squared()).sqrt()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// The entries as integers over a common denominator: `(numerators, D)` with a_k = p_k / D.
    pub fn scaled_integers(&self) -> (Vec<BigInt>, BigInt) {
        let denom = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let numers = self
            .0
            .iter()
            .map(|a| a.numer() * (&denom / a.denom()))
            .collect();
        (numers, denom)
    }
}

impl Serialize for CoeffSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        CoeffSeq::new(coeffs).map_err(serde::de::Error::custom)
    }
}

/// Σ_{k≤n} a_k r_k as an exact step function of level n.
pub fn rademacher_sum(a: &CoeffSeq) -> Result<StepFunction> {
    let n = a.len() as u32;
    check_level(n)?;
    let (numers, denom) = a.scaled_integers();
    let small: Option<Vec<i64>> = numers.iter().map(|p| p.to_i64()).collect();
    let fits = small
        .as_ref()
        .map(|s| s.iter().map(|x| x.unsigned_abs() as u128).sum::<u128>() < i64::MAX as u128)
        .unwrap_or(false);
    let denom = BigRational::from_integer(denom);
    if fits {
        let cells = integer_sum_cells(&small.unwrap());
        let values = cells
            .into_iter()
            .map(|v| BigRational::from_integer(v.into()) / &denom)
            .collect();
        StepFunction::new(n, values)
    } else {
        let mut v = vec![BigInt::zero()];
        for p in &numers {
            v = v.iter().flat_map(|x| [x + p, x - p]).collect();
        }
        let values = v
            .into_iter()
            .map(|x| BigRational::from_integer(x) / &denom)
            .collect();
        StepFunction::new(n, values)
    }
}

/// Cell values of Σ a_k r_k at level a.len(); callers ensure Σ|a_k| fits in i64.
pub(crate) fn integer_sum_cells(a: &[i64]) -> Vec<i64> {
    let mut v = Vec::with_capacity(1 << a.len());
    v.push(0i64);
    for &c in a {
        let prev = std::mem::take(&mut v);
        v.reserve(prev.len() * 2);
        for x in prev {
            v.push(x + c);
            v.push(x - c);
        }
    }
    v
}

/// Cell values of Σ a_k r_k at level a.len(), in floating point.
pub fn sum_cells_f64(a: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(1 << a.len());
    v.push(0.0);
    for &c in a {
        let prev = std::mem::take(&mut v);
        v.reserve(prev.len() * 2);
        for x in prev {
            v.push(x + c);
            v.push(x - c);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{integer, rational};

    fn signs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| integer(x)).collect()
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(
            rademacher(1, 2).unwrap().cells(2).unwrap(),
            signs(&[1, 1, -1, -1])
        );
        assert_eq!(
            rademacher(2, 2).unwrap().cells(2).unwrap(),
            signs(&[1, -1, 1, -1])
        );
        assert_eq!(
            rademacher(2, 3).unwrap().cells(3).unwrap(),
            signs(&[1, 1, -1, -1, 1, 1, -1, -1])
        );
        assert!(matches!(rademacher(3, 2), Err(Error::LevelTooLow { .. })));
    }

    #[test]
    fn sign_helpers_match_materialized_functions() {
        for level in 1..=6 {
            for k in 1..=level {
                let cells = rademacher(k, level).unwrap().cells(level).unwrap();
                for (j, v) in cells.iter().enumerate() {
                    assert_eq!(integer(rademacher_sign(k, level, j as u64)), *v);
                }
                let total = 1u64 << level;
                for start in 0..total {
                    for len in 0..=(total - start) {
                        let direct: i64 = (start..start + len)
                            .map(|j| rademacher_sign(k, level, j))
                            .sum();
                        assert_eq!(sign_sum(k, level, start, len), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn orthonormality_is_exact() {
        let level = 5;
        for j in 1..=level {
            for k in 1..=level {
                let p = rademacher(j, level)
                    .unwrap()
                    .inner(&rademacher(k, level).unwrap());
                assert_eq!(p, integer(i64::from(j == k)));
            }
        }
    }

    #[test]
    fn rademacher_sum_examples() {
        let a = CoeffSeq::from_ints(&[1]).unwrap();
        assert_eq!(rademacher_sum(&a).unwrap(), rademacher(1, 1).unwrap());
        let a = CoeffSeq::from_ints(&[1, 1]).unwrap();
        assert_eq!(
            rademacher_sum(&a).unwrap().cells(2).unwrap(),
            signs(&[2, 0, 0, -2])
        );
        let a = CoeffSeq::from_ints(&[0, 0]).unwrap();
        assert!(rademacher_sum(&a).unwrap().is_zero());
    }

    #[test]
    fn rademacher_sum_matches_explicit_combination() {
        let a = CoeffSeq::new(vec![rational(1, 3), rational(-2, 7), rational(5, 2)]).unwrap();
        let mut direct = StepFunction::zero();
        for (k, c) in a.as_slice().iter().enumerate() {
            direct = direct.add(&rademacher(k as u32 + 1, 3).unwrap().scale(c));
        }
        assert_eq!(rademacher_sum(&a).unwrap(), direct);
    }

    #[test]
    fn coeffs_parse_and_l2() {
        let a = CoeffSeq::parse("1, 1/2, -0.5").unwrap();
        assert_eq!(a.l2_squared(), rational(3, 2));
        assert!(CoeffSeq::parse("").is_err());
        let (p, d) = a.scaled_integers();
        assert_eq!(d, BigInt::from(2));
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(1), BigInt::from(-1)]);
    }
}
