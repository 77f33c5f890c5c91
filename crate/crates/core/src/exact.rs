//! Exact arithmetic for certificates: monomials q·2^{e/8} with rational q and integer e,
//! rational enclosures of them at a chosen binary precision, and decimal rendering.
//!
//! Products and quotients of such monomials stay exact; comparisons raise both sides to the
//! eighth power, so no irrational intermediate is ever rounded.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{format_rational, to_f64, Rational};

/// Largest bit length of a binary shift that is expanded into an explicit integer.
const MAX_SHIFT_BITS: u64 = 24;

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k as usize
}

/// q·2^k for a possibly negative integer k.
pub fn mul_pow2(q: &Rational, k: &BigInt) -> Rational {
    let k = k.to_i64().expect("binary exponent fits in i64");
    if k >= 0 {
        q * BigRational::from_integer(pow2(k as u64))
    } else {
        q / BigRational::from_integer(pow2(k.unsigned_abs()))
    }
}

/// ⌊log₂ |q|⌋ up to ±1, from bit lengths.
fn log2_estimate(q: &Rational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

/// log₂ |x| from the leading 64 bits.
fn log2_int(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(0.0).abs().log2();
    }
    let top = (x.magnitude() >> (bits - 64) as usize)
        .to_f64()
        .unwrap_or(1.0);
    top.log2() + (bits - 64) as f64
}

/// The positive real number `coeff · 2^{exp8/8}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Rational,
    pub exp8: BigInt,
}

impl Monomial {
    pub fn new(coeff: Rational, exp8: BigInt) -> Self {
        assert!(coeff.is_positive(), "monomials are positive");
        Self { coeff, exp8 }
    }

    pub fn rational(q: Rational) -> Self {
        Self::new(q, BigInt::zero())
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// 2^{e/8}.
    pub fn pow2_8ths(exp8: impl Into<BigInt>) -> Self {
        Self::new(Rational::one(), exp8.into())
    }

    /// 2^e.
    pub fn pow2(e: impl Into<BigInt>) -> Self {
        Self::pow2_8ths(e.into() * 8)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.coeff * &other.coeff, &self.exp8 + &other.exp8)
    }

    pub fn div(&self, other: &Self) -> Self {
        Self::new(&self.coeff / &other.coeff, &self.exp8 - &other.exp8)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.coeff * q, self.exp8.clone())
    }

    /// Moves whole powers of two from the exponent into the coefficient, leaving 0 ≤ e < 8.
    /// Shifts longer than 2^24 bits are left in the exponent.
    pub fn normalized(&self) -> Self {
        let (k, s) = self.exp8.div_mod_floor(&BigInt::from(8));
        if k.magnitude().bits() > MAX_SHIFT_BITS {
            return self.clone();
        }
        Self::new(mul_pow2(&self.coeff, &k), s)
    }

    /// True when the binary exponent is small enough to expand into a rational.
    pub fn is_expandable(&self) -> bool {
        let (k, _) = self.exp8.div_mod_floor(&BigInt::from(8));
        k.magnitude().bits() <= MAX_SHIFT_BITS
    }

    /// Decimal rendering with `digits` significant digits from a `precision`-bit enclosure;
    /// values too large or small to expand are shown as a power of two.
    pub fn to_decimal(&self, digits: usize, precision: u32) -> String {
        if self.is_expandable() {
            let e = self.enclose(precision);
            let out = decimal(&e.lo, digits, Rounding::Nearest);
            if !out.contains('~') {
                return out;
            }
        }
        let bits =
            BigInt::from(self.coeff.numer().bits()) - BigInt::from(self.coeff.denom().bits());
        format!("~2^{}", render_integer(&(&self.exp8 / 8u32 + bits)))
    }

    /// Approximate log₂ of the value (exact to within about one unit).
    pub fn log2_estimate(&self) -> f64 {
        let e = self.exp8.to_f64().unwrap_or(if self.exp8.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }) / 8.0;
        log2_int(self.coeff.numer()) - log2_int(self.coeff.denom()) + e
    }

    /// Exact comparison by cross-raising to eighth powers, with a bit-length shortcut when the
    /// magnitudes are far apart.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let (pa, qa) = (self.coeff.numer(), self.coeff.denom());
        let (pb, qb) = (other.coeff.numer(), other.coeff.denom());
        let d = &self.exp8 - &other.exp8;
        let lr = pa.bits() as i64 - qa.bits() as i64 - pb.bits() as i64 + qb.bits() as i64;
        // value ratio = (pa qb / qa pb) · 2^{d/8}, the first factor within 2^{lr ± 2}.
        let d_over_8 = d.to_f64().unwrap_or(if d.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }) / 8.0;
        let est = lr as f64 + d_over_8;
        if est > 4.0 {
            return Ordering::Greater;
        }
        if est < -4.0 {
            return Ordering::Less;
        }
        // Here |d| is bounded by the coefficient sizes: compare (pa qb)^8 2^d with (pb qa)^8.
        let mut lhs = num_traits::pow(pa * qb, 8);
        let mut rhs = num_traits::pow(pb * qa, 8);
        let shift = d.magnitude().to_usize().expect("shift fits in usize");
        if d.is_positive() {
            lhs <<= shift;
        } else {
            rhs <<= shift;
        }
        lhs.cmp(&rhs)
    }

    pub fn le(&self, other: &Self) -> bool {
        self.cmp_exact(other) != Ordering::Greater
    }

    pub fn ge(&self, other: &Self) -> bool {
        self.cmp_exact(other) != Ordering::Less
    }

    /// Rational enclosure with `precision` bits for the factor 2^{s/8}, s ∈ [0, 8).
    ///
    /// Panics unless [`Monomial::is_expandable`].
    pub fn enclose(&self, precision: u32) -> Enclosure {
        let n = self.normalized();
        let s = n.exp8.to_u64().unwrap();
        if s == 0 {
            return Enclosure::exact(n.coeff);
        }
        let p = u64::from(precision);
        // floor((2^s · 2^{8p})^{1/8}) bracket 2^{s/8}·2^p.
        let radicand = pow2(s + 8 * p);
        let root = radicand.nth_root(8);
        let denom = BigRational::from_integer(pow2(p));
        let lo = BigRational::from_integer(root.clone()) / &denom;
        let hi = BigRational::from_integer(root + 1) / &denom;
        Enclosure {
            lo: &n.coeff * lo,
            hi: &n.coeff * hi,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let est = self.log2_estimate();
        if est > 1100.0 {
            return f64::INFINITY;
        }
        if est < -1100.0 {
            return 0.0;
        }
        let e = self.exp8.to_f64().unwrap();
        if self.coeff.numer().bits() < 1000 && self.coeff.denom().bits() < 1000 {
            to_f64(&self.coeff) * (e / 8.0).exp2()
        } else {
            est.exp2()
        }
    }

    /// Exact symbolic form, e.g. `3/4 * 2^(-10/8)`.
    pub fn symbolic(&self) -> String {
        let n = self.normalized();
        let c = if n.coeff.is_integer() {
            render_integer(n.coeff.numer())
        } else if n.coeff.numer().bits() <= 128 && n.coeff.denom().bits() <= 128 {
            format_rational(&n.coeff)
        } else {
            format!(
                "{}/{}",
                render_integer(n.coeff.numer()),
                render_integer(n.coeff.denom())
            )
        };
        if n.exp8.is_zero() {
            c
        } else {
            format!("{c} * 2^({}/8)", render_integer(&n.exp8))
        }
    }
}

/// Significant decimal digits shown for a `precision`-bit enclosure.
pub fn decimal_digits(precision: u32) -> usize {
    ((f64::from(precision) * std::f64::consts::LOG10_2) as usize).clamp(6, 40)
}

/// Integers up to 128 bits in full, larger ones in scientific notation.
pub fn render_integer(x: &BigInt) -> String {
    if x.bits() <= 128 {
        x.to_string()
    } else {
        decimal(&BigRational::from_integer(x.clone()), 12, Rounding::Nearest)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbolic())
    }
}

/// A closed rational interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True iff every point of the interval is ≤ every point of `other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (to_f64(&self.lo) + to_f64(&self.hi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureRepr {
    pub lo: String,
    pub hi: String,
}

impl Enclosure {
    pub fn to_decimal(&self, digits: usize) -> EnclosureRepr {
        EnclosureRepr {
            lo: decimal(&self.lo, digits, Rounding::Down),
            hi: decimal(&self.hi, digits, Rounding::Up),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

/// Scientific decimal rendering of a rational with `digits` significant digits, rounded in
/// the requested direction (toward −∞ / +∞ / nearest) so printed bounds stay valid.
pub fn decimal(q: &Rational, digits: usize, rounding: Rounding) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = q.is_negative();
    let a = q.abs();
    let l2 = log2_estimate(&a);
    let e10_guess = (l2 as f64 * std::f64::consts::LOG10_2).floor() as i64;
    if e10_guess.abs() > 20_000 {
        // Too large to expand; report the binary magnitude.
        return format!("{}~2^{}", if negative { "-" } else { "" }, l2);
    }
    // Find e10 with 10^{e10} ≤ a < 10^{e10+1}.
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            num_traits::pow(ten.clone(), e.unsigned_abs() as usize).recip()
        }
    };
    let mut e10 = e10_guess;
    while pow10(e10) > a {
        e10 -= 1;
    }
    while pow10(e10 + 1) <= a {
        e10 += 1;
    }
    let scaled = &a * pow10(digits as i64 - 1 - e10);
    // Rounding is applied to |q|; flip direction for negatives.
    let mode = match (rounding, negative) {
        (Rounding::Down, true) => Rounding::Up,
        (Rounding::Up, true) => Rounding::Down,
        (m, _) => m,
    };
    let mut m = match mode {
        Rounding::Down => scaled.floor().to_integer(),
        Rounding::Up => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let limit = num_traits::pow(BigInt::from(10), digits);
    if m >= limit {
        m /= 10;
        e10 += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let mut out = String::new();
    if negative && m.sign() != Sign::NoSign {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    out.push_str(&format!("e{e10}"));
    out
}
