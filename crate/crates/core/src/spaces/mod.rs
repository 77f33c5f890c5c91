//! Symmetric function spaces on [0, 1]: L_p, L_∞, Orlicz L_M, Exp L^p, Lorentz Λ(φ) and
//! Marcinkiewicz M(φ).
//!
//! Norms are computed from the decreasing rearrangement. L_p with integer p is exact up to
//! the final root; the other families use the evaluators in [`norm`]:
//!
//! * ‖f‖_{Λ(φ)} = ∫₀¹ f* dφ, with φ(0) := 0 so a jump φ(0+) > 0 contributes φ(0+)·f*(0+);
//! * ‖f‖_{M(φ)} = sup_t φ(t)/t ∫₀^t f*;
//! * ‖f‖_{L_M} = inf{λ : ∫ M(|f|/λ) ≤ 1};
//! * ‖f‖_{Exp L^p} = sup_t f*(t) log^{−1/p}(e/t), an equivalent norm (it is the Marcinkiewicz
//!   form); the Luxemburg form is available as `orlicz:exp:p`.

pub mod analysis;
pub mod norm;
pub mod orlicz;
pub mod phi;
pub mod trend;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{parse_rational, to_f64, Rational, StepFunction};
use crate::error::{Error, Result};
use crate::rearrangement::Profile;

pub use analysis::{
    contains_loghalf, delta2_check, dilation_indices, dual_space, fundamental, psi_from_phi,
    sym_kernel_norm, sym_kernel_trend, Delta2Report, DilationIndices, LogHalfMembership,
};
pub use orlicz::OrliczFn;
pub use phi::PhiFn;
pub use trend::{TrendCertificate, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum SpaceSpec {
    Lp { p: f64 },
    Linfty,
    Orlicz { m: OrliczFn },
    ExpLp { p: f64 },
    Lorentz { phi: PhiFn },
    Marcinkiewicz { phi: PhiFn },
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Self {
        SpaceSpec::Lp { p }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Lp { p } if !(*p >= 1.0 && p.is_finite()) => Err(Error::InvalidSpec(
                format!("L_p needs a finite p >= 1, got {p}"),
            )),
            SpaceSpec::ExpLp { p } if !(*p > 0.0 && p.is_finite()) => {
                Err(Error::InvalidSpec(format!("Exp L^p needs p > 0, got {p}")))
            }
            SpaceSpec::Orlicz { m } => m.validate(),
            SpaceSpec::Lorentz { phi } | SpaceSpec::Marcinkiewicz { phi } => phi.validate(),
            _ => Ok(()),
        }
    }

    /// True when the value returned by [`norm`] is an equivalent norm rather than the
    /// customary one (Exp L^p in sup form).
    pub fn equivalent_norm_convention(&self) -> bool {
        matches!(self, SpaceSpec::ExpLp { .. })
    }

    /// Parses descriptors such as `lp:2`, `lp:3/2`, `linf`, `lorentz:sqrt`,
    /// `marcinkiewicz:logpow:0.5`, `orlicz:exp:2`, `explp:2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidSpec(format!("cannot parse space {s:?}: {why}"));
        let num = |x: &str| -> Result<f64> {
            parse_rational(x)
                .map(|r| to_f64(&r))
                .map_err(|_| bad("expected a number"))
        };
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let spec = match (head.to_ascii_lowercase().as_str(), rest) {
            ("lp", Some("inf")) | ("linf", None) | ("linfty", None) => SpaceSpec::Linfty,
            ("lp", Some(p)) => SpaceSpec::Lp { p: num(p)? },
            ("l1", None) => SpaceSpec::Lp { p: 1.0 },
            ("l2", None) => SpaceSpec::Lp { p: 2.0 },
            ("explp" | "exp", Some(p)) => SpaceSpec::ExpLp { p: num(p)? },
            ("orlicz", Some(m)) => SpaceSpec::Orlicz {
                m: OrliczFn::parse(m)?,
            },
            ("lorentz" | "lambda", Some(phi)) => SpaceSpec::Lorentz {
                phi: PhiFn::parse(phi)?,
            },
            ("marcinkiewicz" | "marc", Some(phi)) => SpaceSpec::Marcinkiewicz {
                phi: PhiFn::parse(phi)?,
            },
            _ => return Err(bad("unknown family")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p } => write!(f, "lp:{p}"),
            SpaceSpec::Linfty => write!(f, "linf"),
            SpaceSpec::Orlicz { m } => write!(f, "orlicz:{m}"),
            SpaceSpec::ExpLp { p } => write!(f, "explp:{p}"),
            SpaceSpec::Lorentz { phi } => write!(f, "lorentz:{phi}"),
            SpaceSpec::Marcinkiewicz { phi } => write!(f, "marcinkiewicz:{phi}"),
        }
    }
}

impl std::str::FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceSpec::parse(s)
    }
}

/// Largest integer exponent for which L_p norms are accumulated in exact rationals.
const EXACT_LP_MAX: f64 = 16.0;

/// ‖f‖_X.
pub fn norm(x: &SpaceSpec, f: &StepFunction) -> Result<f64> {
    x.validate()?;
    if let SpaceSpec::Lp { p } = x {
        if p.fract() == 0.0 && *p <= EXACT_LP_MAX && is_dyadic(f) {
            return Ok(exact_lp_power(*p as u32, f).powf(1.0 / p));
        }
    }
    Ok(norm_profile(x, &Profile::of(f)))
}

/// True when every value has a power-of-two denominator, so exact sums stay small.
fn is_dyadic(f: &StepFunction) -> bool {
    f.runs().iter().all(|r| {
        let d = r.value.denom();
        d.is_positive() && (d & (d - BigInt::from(1u8))).is_zero()
    })
}

/// ∫|f|^p as a double, accumulated exactly.
fn exact_lp_power(p: u32, f: &StepFunction) -> f64 {
    let mut sum = Rational::zero();
    for run in f.runs() {
        let a = run.value.abs();
        if !a.is_zero() {
            sum += num_traits::pow(a, p as usize) * Rational::from_integer(BigInt::from(run.len));
        }
    }
    let denom = Rational::from_integer(BigInt::from(1u8) << f.level() as usize);
    to_f64(&(sum / denom))
}

/// ‖f‖_X evaluated on a precomputed rearrangement.
pub fn norm_profile(x: &SpaceSpec, prof: &Profile) -> f64 {
    match x {
        SpaceSpec::Lp { p } => norm::lp(*p, prof),
        SpaceSpec::Linfty => norm::linf(prof),
        SpaceSpec::Orlicz { m } => norm::orlicz(m, prof),
        SpaceSpec::ExpLp { p } => norm::explp_sup(*p, prof),
        SpaceSpec::Lorentz { phi } => norm::lorentz(phi, prof),
        SpaceSpec::Marcinkiewicz { phi } => norm::marcinkiewicz(phi, prof),
    }
}

/// ‖(v_1, ..., v_N)‖_X for N equal cells (N need not be a power of two).
pub fn norm_cells(x: &SpaceSpec, cells: &[f64]) -> f64 {
    norm_profile(x, &Profile::from_cells(cells))
}

/// Exponent p as an integer when it is one (used by exact paths).
pub fn integer_exponent(p: f64) -> Option<u32> {
    if p.fract() == 0.0 && p >= 1.0 {
        p.to_u32()
    } else {
        None
    }
}
