//! Weighted spaces X(w) with ‖f‖_{X(w)} = ‖f·w‖_X.
//!
//! L_∞ ⊂ X(w) ⊂ L₁ holds iff w ∈ X and 1/w ∈ X′. Step weights are bounded above and below,
//! so both memberships are automatic; the question is only meaningful for closed-form weights,
//! which are sampled at cell midpoints on a sequence of levels and judged by the trend of the
//! two norms as the level grows.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{from_f64, parse_rational, to_f64, Rational, StepFunction};
use crate::error::{Error, Result};
use crate::spaces::{dual_space, norm, SpaceSpec, TrendCertificate};

/// Sampling level used when a closed-form descriptor does not specify one.
pub const DEFAULT_SAMPLE_LEVEL: u32 = 12;
/// Number of levels (spaced by two) in an admissibility trend.
const TREND_LEVELS: u32 = 4;

/// How a weight was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSource {
    /// A given step function.
    Step,
    /// The constant c.
    Constant { c: String },
    /// t^α sampled at midpoints of rank-`level` cells.
    Power { alpha: f64, level: u32 },
    /// log^β(e/t) = (1 + ln(1/t))^β sampled at midpoints of rank-`level` cells.
    LogPower { beta: f64, level: u32 },
}

impl WeightSource {
    fn closed_form(&self) -> Option<(Box<dyn Fn(f64) -> f64 + Sync>, u32)> {
        match *self {
            WeightSource::Power { alpha, level } => {
                Some((Box::new(move |t: f64| t.powf(alpha)), level))
            }
            WeightSource::LogPower { beta, level } => {
                Some((Box::new(move |t: f64| (1.0 - t.ln()).powf(beta)), level))
            }
            _ => None,
        }
    }

    fn with_level(&self, level: u32) -> Self {
        match *self {
            WeightSource::Power { alpha, .. } => WeightSource::Power { alpha, level },
            WeightSource::LogPower { beta, .. } => WeightSource::LogPower { beta, level },
            ref other => other.clone(),
        }
    }
}

/// A strictly positive step function w with its reciprocal and a per-space norm cache.
#[derive(Clone, Debug)]
pub struct Weight {
    w: StepFunction,
    inv: StepFunction,
    source: WeightSource,
    cache: Arc<Mutex<HashMap<String, Admissibility>>>,
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.source == other.source
    }
}

impl Weight {
    pub fn new(w: StepFunction) -> Result<Self> {
        Self::with_source(w, WeightSource::Step)
    }

    fn with_source(w: StepFunction, source: WeightSource) -> Result<Self> {
        if let Some(v) = w.runs().iter().map(|r| &r.value).find(|v| !v.is_positive()) {
            return Err(Error::NonPositiveWeight(crate::dyadic::format_rational(v)));
        }
        let inv = w.reciprocal()?;
        Ok(Self {
            w,
            inv,
            source,
            cache: Arc::default(),
        })
    }

    pub fn one() -> Self {
        Self::constant(Rational::from_integer(1.into())).expect("1 is positive")
    }

    pub fn constant(c: Rational) -> Result<Self> {
        let source = WeightSource::Constant {
            c: crate::dyadic::format_rational(&c),
        };
        Self::with_source(StepFunction::constant(c), source)
    }

    /// t^α sampled at midpoints; α = 0 is the constant 1.
    pub fn power(alpha: f64, level: u32) -> Result<Self> {
        Self::sampled(WeightSource::Power { alpha, level })
    }

    /// (1 + ln(1/t))^β sampled at midpoints.
    pub fn log_power(beta: f64, level: u32) -> Result<Self> {
        Self::sampled(WeightSource::LogPower { beta, level })
    }

    fn sampled(source: WeightSource) -> Result<Self> {
        let (g, level) = source.closed_form().expect("closed-form source");
        crate::dyadic::check_level(level)?;
        let n = 1u64 << level;
        let scale = 1.0 / n as f64;
        let cells = crate::par::try_map_range(n as usize, |j| {
            let v = g((j as f64 + 0.5) * scale);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveWeight(format!("{v}")));
            }
            from_f64(v)
        })?;
        Self::with_source(StepFunction::new(level, cells)?, source)
    }

    /// Parses `const:c`, `pow:α[:level=L]`, `logpow:β[:level=L]` or `step:<file>` (a
    /// StepFunction JSON document).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("weight descriptor {s:?}: {why}"));
        let s = s.trim();
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected kind:argument"))?;
        let num = |x: &str| -> Result<f64> {
            parse_rational(x)
                .map(|r| to_f64(&r))
                .map_err(|_| bad("expected a number"))
        };
        let split_level = |rest: &str| -> Result<(f64, u32)> {
            let mut parts = rest.split(':');
            let x = num(parts.next().unwrap_or(""))?;
            let mut level = DEFAULT_SAMPLE_LEVEL;
            for p in parts {
                let l = p
                    .strip_prefix("level=")
                    .ok_or_else(|| bad("expected level=L"))?;
                level = l.parse().map_err(|_| bad("level must be an integer"))?;
            }
            Ok((x, level))
        };
        match head {
            "const" => {
                Self::constant(parse_rational(rest).map_err(|_| bad("expected a rational"))?)
            }
            "pow" => {
                let (alpha, level) = split_level(rest)?;
                if alpha == 0.0 {
                    return Ok(Self::one());
                }
                Self::power(alpha, level)
            }
            "logpow" => {
                let (beta, level) = split_level(rest)?;
                if beta == 0.0 {
                    return Ok(Self::one());
                }
                Self::log_power(beta, level)
            }
            "step" => {
                let text = std::fs::read_to_string(rest)
                    .map_err(|e| bad(&format!("cannot read {rest}: {e}")))?;
                Self::new(StepFunction::from_json(&text)?)
            }
            _ => Err(bad("unknown kind")),
        }
    }

    pub fn function(&self) -> &StepFunction {
        &self.w
    }

    pub fn reciprocal(&self) -> &StepFunction {
        &self.inv
    }

    pub fn source(&self) -> &WeightSource {
        &self.source
    }

    pub fn is_one(&self) -> bool {
        self.w == StepFunction::one()
    }

    /// Sampling level for closed-form weights.
    pub fn sample_level(&self) -> Option<u32> {
        self.source.closed_form().map(|(_, l)| l)
    }

    /// The same closed-form weight resampled at another level (step weights are returned as is).
    pub fn at_level(&self, level: u32) -> Result<Self> {
        match self.source.closed_form() {
            Some(_) => Self::sampled(self.source.with_level(level)),
            None => Ok(self.clone()),
        }
    }

    /// f·w.
    pub fn apply(&self, f: &StepFunction) -> StepFunction {
        f.mul(&self.w)
    }

    /// f/w.
    pub fn divide(&self, f: &StepFunction) -> StepFunction {
        f.mul(&self.inv)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            WeightSource::Step => write!(f, "step[level {}]", self.w.level()),
            WeightSource::Constant { c } => write!(f, "const:{c}"),
            WeightSource::Power { alpha, level } => write!(f, "pow:{alpha}:level={level}"),
            WeightSource::LogPower { beta, level } => write!(f, "logpow:{beta}:level={level}"),
        }
    }
}

/// ‖f·w‖_X.
pub fn weighted_norm(x: &SpaceSpec, w: &Weight, f: &StepFunction) -> Result<f64> {
    norm(x, &w.apply(f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub ok: bool,
    /// ‖w‖_X at the weight's own level.
    pub w_x: f64,
    /// ‖1/w‖_{X′} at the weight's own level.
    pub inv_w_x_dual: f64,
    pub dual: SpaceSpec,
    /// Level trends, present for sampled closed-form weights.
    pub w_trend: Option<TrendCertificate>,
    pub inv_trend: Option<TrendCertificate>,
}

/// Checks L_∞ ⊂ X(w) ⊂ L₁, i.e. w ∈ X and 1/w ∈ X′.
pub fn admissible(x: &SpaceSpec, w: &Weight) -> Result<Admissibility> {
    let key = x.to_string();
    if let Some(hit) = w.cache.lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let dual = dual_space(x)?;
    let w_x = norm(x, w.function())?;
    let inv_w_x_dual = norm(&dual, w.reciprocal())?;
    let (w_trend, inv_trend) = match w.sample_level() {
        None => (None, None),
        Some(top) => {
            let levels: Vec<u32> = (0..TREND_LEVELS)
                .rev()
                .filter_map(|k| top.checked_sub(2 * k))
                .filter(|&l| l >= 1)
                .collect();
            let mut a = Vec::new();
            let mut b = Vec::new();
            for &l in &levels {
                if l == top {
                    a.push(w_x);
                    b.push(inv_w_x_dual);
                } else {
                    let wl = w.at_level(l)?;
                    a.push(norm(x, wl.function())?);
                    b.push(norm(&dual, wl.reciprocal())?);
                }
            }
            let depths: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
            (
                Some(TrendCertificate::from_refinements(depths.clone(), a)),
                Some(TrendCertificate::from_refinements(depths, b)),
            )
        }
    };
    let diverging = |c: &Option<TrendCertificate>| c.as_ref().is_some_and(|c| c.is_diverging());
    let report = Admissibility {
        ok: w_x.is_finite()
            && inv_w_x_dual.is_finite()
            && !diverging(&w_trend)
            && !diverging(&inv_trend),
        w_x,
        inv_w_x_dual,
        dual,
        w_trend,
        inv_trend,
    };
    w.cache
        .lock()
        .expect("cache lock")
        .insert(key, report.clone());
    Ok(report)
}

/// q(w) evaluated at the weight's trend levels, with a refinement certificate for sampled
/// closed-form weights. Returns the value at the weight's own level.
pub fn level_trend(
    w: &Weight,
    mut q: impl FnMut(&Weight) -> Result<f64>,
) -> Result<(f64, Option<TrendCertificate>)> {
    let top_value = q(w)?;
    let Some(top) = w.sample_level() else {
        return Ok((top_value, None));
    };
    let levels: Vec<u32> = (0..TREND_LEVELS)
        .rev()
        .filter_map(|k| top.checked_sub(2 * k))
        .filter(|&l| l >= 1)
        .collect();
    let mut values = Vec::with_capacity(levels.len());
    for &l in &levels {
        values.push(if l == top {
            top_value
        } else {
            q(&w.at_level(l)?)?
        });
    }
    let depths = levels.iter().map(|&l| f64::from(l)).collect();
    Ok((
        top_value,
        Some(TrendCertificate::from_refinements(depths, values)),
    ))
}

/// ∫|fg| / (‖f‖_X ‖g‖_{X′}), which is at most 1.
pub fn holder_check(x: &SpaceSpec, f: &StepFunction, g: &StepFunction) -> Result<f64> {
    let nf = norm(x, f)?;
    let ng = norm(&dual_space(x)?, g)?;
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::DivisionByZero(
            "a Hölder pairing needs nonzero norms",
        ));
    }
    let pairing = f.abs().inner(&g.abs());
    debug_assert!(!pairing.is_negative() || pairing.is_zero());
    Ok(to_f64(&pairing) / (nf * ng))
}
