//! Quasi-concave functions φ on (0, 1] used as fundamental functions of Lorentz and
//! Marcinkiewicz spaces.
//!
//! Everything is evaluated in the logarithmic variable u = ln(1/t) ∈ [0, ∞), which keeps
//! values like φ(e^{-600}) representable. The elasticity e(u) = tφ'(t)/φ(t) drives both the
//! validity test (φ nondecreasing and φ(t)/t nonincreasing iff 0 ≤ e ≤ 1) and derivatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::parse_rational;
use crate::dyadic::to_f64;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiFn {
    /// φ(t) = t^α, 0 ≤ α ≤ 1.
    Power { alpha: f64 },
    /// φ(t) = c·log^{−β}(e/t) = c(1 + ln(1/t))^{−β}; β = 0 is the constant c.
    LogPower { c: f64, beta: f64 },
    /// Pointwise product of the factors.
    Product { factors: Vec<PhiFn> },
    /// t/φ(t).
    Dual { inner: Box<PhiFn> },
    /// Log-log interpolation through (u_i, ln φ(e^{−u_i})), u strictly increasing from 0;
    /// extrapolated linearly in these coordinates beyond the table. With `slopes`
    /// (d ln φ/du at the nodes) the interpolation is cubic Hermite.
    Tabulated {
        u: Vec<f64>,
        ln_value: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slopes: Option<Vec<f64>>,
    },
}

impl PhiFn {
    pub fn sqrt() -> Self {
        PhiFn::Power { alpha: 0.5 }
    }

    pub fn identity() -> Self {
        PhiFn::Power { alpha: 1.0 }
    }

    pub fn constant(c: f64) -> Self {
        PhiFn::LogPower { c, beta: 0.0 }
    }

    pub fn log_power(beta: f64) -> Self {
        PhiFn::LogPower { c: 1.0, beta }
    }

    /// Builds a table from points (t_i, φ(t_i)) with 0 < t_i ≤ 1.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .map(|&(t, v)| {
                if !(t > 0.0 && t <= 1.0 && v > 0.0 && v.is_finite()) {
                    Err(Error::InvalidSpec(format!("bad table point ({t}, {v})")))
                } else {
                    Ok((-t.ln(), v.ln()))
                }
            })
            .collect::<Result<_>>()?;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let phi = PhiFn::Tabulated {
            u: pts.iter().map(|p| p.0).collect(),
            ln_value: pts.iter().map(|p| p.1).collect(),
            slopes: None,
        };
        phi.check_table()?;
        Ok(phi)
    }

    fn check_table(&self) -> Result<()> {
        if let PhiFn::Tabulated {
            u,
            ln_value,
            slopes,
        } = self
        {
            let bad_slopes = slopes
                .as_ref()
                .is_some_and(|d| d.len() != u.len() || d.iter().any(|x| !x.is_finite()));
            if u.len() < 2 || u.len() != ln_value.len() || bad_slopes {
                return Err(Error::InvalidSpec(
                    "a tabulated φ needs at least two points".into(),
                ));
            }
            if u[0] != 0.0 {
                return Err(Error::InvalidSpec(
                    "a tabulated φ must include t = 1".into(),
                ));
            }
            if u.windows(2).any(|w| !(w[1] > w[0])) || ln_value.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpec(
                    "tabulated points must have distinct t and finite positive values".into(),
                ));
            }
        }
        Ok(())
    }

    /// ln φ(e^{−u}).
    pub fn ln_at(&self, u: f64) -> f64 {
        match self {
            PhiFn::Power { alpha } => -alpha * u,
            PhiFn::LogPower { c, beta } => {
                if *beta == 0.0 {
                    c.ln()
                } else {
                    c.ln() - beta * u.ln_1p()
                }
            }
            PhiFn::Product { factors } => factors.iter().map(|f| f.ln_at(u)).sum(),
            PhiFn::Dual { inner } => -u - inner.ln_at(u),
            PhiFn::Tabulated {
                u: us,
                ln_value,
                slopes,
            } => table_eval(us, ln_value, slopes.as_deref(), u).0,
        }
    }

    /// Elasticity tφ'(t)/φ(t) at t = e^{−u}.
    pub fn elasticity(&self, u: f64) -> f64 {
        match self {
            PhiFn::Power { alpha } => *alpha,
            PhiFn::LogPower { beta, .. } => beta / (1.0 + u),
            PhiFn::Product { factors } => factors.iter().map(|f| f.elasticity(u)).sum(),
            PhiFn::Dual { inner } => 1.0 - inner.elasticity(u),
            PhiFn::Tabulated {
                u: us,
                ln_value,
                slopes,
            } => -table_eval(us, ln_value, slopes.as_deref(), u).1,
        }
    }

    /// φ(t) for t ∈ (0, 1]; φ(0) is taken as the right limit φ(0+).
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.at_zero();
        }
        match self {
            PhiFn::Power { alpha } => t.powf(*alpha),
            _ => self.value_at_u(-t.ln()),
        }
    }

    pub fn value_at_u(&self, u: f64) -> f64 {
        match self {
            PhiFn::LogPower { c, beta } if *beta == 0.0 => *c,
            PhiFn::LogPower { c, beta } => c * (1.0 + u).powf(-beta),
            _ => self.ln_at(u).exp(),
        }
    }

    /// φ'(t).
    pub fn derivative(&self, t: f64) -> f64 {
        let u = -t.ln();
        self.value_at_u(u) * self.elasticity(u) / t
    }

    /// Leading behaviour φ(e^{−u}) ≈ C·e^{−a u}(1 + u)^{−b} as u → ∞, returned as (a, b).
    pub fn asymptotic_exponents(&self) -> (f64, f64) {
        match self {
            PhiFn::Power { alpha } => (*alpha, 0.0),
            PhiFn::LogPower { beta, .. } => (0.0, *beta),
            PhiFn::Product { factors } => factors.iter().fold((0.0, 0.0), |acc, f| {
                let (a, b) = f.asymptotic_exponents();
                (acc.0 + a, acc.1 + b)
            }),
            PhiFn::Dual { inner } => {
                let (a, b) = inner.asymptotic_exponents();
                (1.0 - a, -b)
            }
            PhiFn::Tabulated { .. } => (self.elasticity(f64::INFINITY), 0.0),
        }
    }

    /// φ(0+) = lim_{t→0+} φ(t), possibly +∞.
    pub fn at_zero(&self) -> f64 {
        const EPS: f64 = 1e-14;
        let (a, b) = self.asymptotic_exponents();
        if a > EPS || (a.abs() <= EPS && b > EPS) {
            0.0
        } else if a < -EPS || b < -EPS {
            f64::INFINITY
        } else {
            // Neither exponential nor logarithmic decay: the remaining constant.
            self.value_at_u(1e15)
        }
    }

    /// Checks positivity and quasi-concavity (0 ≤ elasticity ≤ 1) on a verification grid.
    pub fn validate(&self) -> Result<()> {
        self.check_table()?;
        match self {
            PhiFn::Power { alpha } if !(0.0..=1.0).contains(alpha) => {
                return Err(Error::InvalidSpec(format!(
                    "t^α needs 0 ≤ α ≤ 1, got α = {alpha}"
                )))
            }
            PhiFn::LogPower { c, .. } if !(*c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidSpec(format!(
                    "log-power constant must be positive, got {c}"
                )))
            }
            PhiFn::Product { factors } if factors.is_empty() => {
                return Err(Error::InvalidSpec("empty product".into()))
            }
            _ => {}
        }
        const TOL: f64 = 1e-9;
        for u in verification_grid() {
            let v = self.ln_at(u);
            let e = self.elasticity(u);
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "{self} is not finite and positive at t = e^-{u}"
                )));
            }
            if !(-TOL..=1.0 + TOL).contains(&e) {
                return Err(Error::InvalidSpec(format!(
                    "{self} is not quasi-concave near t = e^-{u} (elasticity {e:.6})"
                )));
            }
        }
        Ok(())
    }

    /// φ̃(t) = t/φ(t), simplified where a closed form exists.
    pub fn dual(&self) -> PhiFn {
        match self {
            PhiFn::Power { alpha } => PhiFn::Power { alpha: 1.0 - alpha },
            PhiFn::LogPower { c, beta } => PhiFn::Product {
                factors: vec![
                    PhiFn::Power { alpha: 1.0 },
                    PhiFn::LogPower {
                        c: 1.0 / c,
                        beta: -beta,
                    },
                ],
            },
            PhiFn::Dual { inner } => (**inner).clone(),
            PhiFn::Product { factors } => match factors.as_slice() {
                [PhiFn::Power { alpha }, PhiFn::LogPower { c, beta }] if *alpha == 1.0 => {
                    PhiFn::LogPower {
                        c: 1.0 / c,
                        beta: -beta,
                    }
                }
                _ => PhiFn::Dual {
                    inner: Box::new(self.clone()),
                },
            },
            other => PhiFn::Dual {
                inner: Box::new(other.clone()),
            },
        }
    }

    /// True when the sup in the Marcinkiewicz norm is always attained at breakpoints, which
    /// holds for pure powers (the per-cell objective v t^α + c t^{α−1} has no interior maximum).
    pub fn breakpoints_suffice(&self) -> bool {
        matches!(self, PhiFn::Power { .. })
    }

    /// Parses `sqrt`, `id`, `const[:c]`, `pow:α`, `logpow:β[:c]` and `tab:t=v,t=v,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidSpec(format!("cannot parse φ from {s:?}: {why}"));
        let num = |x: &str| -> Result<f64> {
            parse_rational(x)
                .map(|r| to_f64(&r))
                .map_err(|_| bad("expected a number"))
        };
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let phi = match (head, rest) {
            ("sqrt", None) => PhiFn::sqrt(),
            ("id" | "t", None) => PhiFn::identity(),
            ("const", None) => PhiFn::constant(1.0),
            ("const", Some(c)) => PhiFn::constant(num(c)?),
            ("pow", Some(a)) => PhiFn::Power { alpha: num(a)? },
            ("logpow", Some(r)) => match r.split_once(':') {
                Some((b, c)) => PhiFn::LogPower {
                    c: num(c)?,
                    beta: num(b)?,
                },
                None => PhiFn::log_power(num(r)?),
            },
            ("tab", Some(r)) => {
                let pts = r
                    .split(',')
                    .map(|p| {
                        let (t, v) = p.split_once('=').ok_or_else(|| bad("expected t=value"))?;
                        Ok((num(t)?, num(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                PhiFn::tabulated(&pts)?
            }
            _ => return Err(bad("unknown form")),
        };
        phi.validate()?;
        Ok(phi)
    }
}

/// (ln φ, d ln φ/du) at u from a table.
fn table_eval(us: &[f64], ys: &[f64], slopes: Option<&[f64]>, u: f64) -> (f64, f64) {
    let n = us.len();
    let i = segment(us, u);
    let h = us[i + 1] - us[i];
    let chord = (ys[i + 1] - ys[i]) / h;
    let Some(d) = slopes else {
        return (ys[i] + chord * (u - us[i]), chord);
    };
    if u <= us[0] {
        return (ys[0] + d[0] * (u - us[0]), d[0]);
    }
    if u >= us[n - 1] {
        return (ys[n - 1] + d[n - 1] * (u - us[n - 1]), d[n - 1]);
    }
    let s = (u - us[i]) / h;
    let (s2, s3) = (s * s, s * s * s);
    let value = (2.0 * s3 - 3.0 * s2 + 1.0) * ys[i]
        + (s3 - 2.0 * s2 + s) * h * d[i]
        + (3.0 * s2 - 2.0 * s3) * ys[i + 1]
        + (s3 - s2) * h * d[i + 1];
    let slope = (6.0 * s2 - 6.0 * s) / h * (ys[i] - ys[i + 1])
        + (3.0 * s2 - 4.0 * s + 1.0) * d[i]
        + (3.0 * s2 - 2.0 * s) * d[i + 1];
    (value, slope)
}

fn segment(us: &[f64], u: f64) -> usize {
    let n = us.len();
    match us.partition_point(|&x| x <= u) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    }
}

/// u = 0 and a geometric sweep up to 10^9.
pub(crate) fn verification_grid() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..=240).map(|i| 10f64.powf(-3.0 + i as f64 * 0.05)))
}

impl fmt::Display for PhiFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFn::Power { alpha } if *alpha == 0.5 => write!(f, "sqrt"),
            PhiFn::Power { alpha } => write!(f, "pow:{alpha}"),
            PhiFn::LogPower { c, beta } if *beta == 0.0 => {
                if *c == 1.0 {
                    write!(f, "const")
                } else {
                    write!(f, "const:{c}")
                }
            }
            PhiFn::LogPower { c, beta } if *c == 1.0 => write!(f, "logpow:{beta}"),
            PhiFn::LogPower { c, beta } => write!(f, "logpow:{beta}:{c}"),
            PhiFn::Product { factors } => {
                write!(f, "prod(")?;
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            PhiFn::Dual { inner } => write!(f, "dual({inner})"),
            PhiFn::Tabulated { u, .. } => write!(f, "tab[{} points]", u.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let s = PhiFn::sqrt();
        assert!((s.value(0.25) - 0.5).abs() < 1e-15);
        let l = PhiFn::log_power(0.5);
        let t: f64 = 0.01;
        assert!((l.value(t) - (1.0 - t.ln()).powf(-0.5)).abs() < 1e-15);
        assert_eq!(l.value(1.0), 1.0);
        assert_eq!(PhiFn::constant(2.0).value(1e-300), 2.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            PhiFn::sqrt(),
            PhiFn::log_power(0.5),
            PhiFn::log_power(0.5).dual(),
            PhiFn::Product {
                factors: vec![PhiFn::Power { alpha: 0.3 }, PhiFn::log_power(-0.2)],
            },
        ];
        for phi in &cases {
            for &t in &[0.9, 0.3, 1e-3] {
                let h = t * 1e-6;
                let fd = (phi.value(t + h) - phi.value(t - h)) / (2.0 * h);
                let d = phi.derivative(t);
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs().max(1e-12),
                    "{phi} at {t}: {fd} vs {d}"
                );
            }
        }
    }

    #[test]
    fn limits_at_zero() {
        assert_eq!(PhiFn::sqrt().at_zero(), 0.0);
        assert_eq!(PhiFn::log_power(0.5).at_zero(), 0.0);
        assert_eq!(PhiFn::constant(3.0).at_zero(), 3.0);
        assert_eq!(PhiFn::log_power(0.5).dual().at_zero(), 0.0);
        assert_eq!(PhiFn::Power { alpha: 0.0 }.at_zero(), 1.0);
    }

    #[test]
    fn duals_multiply_to_t() {
        let phis = [
            PhiFn::sqrt(),
            PhiFn::log_power(0.7),
            PhiFn::tabulated(&[(1.0, 1.0), (0.5, 0.8), (0.1, 0.4)]).unwrap(),
        ];
        for phi in &phis {
            let d = phi.dual();
            for &t in &[1.0, 0.5, 0.2, 1e-5] {
                assert!((phi.value(t) * d.value(t) - t).abs() < 1e-12 * t.max(1e-300));
            }
            assert_eq!(d.dual(), *phi);
        }
    }

    #[test]
    fn validation() {
        assert!(PhiFn::sqrt().validate().is_ok());
        assert!(PhiFn::log_power(0.5).validate().is_ok());
        assert!(PhiFn::constant(1.0).validate().is_ok());
        assert!(PhiFn::log_power(0.5).dual().validate().is_ok());
        assert!(PhiFn::Power { alpha: 1.5 }.validate().is_err());
        // β < 0 makes φ decreasing.
        assert!(PhiFn::log_power(-0.5).validate().is_err());
        // φ(t) = t² is not quasi-concave.
        assert!(PhiFn::Product {
            factors: vec![PhiFn::identity(), PhiFn::identity()]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "sqrt",
            "pow:0.25",
            "logpow:0.5",
            "logpow:0.5:2",
            "const",
            "const:3",
        ] {
            let phi = PhiFn::parse(s).unwrap();
            assert_eq!(phi.to_string(), s);
            assert_eq!(PhiFn::parse(&phi.to_string()).unwrap(), phi);
        }
        assert_eq!(PhiFn::parse("pow:1/2").unwrap(), PhiFn::sqrt());
        assert!(PhiFn::parse("banana").is_err());
        let tab = PhiFn::parse("tab:1=1,0.5=0.75,0.25=0.5").unwrap();
        assert!((tab.value(0.5) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn tabulated_interpolates_log_log() {
        // Points of t^{1/2}: log-log interpolation reproduces it exactly.
        let pts: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let t = 0.5f64.powi(k);
                (t, t.sqrt())
            })
            .collect();
        let tab = PhiFn::tabulated(&pts).unwrap();
        for &t in &[0.7, 0.3, 0.01, 1e-6] {
            assert!((tab.value(t) - t.sqrt()).abs() < 1e-12 * t.sqrt());
        }
        assert!((tab.elasticity(3.0) - 0.5).abs() < 1e-12);
    }
}
