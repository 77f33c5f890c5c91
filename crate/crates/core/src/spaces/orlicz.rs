//! Young functions M for Orlicz spaces L_M.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{parse_rational, to_f64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrliczFn {
    /// M(u) = u^p, p ≥ 1.
    Power { p: f64 },
    /// M(u) = exp(u^p) − 1, p ≥ 1.
    ExpPower { p: f64 },
}

impl OrliczFn {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            OrliczFn::Power { p } => u.powf(*p),
            OrliczFn::ExpPower { p } => u.powf(*p).exp_m1(),
        }
    }

    /// M^{-1}(y) for y ≥ 0.
    pub fn inverse(&self, y: f64) -> f64 {
        match self {
            OrliczFn::Power { p } => y.powf(1.0 / p),
            OrliczFn::ExpPower { p } => y.ln_1p().powf(1.0 / p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = match self {
            OrliczFn::Power { p } | OrliczFn::ExpPower { p } => *p,
        };
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "Young function {self} needs a finite exponent p >= 1"
            )));
        }
        // Convexity and M(0) = 0 on a grid, as a guard for future variants.
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidSpec(format!("{self} does not vanish at 0")));
        }
        let grid: Vec<f64> = (0..=64).map(|i| i as f64 / 16.0).collect();
        for w in grid.windows(3) {
            let (a, b, c) = (self.eval(w[0]), self.eval(w[1]), self.eval(w[2]));
            if b > 0.5 * (a + c) * (1.0 + 1e-12) || b < a {
                return Err(Error::InvalidSpec(format!(
                    "{self} is not convex increasing"
                )));
            }
        }
        Ok(())
    }

    /// Parses `pow:p` or `exp:p`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("cannot parse a Young function from {s:?}"));
        let (head, p) = s.trim().split_once(':').ok_or_else(bad)?;
        let p = to_f64(&parse_rational(p).map_err(|_| bad())?);
        let m = match head {
            "pow" => OrliczFn::Power { p },
            "exp" => OrliczFn::ExpPower { p },
            _ => return Err(bad()),
        };
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for OrliczFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrliczFn::Power { p } => write!(f, "pow:{p}"),
            OrliczFn::ExpPower { p } => write!(f, "exp:{p}"),
        }
    }
}
