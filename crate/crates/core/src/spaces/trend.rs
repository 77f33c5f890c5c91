//! Divergence certificates from doubling truncations.
//!
//! A quantity that may be infinite is evaluated at truncation depths U_0, 2U_0, 4U_0, ...;
//! it is declared diverging when each of the last three doublings grows it by more than
//! [`GROWTH_THRESHOLD`] relative. This is evidence, not proof, and is reported as such.

use serde::{Deserialize, Serialize};

use crate::serde_util::vec_extended;

pub const GROWTH_THRESHOLD: f64 = 1e-3;
/// Number of trailing doublings that must all exceed the threshold.
pub const DIVERGENCE_WINDOW: usize = 3;
/// Increment ratio below which a refinement sequence counts as converging.
pub const CONTRACTION: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Diverging,
    Insufficient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendCertificate {
    /// Truncation depth per evaluation (units depend on the producer).
    pub depths: Vec<f64>,
    #[serde(with = "vec_extended")]
    pub values: Vec<f64>,
    /// Relative growth between consecutive values.
    #[serde(with = "vec_extended")]
    pub growth: Vec<f64>,
    pub verdict: Verdict,
}

impl TrendCertificate {
    pub fn from_values(depths: Vec<f64>, values: Vec<f64>) -> Self {
        let growth: Vec<f64> = values
            .windows(2)
            .map(|w| relative_growth(w[0], w[1]))
            .collect();
        let verdict = if values.iter().any(|v| v.is_infinite()) {
            Verdict::Diverging
        } else if growth.len() < DIVERGENCE_WINDOW {
            Verdict::Insufficient
        } else if growth[growth.len() - DIVERGENCE_WINDOW..]
            .iter()
            .all(|&g| g > GROWTH_THRESHOLD)
        {
            Verdict::Diverging
        } else {
            Verdict::Stable
        };
        Self {
            depths,
            values,
            growth,
            verdict,
        }
    }

    /// Verdict for a sequence of refinements (e.g. sampling levels) whose increments shrink
    /// geometrically when the limit is finite: diverging when the last growth exceeds the
    /// threshold and the increments are not contracting by at least [`CONTRACTION`].
    pub fn from_refinements(depths: Vec<f64>, values: Vec<f64>) -> Self {
        let mut cert = Self::from_values(depths, values);
        if cert.verdict == Verdict::Diverging && cert.values.iter().all(|v| v.is_finite()) {
            let v = &cert.values;
            let n = v.len();
            let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            let contracting = d[n - 3..]
                .windows(2)
                .all(|p| p[0] != 0.0 && (p[1] / p[0]).abs() < CONTRACTION);
            if contracting {
                cert.verdict = Verdict::Stable;
            }
        } else if cert.verdict == Verdict::Insufficient && cert.values.len() >= 3 {
            cert.verdict = Verdict::Stable;
        }
        cert
    }

    /// Evaluates `f` at depths `u0·2^k`, k = 0..=max_doublings, stopping early once the last
    /// window of growths is below the threshold.
    pub fn doubling(u0: f64, max_doublings: u32, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut depths = Vec::new();
        let mut values = Vec::new();
        for k in 0..=max_doublings {
            let u = u0 * 2f64.powi(k as i32);
            let v = f(u);
            depths.push(u);
            values.push(v);
            if v.is_infinite() {
                break;
            }
            let n = values.len();
            if n > DIVERGENCE_WINDOW {
                let settled = values[n - DIVERGENCE_WINDOW - 1..]
                    .windows(2)
                    .all(|w| relative_growth(w[0], w[1]) <= GROWTH_THRESHOLD * 1e-3);
                if settled {
                    break;
                }
            }
        }
        Self::from_values(depths, values)
    }

    pub fn is_diverging(&self) -> bool {
        self.verdict == Verdict::Diverging
    }

    pub fn last_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }
}

/// (b − a)/|a| with the conventions 0 → 0 is no growth and 0 → positive is infinite growth.
pub fn relative_growth(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (b - a) / a.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_partial_sums_diverge() {
        // H(U) ~ ln U grows by about ln 2 per doubling.
        let c =
            TrendCertificate::doubling(1.0, 20, |u| (1..=u as u64).map(|k| 1.0 / k as f64).sum());
        assert_eq!(c.verdict, Verdict::Diverging);
    }

    #[test]
    fn geometric_tail_is_stable() {
        let c = TrendCertificate::doubling(1.0, 24, |u| 1.0 - (-u).exp());
        assert_eq!(c.verdict, Verdict::Stable);
        assert!(c.values.len() < 25);
    }

    #[test]
    fn short_sequences_are_insufficient() {
        let c = TrendCertificate::from_values(vec![1.0, 2.0], vec![1.0, 2.0]);
        assert_eq!(c.verdict, Verdict::Insufficient);
    }

    #[test]
    fn infinite_values_serialize() {
        let c = TrendCertificate::from_values(vec![1.0], vec![f64::INFINITY]);
        assert!(c.is_diverging());
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"inf\""));
        let back: TrendCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back.values[0], f64::INFINITY);
    }
}
