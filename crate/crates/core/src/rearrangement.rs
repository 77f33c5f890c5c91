//! Distribution functions, decreasing rearrangements and equimeasurability.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dyadic::{format_rational, rational_dyadic, to_f64, Rational, StepFunction};

/// n_f(τ) = m{|f| > τ}, stored as the distinct values of |f| in decreasing order together with
/// the measure of each level set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionFn {
    levels: Vec<(Rational, Rational)>,
}

impl DistributionFn {
    /// `(value, m{|f| = value})` pairs, values strictly decreasing.
    pub fn levels(&self) -> &[(Rational, Rational)] {
        &self.levels
    }

    pub fn eval(&self, tau: &Rational) -> Rational {
        self.levels
            .iter()
            .take_while(|(v, _)| v > tau)
            .fold(Rational::zero(), |acc, (_, m)| acc + m)
    }

    /// `(τ, n_f(τ))` at each jump τ = value, right-continuous: n_f is constant on [v_{i+1}, v_i).
    pub fn breakpoints(&self) -> Vec<(Rational, Rational)> {
        let mut acc = Rational::zero();
        let mut out = Vec::with_capacity(self.levels.len());
        for (v, m) in &self.levels {
            out.push((v.clone(), acc.clone()));
            acc += m;
        }
        out
    }
}

impl Serialize for DistributionFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(String, String)> = self
            .breakpoints()
            .iter()
            .map(|(t, m)| (format_rational(t), format_rational(m)))
            .collect();
        v.serialize(s)
    }
}

fn abs_runs(f: &StepFunction) -> Vec<(Rational, u64)> {
    let mut runs: Vec<(Rational, u64)> = f.runs().iter().map(|r| (r.value.abs(), r.len)).collect();
    // Stable: ties keep their original order.
    runs.sort_by(|a, b| b.0.cmp(&a.0));
    runs
}

pub fn distribution(f: &StepFunction) -> DistributionFn {
    let level = f.level();
    let mut levels: Vec<(Rational, Rational)> = Vec::new();
    let mut pending: Option<(Rational, u64)> = None;
    for (v, len) in abs_runs(f) {
        match &mut pending {
            Some((pv, plen)) if *pv == v => *plen += len,
            _ => {
                if let Some((pv, plen)) = pending.take() {
                    levels.push((pv, rational_dyadic(plen, level)));
                }
                pending = Some((v, len));
            }
        }
    }
    if let Some((pv, plen)) = pending {
        levels.push((pv, rational_dyadic(plen, level)));
    }
    levels.retain(|(v, _)| !v.is_zero());
    DistributionFn { levels }
}

/// f*: |f| sorted nonincreasingly, as a step function on the same grid.
pub fn decreasing_rearrangement(f: &StepFunction) -> StepFunction {
    let runs = abs_runs(f).into_iter().map(|(v, len)| (len, v)).collect();
    StepFunction::from_runs(f.level(), runs).expect("rearranging preserves the cell count")
}

pub fn equimeasurable(f: &StepFunction, g: &StepFunction) -> bool {
    decreasing_rearrangement(f) == decreasing_rearrangement(g)
}

/// Floating-point view of f*: runs `(value, measure)` with values strictly decreasing and
/// positive. Zero values are dropped, so measures sum to m(supp f).
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub values: Vec<f64>,
    pub measures: Vec<f64>,
}

impl Profile {
    pub fn of(f: &StepFunction) -> Self {
        let dist = distribution(f);
        Self {
            values: dist.levels.iter().map(|(v, _)| to_f64(v)).collect(),
            measures: dist.levels.iter().map(|(_, m)| to_f64(m)).collect(),
        }
    }

    /// Builds a profile from arbitrary `(value, measure)` pairs, taking |value|, sorting and
    /// merging equal values.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = pairs
            .into_iter()
            .map(|(x, m)| (x.abs(), m))
            .filter(|&(x, m)| x > 0.0 && m > 0.0)
            .collect();
        v.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut values: Vec<f64> = Vec::with_capacity(v.len());
        let mut measures: Vec<f64> = Vec::with_capacity(v.len());
        for (x, m) in v {
            if values.last() == Some(&x) {
                *measures.last_mut().unwrap() += m;
            } else {
                values.push(x);
                measures.push(m);
            }
        }
        Self { values, measures }
    }

    /// Profile of equally sized cells with the given values.
    pub fn from_cells(cells: &[f64]) -> Self {
        let m = 1.0 / cells.len() as f64;
        Self::from_pairs(cells.iter().map(|&x| (x, m)))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Right endpoints t_i = m{|f| ≥ v_i}, clamped to 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.measures
            .iter()
            .map(|m| {
                acc += m;
                acc.min(1.0)
            })
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_pairs(
            self.values
                .iter()
                .zip(&self.measures)
                .map(|(&v, &m)| (v * c, m)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{integer, rademacher, rational};

    fn step(level: u32, v: &[i64]) -> StepFunction {
        StepFunction::new(level, v.iter().map(|&x| integer(x)).collect()).unwrap()
    }

    #[test]
    fn distribution_examples() {
        let f = step(2, &[3, 1, 2, 3]);
        assert_eq!(distribution(&f).eval(&rational(3, 2)), rational(3, 4));
        assert!(distribution(&StepFunction::zero())
            .eval(&integer(0))
            .is_zero());
        let chi = StepFunction::indicator(1, &[1]).unwrap();
        assert_eq!(distribution(&chi).eval(&rational(1, 2)), rational(1, 2));
        // Right continuity: at τ equal to a value the cells of that value do not count.
        assert_eq!(distribution(&f).eval(&integer(3)), integer(0));
        assert_eq!(distribution(&f).eval(&integer(2)), rational(1, 2));
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(
            decreasing_rearrangement(&step(2, &[3, 1, 2, 3])),
            step(2, &[3, 3, 2, 1])
        );
        assert_eq!(
            decreasing_rearrangement(&step(1, &[-2, 1])),
            step(1, &[2, 1])
        );
        let s = rademacher(1, 2).unwrap().add(&rademacher(2, 2).unwrap());
        assert_eq!(decreasing_rearrangement(&s), step(2, &[2, 2, 0, 0]));
    }

    #[test]
    fn equimeasurable_examples() {
        assert!(equimeasurable(&step(1, &[1, 2]), &step(1, &[2, 1])));
        let f = step(2, &[0, 5, -1, 3]);
        assert!(equimeasurable(&f, &decreasing_rearrangement(&f)));
        let a = StepFunction::indicator(1, &[1]).unwrap();
        let b = StepFunction::indicator(2, &[1]).unwrap();
        assert!(!equimeasurable(&a, &b));
    }

    #[test]
    fn profile_merges_and_orders() {
        let f = step(3, &[1, -4, 0, 4, 2, 2, 0, 1]);
        let p = Profile::of(&f);
        assert_eq!(p.values, vec![4.0, 2.0, 1.0]);
        assert_eq!(p.measures, vec![0.25, 0.25, 0.25]);
        assert_eq!(p.cumulative(), vec![0.25, 0.5, 0.75]);
        assert_eq!(
            Profile::from_cells(&[1.0, -4.0, 0.0, 4.0, 2.0, 2.0, 0.0, 1.0]),
            p
        );
    }
}
