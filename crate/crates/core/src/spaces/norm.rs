//! Norm evaluators acting on decreasing rearrangements ([`Profile`]s).

use crate::quad::golden_max;
use crate::rearrangement::Profile;

use super::orlicz::OrliczFn;
use super::phi::PhiFn;

/// Relative tolerance of the Luxemburg bisection.
pub const ORLICZ_REL_TOL: f64 = 1e-13;
/// Relative tolerance of the per-cell golden-section refinement for Marcinkiewicz sups.
pub const MARCINKIEWICZ_REL_TOL: f64 = 1e-12;

/// Σ x_i with Neumaier compensation.
pub(crate) fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn lp(p: f64, prof: &Profile) -> f64 {
    let vmax = prof.max();
    if vmax == 0.0 {
        return 0.0;
    }
    let s = compensated_sum(
        prof.values
            .iter()
            .zip(&prof.measures)
            .map(|(&v, &m)| (v / vmax).powf(p) * m),
    );
    vmax * s.powf(1.0 / p)
}

pub fn linf(prof: &Profile) -> f64 {
    prof.max()
}

/// ∫ f* dφ with φ(0) := 0, by Abel summation Σ φ(t_i)(v_i − v_{i+1}) (all terms ≥ 0).
pub fn lorentz(phi: &PhiFn, prof: &Profile) -> f64 {
    let t = prof.cumulative();
    let n = prof.len();
    compensated_sum((0..n).map(|i| {
        let next = if i + 1 < n { prof.values[i + 1] } else { 0.0 };
        phi.value(t[i]) * (prof.values[i] - next)
    }))
}

/// sup_t φ(t)/t ∫₀^t f*.
pub fn marcinkiewicz(phi: &PhiFn, prof: &Profile) -> f64 {
    let t = prof.cumulative();
    let mut best = 0.0f64;
    let mut acc = 0.0f64;
    let mut t_prev = 0.0f64;
    for i in 0..prof.len() {
        let v = prof.values[i];
        // On (t_{i-1}, t_i]: ∫₀^s f* = c + v s with c = F(t_{i-1}) − v t_{i-1} ≥ 0.
        let c = (acc - v * t_prev).max(0.0);
        let h = |s: f64| phi.value(s) * (v + c / s);
        best = best.max(h(t[i]));
        if c > 0.0 && t_prev > 0.0 && !phi.breakpoints_suffice() {
            best = best.max(interior_sup(&h, t_prev, t[i]));
        }
        acc += v * prof.measures[i];
        t_prev = t[i];
    }
    best
}

/// Sampled sup of h over (a, b], refined by golden section around the best sample.
pub(crate) fn interior_sup(h: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const SAMPLES: usize = 24;
    let (la, lb) = (a.ln(), b.ln());
    let xs: Vec<f64> = (0..=SAMPLES)
        .map(|k| (la + (lb - la) * k as f64 / SAMPLES as f64).exp())
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let (k, &best) = vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty samples");
    if k == 0 || k == SAMPLES {
        return best;
    }
    let (_, refined) = golden_max(h, xs[k - 1], xs[k + 1], MARCINKIEWICZ_REL_TOL);
    best.max(refined)
}

/// Luxemburg norm inf{λ > 0 : Σ M(v_i/λ) m_i ≤ 1} by bracketing and bisection.
pub fn orlicz(m: &OrliczFn, prof: &Profile) -> f64 {
    luxemburg(prof.max(), |lambda| {
        compensated_sum(
            prof.values
                .iter()
                .zip(&prof.measures)
                .map(|(&v, &w)| m.eval(v / lambda) * w),
        )
    })
}

/// Smallest λ with `modular(λ) ≤ 1` for a modular nonincreasing in λ; `scale` seeds the bracket.
pub(crate) fn luxemburg(scale: f64, modular: impl Fn(f64) -> f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let feasible = |l: f64| {
        let v = modular(l);
        v.is_finite() && v <= 1.0
    };
    let mut hi = scale;
    let mut tries = 0;
    while !feasible(hi) {
        hi *= 2.0;
        tries += 1;
        if tries > 2000 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi;
    while feasible(lo) {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return 0.0;
        }
    }
    for _ in 0..200 {
        if hi - lo <= ORLICZ_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// sup_t f*(t)·log^{−1/p}(e/t); the weight increases in t, so each run peaks at its right end.
pub fn explp_sup(p: f64, prof: &Profile) -> f64 {
    let t = prof.cumulative();
    prof.values
        .iter()
        .zip(&t)
        .map(|(&v, &ti)| v * (1.0 - ti.ln()).powf(-1.0 / p))
        .fold(0.0, f64::max)
}
