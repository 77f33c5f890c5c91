//! Quadrature, one-dimensional maximization and the log^{1/2}(e/t) integrals.
//!
//! ℓ(t) = log^{1/2}(e/t) = (1 + ln(1/t))^{1/2}. With x = 1 + ln(1/t) its integrals have closed
//! forms through the complementary error function and the upper incomplete gamma function:
//!
//! * ∫₀^t ℓ(s) ds = t√x + (e√π/2)·erfc(√x)
//! * ∫₀^t ℓ(s)^p ds = e·Γ(1 + p/2, x)

use libm::erfc;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const MAX_EVALS: usize = 2_000_000;

/// Adaptive Simpson quadrature of `f` over [a, b] to `rel_tol` relative (with `abs_tol` floor).
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (a, b, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Seed with a coarse pass so the relative target is meaningful.
    let mut stack = vec![(a, b, fa, fm, fb, whole, 0u32)];
    let mut coarse = 0.0;
    let mut evals = 3usize;
    {
        let n = 16;
        let h = (b - a) / n as f64;
        for i in 0..n {
            let x = a + h * (i as f64 + 0.5);
            coarse += f(x).abs() * h;
        }
        evals += n;
    }
    let target = (rel_tol * coarse).max(abs_tol);
    let total_len = b - a;
    let mut sum = 0.0;
    let mut comp = 0.0;
    while let Some((l, r, fl, fmid, fr, s, depth)) = stack.pop() {
        let m = 0.5 * (l + r);
        let lm = 0.5 * (l + m);
        let rm = 0.5 * (m + r);
        let flm = f(lm);
        let frm = f(rm);
        evals += 2;
        let left = (m - l) / 6.0 * (fl + 4.0 * flm + fmid);
        let right = (r - m) / 6.0 * (fmid + 4.0 * frm + fr);
        let delta = left + right - s;
        let local_tol = target * (r - l) / total_len;
        if !delta.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "non-finite integrand on [{l}, {r}]"
            )));
        }
        if delta.abs() <= 15.0 * local_tol || depth >= 60 {
            let piece = left + right + delta / 15.0;
            // Kahan summation keeps many tiny pieces accurate.
            let y = piece - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        } else {
            if evals > MAX_EVALS {
                return Err(Error::QuadratureFailure(format!(
                    "no convergence on [{a}, {b}] within {MAX_EVALS} evaluations"
                )));
            }
            stack.push((l, m, fl, flm, fmid, left, depth + 1));
            stack.push((m, r, fmid, frm, fr, right, depth + 1));
        }
    }
    Ok(sign * sum)
}

/// ∫_a^∞ f by doubling the upper limit until the last piece is negligible.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    first_width: f64,
    rel_tol: f64,
    max_doublings: u32,
) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = a;
    let mut width = first_width;
    for _ in 0..max_doublings {
        let piece = integrate(&f, lo, lo + width, rel_tol * 0.1, 0.0)?;
        total += piece;
        if piece.abs() <= rel_tol * 1e-2 * total.abs() || (piece == 0.0 && total == 0.0) {
            return Ok(total);
        }
        lo += width;
        width *= 2.0;
    }
    Err(Error::QuadratureFailure(format!(
        "tail integral from {a} did not settle after {max_doublings} doublings"
    )))
}

/// Golden-section search for a maximum of a unimodal `f` on [a, b]; returns (argmax, max).
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// ℓ(t) = (1 + ln(1/t))^{1/2}.
pub fn loghalf(t: f64) -> f64 {
    (1.0 - t.ln()).sqrt()
}

/// ℓ at t = e^{-u}.
pub fn loghalf_at(u: f64) -> f64 {
    (1.0 + u).sqrt()
}

/// e^x·erfc(√x), switching to the asymptotic series where erfc underflows.
fn scaled_erfc_sqrt(x: f64) -> f64 {
    if x < 50.0 {
        x.exp() * erfc(x.sqrt())
    } else {
        let inv = 1.0 / x;
        let series = 1.0 - 0.5 * inv + 0.75 * inv * inv - 1.875 * inv.powi(3)
            + 6.5625 * inv.powi(4)
            - 29.531_25 * inv.powi(5);
        series / (SQRT_PI * x.sqrt())
    }
}

/// L(x) = ∫₀^t ℓ / t at x = 1 + ln(1/t), i.e. the average of ℓ over [0, t].
pub fn loghalf_mean_at(x: f64) -> f64 {
    x.sqrt() + 0.5 * SQRT_PI * scaled_erfc_sqrt(x)
}

/// ∫₀^t ℓ(s) ds.
pub fn loghalf_integral(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    t * loghalf_mean_at(1.0 - t.ln())
}

/// ∫_a^b ℓ(s) ds for 0 ≤ a ≤ b ≤ 1.
pub fn loghalf_window(a: f64, b: f64) -> f64 {
    loghalf_pow_window(1.0, a, b)
}

/// ∫₀^t ℓ(s)^p ds = e·Γ(1 + p/2, 1 + ln(1/t)).
pub fn loghalf_pow_integral(p: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return loghalf_integral(t);
    }
    let a = 1.0 + 0.5 * p;
    let x = 1.0 - t.ln();
    if x < 100.0 {
        std::f64::consts::E * gamma(a) * gamma_ur(a, x)
    } else {
        // Γ(a, x) ~ x^{a-1} e^{-x} Σ_k (a-1)(a-2)...(a-k)/x^k, and e·e^{-x} = t.
        let mut term = 1.0;
        let mut series = 1.0;
        for k in 1..=12 {
            term *= (a - k as f64) / x;
            series += term;
        }
        t * x.powf(a - 1.0) * series
    }
}

/// ∫_a^b ℓ(s)^p ds for 0 ≤ a ≤ b ≤ 1.
pub fn loghalf_pow_window(p: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a <= 0.0 {
        return loghalf_pow_integral(p, b);
    }
    if b - a <= 0.5 * b {
        let h = 0.5 * p;
        integrate(|s| (1.0 - s.ln()).powf(h), a, b, 1e-13, 0.0)
            .expect("smooth integrand on a window away from zero")
    } else {
        loghalf_pow_integral(p, b) - loghalf_pow_integral(p, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!(close(v, 4.0, 1e-12));
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12, 0.0).unwrap();
        assert!(close(v, 2.0, 1e-11));
        let v = integrate(|x| x.exp(), 1.0, 0.0, 1e-12, 0.0).unwrap();
        assert!(close(v, -(std::f64::consts::E - 1.0), 1e-11));
    }

    #[test]
    fn tail_integration() {
        let v = integrate_to_infinity(|u| (-u).exp(), 0.0, 1.0, 1e-10, 60).unwrap();
        assert!(close(v, 1.0, 1e-9));
        assert!(integrate_to_infinity(|u| 1.0 / (1.0 + u), 0.0, 1.0, 1e-10, 20).is_err());
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(close(fx, 2.0, 1e-12));
    }

    #[test]
    fn loghalf_integral_matches_quadrature() {
        // Oracle: substitute s = e^{-v}, ∫₀^t ℓ = ∫_{ln(1/t)}^∞ (1+v)^{1/2} e^{-v} dv.
        for &t in &[1.0, 0.5, 0.25, 1e-3, 1e-9, 1e-30] {
            let u0: f64 = -f64::ln(t);
            let oracle =
                integrate_to_infinity(|v| (1.0 + v).sqrt() * (-v).exp(), u0, 1.0, 1e-12, 80)
                    .unwrap();
            assert!(close(loghalf_integral(t), oracle, 1e-9), "t = {t}");
        }
        assert!(close(loghalf_integral(1.0), 1.378_936_078_070_656, 1e-12));
    }

    #[test]
    fn asymptotic_branch_is_continuous() {
        let below = 49.999_999;
        let above = 50.000_001;
        assert!(close(
            scaled_erfc_sqrt(below),
            scaled_erfc_sqrt(above),
            1e-6
        ));
    }

    #[test]
    fn pow_integrals_match_quadrature() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            for &t in &[1.0, 0.3, 1e-4, 1e-60] {
                let u0: f64 = -f64::ln(t);
                let oracle = integrate_to_infinity(
                    |v| (1.0 + v).powf(0.5 * p) * (-v).exp(),
                    u0,
                    1.0,
                    1e-12,
                    80,
                )
                .unwrap();
                assert!(
                    close(loghalf_pow_integral(p, t), oracle, 1e-9),
                    "p = {p}, t = {t}"
                );
            }
        }
        // ∫₀¹ (1 + ln(1/s)) ds = 2.
        assert!(close(loghalf_pow_integral(2.0, 1.0), 2.0, 1e-12));
    }

    #[test]
    fn windows_add_up() {
        let whole = loghalf_window(0.0, 1.0);
        let parts =
            loghalf_window(0.0, 0.25) + loghalf_window(0.25, 0.3) + loghalf_window(0.3, 1.0);
        assert!(close(parts, whole, 1e-12));
    }
}
