//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p rlab-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::Rng;
use serde_json::Value;

use rlab_core::counterexample::{bound_d, build_explicit, plan};
use rlab_core::dyadic::{hadamard_select, integer, rational, single_negative_select, to_f64};
use rlab_core::par::{map_range, stream_rng};
use rlab_core::rademacher::{
    block_head_l1, equivalence_constants, khintchine_check, project, projection_norm,
    theorem_predicates_with, Branch, PredicateOptions,
};
use rlab_core::rearrangement::equimeasurable;
use rlab_core::spaces::{contains_loghalf, dual_space, fundamental, norm};
use rlab_core::weighted::holder_check;
use rlab_core::{CoeffSeq, Rational, SpaceSpec, StepFunction, Weight};

type Outcome = Result<String, String>;

const SEED: u64 = 20_240_601;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(s: &str) -> SpaceSpec {
    SpaceSpec::parse(s).expect("fixed space descriptors parse")
}

/// Random step function on 2^level cells with values p/q, p ∈ [−20, 20], q ∈ [1, 6].
fn random_step(seed: u64, stream: u64, max_level: u32) -> StepFunction {
    let mut rng = stream_rng(seed, stream);
    let level = rng.random_range(1..=max_level);
    let values = (0..1usize << level)
        .map(|_| rational(rng.random_range(-20..=20), rng.random_range(1..=6)))
        .collect();
    StepFunction::new(level, values).expect("valid level")
}

fn khintchine_constants() -> Outcome {
    let vectors = map_range(500, |i| {
        let mut rng = stream_rng(SEED, i as u64);
        let n = 1 + i % 16;
        let mut a: Vec<Rational> = (0..n)
            .map(|_| rational(rng.random_range(-50..=50), rng.random_range(1..=9)))
            .collect();
        if a.iter().all(|x| *x == integer(0)) {
            a[0] = integer(1);
        }
        khintchine_check(&CoeffSeq::new(a).expect("finite")).map_err(|e| e.to_string())
    });
    let mut worst = f64::INFINITY;
    for (i, r) in vectors.into_iter().enumerate() {
        let r = r?;
        ensure(r.lower_ok && r.upper_ok, || {
            format!("vector {i} (n = {}) leaves the window", r.n)
        })?;
        worst = worst.min(r.l1 / r.l2);
    }
    let pair = khintchine_check(&CoeffSeq::from_ints(&[1, 1]).expect("finite"))
        .map_err(|e| e.to_string())?;
    ensure(pair.l1_exact == "1/1" && pair.lower_attained, || {
        format!("‖r1 + r2‖1 = {}", pair.l1_exact)
    })?;
    Ok(format!(
        "500 vectors inside [1/√2, 1], min ratio {worst:.6}; ‖r1 + r2‖1 = 1"
    ))
}

fn fundamental_identities() -> Outcome {
    let cases: [(&str, fn(f64) -> f64); 7] = [
        ("lp:1", |t| t),
        ("lp:3/2", |t| t.powf(2.0 / 3.0)),
        ("lp:2", f64::sqrt),
        ("lp:3", f64::cbrt),
        ("lorentz:sqrt", f64::sqrt),
        ("marcinkiewicz:sqrt", f64::sqrt),
        ("orlicz:pow:2", f64::sqrt),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (s, closed) in cases {
        let x = space(s);
        for j in 0..=12u32 {
            let t = 0.5f64.powi(j as i32);
            let chi = StepFunction::prefix_indicator(j, 1).map_err(|e| e.to_string())?;
            let want = closed(t);
            for got in [norm(&x, &chi), fundamental(&x, t)] {
                let got = got.map_err(|e| e.to_string())?;
                let rel = (got - want).abs() / want;
                ensure(rel <= 1e-9, || {
                    format!("{s} at t = 2^-{j}: {got} vs {want}")
                })?;
                worst = worst.max(rel);
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} evaluations, max relative error {worst:.2e}"
    ))
}

fn holder_battery() -> Outcome {
    let families = [
        "lp:1",
        "lp:3/2",
        "lp:2",
        "lp:3",
        "linf",
        "lorentz:sqrt",
        "marcinkiewicz:sqrt",
        "lorentz:logpow:0.5",
        "marcinkiewicz:logpow:0.5",
        "orlicz:pow:2",
    ];
    let mut tested = Vec::new();
    let mut worst: f64 = 0.0;
    for (fi, s) in families.iter().enumerate() {
        let x = space(s);
        if dual_space(&x).is_err() {
            continue;
        }
        let ratios = map_range(1000, |i| {
            let stream = (fi as u64) << 32 | (2 * i) as u64;
            let f = random_step(SEED ^ 3, stream, 7);
            let g = random_step(SEED ^ 3, stream + 1, 7);
            if f.is_zero() || g.is_zero() {
                return Ok(0.0);
            }
            holder_check(&x, &f, &g).map_err(|e| format!("{s}: {e}"))
        });
        for r in ratios {
            let r = r?;
            ensure(r <= 1.0 + 1e-9, || format!("{s}: ratio {r}"))?;
            worst = worst.max(r);
        }
        tested.push(*s);
    }
    ensure(tested.len() >= 9, || {
        format!("only {} families have duals", tested.len())
    })?;
    Ok(format!(
        "1000 pairs in each of {} families, max ratio {worst:.9}",
        tested.len()
    ))
}

fn projection_fixed_points() -> Outcome {
    for i in 0..200u64 {
        let f = random_step(SEED ^ 4, 2 * i, 8);
        let g = random_step(SEED ^ 4, 2 * i + 1, 8);
        let n = 1 + (i % 10) as u32;
        let pf = project(&f, n).map_err(|e| e.to_string())?;
        let pg = project(&g, n).map_err(|e| e.to_string())?;
        ensure(project(&pf, n).map_err(|e| e.to_string())? == pf, || {
            format!("P_{n} not idempotent on #{i}")
        })?;
        ensure(pf.inner(&g) == f.inner(&pg), || {
            format!("P_{n} not self-adjoint on #{i}")
        })?;
    }
    let l2 = SpaceSpec::lp(2.0);
    let mut seen = Vec::new();
    for n in [2u32, 4, 8, 16] {
        let r = projection_norm(&l2, &Weight::one(), n, 64, SEED).map_err(|e| e.to_string())?;
        ensure((r.lower - 1.0).abs() <= 1e-9, || {
            format!("‖P_{n}‖ on L2 = {}", r.lower)
        })?;
        seen.push(r.lower);
    }
    Ok(format!(
        "200 exact idempotence/self-adjointness checks; ‖P_n‖_L2 = {seen:?}"
    ))
}

fn block_inequalities() -> Outcome {
    let mut notes = Vec::new();
    for n in [4u32, 8, 16] {
        let two_n = Rational::from_integer(BigInt::from(1u8) << n as usize);
        let nn = integer(i64::from(n));
        let b_set = hadamard_select(n).map_err(|e| e.to_string())?;
        // head² ≤ n² 2^{−2n} ‖b‖₂², exactly.
        let heads = map_range(200, |i| {
            let mut rng = stream_rng(SEED ^ 5, u64::from(n) << 16 | i as u64);
            let b: Vec<Rational> = (0..n)
                .map(|_| rational(rng.random_range(-40..=40), rng.random_range(1..=7)))
                .collect();
            let l2sq = b.iter().fold(integer(0), |s, x| s + x * x);
            let head = block_head_l1(&b_set, &b);
            &head * &head * &two_n * &two_n <= &nn * &nn * l2sq
        });
        ensure(heads.iter().all(|&ok| ok), || {
            format!("n = {n}: head bound fails")
        })?;

        let d_set = single_negative_select(n).map_err(|e| e.to_string())?;
        let flat = vec![integer(1); n as usize];
        let head = block_head_l1(&d_set, &flat);
        // witness = head/‖flat‖₂ = (n^{1/2} − 2n^{−1/2})·n·2^{−n}, compared through squares.
        let witness_sq = &head * &head / &nn;
        let closed_sq =
            integer(i64::from(n) - 2) * integer(i64::from(n) - 2) * &nn / (&two_n * &two_n);
        ensure(witness_sq == closed_sq, || {
            format!("n = {n}: witness² {witness_sq} vs {closed_sq}")
        })?;
        let half_sq = &nn * &nn * &nn / (integer(4) * &two_n * &two_n);
        ensure(witness_sq >= half_sq, || {
            format!("n = {n}: witness below ½n^(3/2)2^-n")
        })?;
        let witness = to_f64(&head) / f64::from(n).sqrt();
        let bd = bound_d(&BigInt::from(n), &BigInt::from(0), 128).map_err(|e| e.to_string())?;
        ensure((witness - bd.to_f64()).abs() <= 1e-12 * witness, || {
            format!("n = {n}: witness {witness} vs bound_d {}", bd.to_f64())
        })?;
        if n == 4 {
            ensure(witness_sq == rational(1, 16), || {
                format!("witness at n = 4 is {witness}, not 0.25")
            })?;
        }
        notes.push(format!("n={n}: witness {witness:.6}"));
    }
    Ok(format!("600 exact head bounds; {}", notes.join(", ")))
}

fn rlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rlab"))
        .args(args)
        .output()
        .expect("the rlab binary runs")
}

fn record<'a>(report: &'a Value, name: &str) -> Option<&'a Value> {
    report["records"]
        .as_array()?
        .iter()
        .find(|r| r["name"] == name)
        .map(|r| &r["value"])
}

fn two_block_certificate() -> Outcome {
    let out = rlab(&["cex", "certify", "--m", "1,16", "--blocks", "2"]);
    ensure(out.status.code() == Some(0), || {
        format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(report["status"] == "OK", || {
        "report status is not OK".into()
    })?;
    ensure(
        record(&report, "verdict") == Some(&Value::from("PASS")),
        || "verdict is not PASS".into(),
    )?;
    let failed: Vec<_> = report["records"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|r| r["ok"] == false)
        .map(|r| r["name"].to_string())
        .collect();
    ensure(failed.is_empty(), || {
        format!("failed inequalities: {failed:?}")
    })?;
    let g = record(&report, "g_term[k=2]").cloned().unwrap_or_default();
    ensure(g == "2", || format!("g-term is {g}, not 2"))?;
    // α_2·bound_B = 2^{−3}·2^{1/2} = 2√2·65536^{−1/4}.
    let f = record(&report, "f_term[k=2]").cloned().unwrap_or_default();
    ensure(f == "1/8 * 2^(4/8)", || format!("f-term is {f}"))?;
    Ok(format!(
        "PASS certificate, f-term {} = 2√2·65536^(-1/4), g-term {}",
        f.as_str().unwrap_or(""),
        g.as_str().unwrap_or("")
    ))
}

fn explicit_build() -> Outcome {
    let p = plan(&[2, 3], false).map_err(|e| e.to_string())?;
    let b = build_explicit(&p, 2).map_err(|e| e.to_string())?;
    ensure(b.disjoint, || "blocks overlap".into())?;
    ensure(b.equimeasurable && equimeasurable(&b.f, &b.g), || {
        "f and g differ in distribution".into()
    })?;
    ensure(b.f != b.g, || "f and g coincide".into())?;
    Ok(format!(
        "m(B_k) = m(D_k) = {:?}, disjoint, equimeasurable",
        b.measures
    ))
}

fn theorem_trends() -> Outcome {
    let l2 = SpaceSpec::lp(2.0);
    let one = Weight::one();
    let opts = PredicateOptions {
        n: 8,
        budget: 200,
        seed: SEED,
    };
    let r = theorem_predicates_with(&l2, &one, &opts).map_err(|e| e.to_string())?;
    let branches = [
        ("w ∈ M(X)", r.w_in_mx),
        ("1/w ∈ M(X′)", r.inv_w_in_mx_dual),
        ("equivalence", r.equivalence),
        ("G ⊂ X(w)", r.g_in_weighted),
        ("projection", r.projection_bounded),
    ];
    for (name, b) in branches {
        ensure(b == Branch::Holds, || format!("L2: {name} is {b:?}"))?;
    }
    ensure(
        r.g_in_x.contained && r.g_in_dual.contained && r.admissibility.ok,
        || "L2: membership predicates fail".into(),
    )?;
    let mut ratios = Vec::new();
    for n in [4u32, 8, 16] {
        let e = equivalence_constants(&l2, &one, n, 64, SEED).map_err(|e| e.to_string())?;
        let ratio = e.c_high / e.c_low;
        ensure(ratio <= 2.0, || format!("n = {n}: c_high/c_low = {ratio}"))?;
        ratios.push(ratio);
    }
    let proxy = space("marcinkiewicz:const");
    ensure(
        !contains_loghalf(&proxy)
            .map_err(|e| e.to_string())?
            .contained,
        || "the L∞ proxy contains log^(1/2)".into(),
    )?;
    let p = theorem_predicates_with(&proxy, &one, &opts).map_err(|e| e.to_string())?;
    ensure(p.equivalence == Branch::Fails, || {
        format!("L∞ proxy: equivalence is {:?}", p.equivalence)
    })?;
    Ok(format!(
        "L2 predicates hold, c_high/c_low = {ratios:.3?}; L∞ proxy fails"
    ))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 6] = [
        &[
            "khintchine",
            "--seed",
            "7",
            "--trials",
            "64",
            "--n",
            "3,5,8",
        ],
        &[
            "equiv",
            "--space",
            "lorentz:sqrt",
            "--seed",
            "7",
            "--n",
            "4,8",
        ],
        &[
            "multiplicator",
            "--space",
            "lp:1",
            "--function",
            "cells:1,2,-1,3",
            "--n",
            "6",
            "--seed",
            "7",
        ],
        &[
            "projnorm", "--space", "lp:3/2", "--weight", "pow:0.25", "--seed", "7",
        ],
        &["theorems", "--space", "lp:2", "--seed", "7"],
        &[
            "theorems",
            "--space",
            "lorentz:sqrt",
            "--weight",
            "logpow:0.5",
            "--seed",
            "7",
            "--budget",
            "64",
        ],
    ];
    let mut compared = 0;
    for args in runs {
        for format in ["json", "csv"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            let a = rlab(&full);
            let b = rlab(&full);
            ensure(a.status.success() && b.status.success(), || {
                format!("{full:?} failed: {}", String::from_utf8_lossy(&a.stderr))
            })?;
            ensure(a.stdout == b.stdout, || {
                format!("{full:?} differs between runs")
            })?;
            compared += 1;
        }
    }
    Ok(format!("{compared} repeated runs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("Khintchine L1 constants", 10, khintchine_constants),
        ("fundamental-function identities", 5, fundamental_identities),
        ("Hölder pairing with the Köthe dual", 30, holder_battery),
        (
            "projection fixed points and L2 norm",
            10,
            projection_fixed_points,
        ),
        ("block inequalities at desk scale", 30, block_inequalities),
        (
            "certificate for m = (1, 16), two blocks",
            5,
            two_block_certificate,
        ),
        ("equimeasurability of the explicit build", 5, explicit_build),
        (
            "predicate trends for L2 and the L∞ proxy",
            60,
            theorem_trends,
        ),
        ("determinism of seeded reports", 60, determinism),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(limit) => {
                Err(format!("{msg}; over the {limit} s limit"))
            }
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!(
            "{tag} {}. {name} [{:.2} s]: {msg}",
            i + 1,
            took.as_secs_f64()
        );
        failures += usize::from(outcome.is_err());
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
