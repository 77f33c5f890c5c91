//! Dispatch from an [`ExperimentConfig`] to the library and assembly of the [`Report`].

use rand::Rng;
use serde_json::{json, Value};

use rlab_core::counterexample::{
    build_explicit, certify, plan, sym_integral_trend, CertVerdict, SymSource,
};
use rlab_core::dyadic::{format_rational, Rational};
use rlab_core::exact::decimal_digits;
use rlab_core::par::{map_range, stream_rng};
use rlab_core::rademacher::{
    equivalence_constants, khintchine_check, multiplicator_norm, projection_profile,
    theorem_predicates_with, Branch, KhintchineReport, Method, PredicateOptions, KHINTCHINE_MAX_N,
};
use rlab_core::rearrangement::{decreasing_rearrangement, distribution, equimeasurable};
use rlab_core::spaces::{
    delta2_check, dilation_indices, integer_exponent, norm, psi_from_phi, TrendCertificate,
};
use rlab_core::weighted::weighted_norm;
use rlab_core::{CoeffSeq, PhiFn, SpaceSpec, Weight};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::function::parse_function;
use crate::report::{num, nums, Provenance, Record, Report};

/// Relative tolerance stated for floating-point norm evaluations.
const NORM_TOL: f64 = 1e-9;

/// Runs one experiment. Deterministic given the config; the seed drives every random stream.
pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    config.validate()?;
    match &config.experiment {
        Experiment::Norm { function } => run_norm(config, function),
        Experiment::Rearrange { function, other } => {
            run_rearrange(config, function, other.as_deref())
        }
        Experiment::Khintchine { coeffs } => run_khintchine(config, coeffs.as_deref()),
        Experiment::Equiv => run_equiv(config),
        Experiment::Multiplicator { function, budget } => {
            run_multiplicator(config, function, *budget)
        }
        Experiment::Projnorm => run_projnorm(config),
        Experiment::Theorems { budget } => run_theorems(config, *budget),
        Experiment::CexPlan { m, strict } => run_cex_plan(config, m, *strict),
        Experiment::CexBuild { m, blocks } => run_cex_build(config, m, *blocks),
        Experiment::CexCertify { m, blocks } => run_cex_certify(config, m, *blocks),
        Experiment::Indices { phi } => run_indices(config, phi),
    }
}

fn space(config: &ExperimentConfig) -> CliResult<SpaceSpec> {
    let s = config
        .space
        .as_deref()
        .ok_or_else(|| CliError::Config("--space is required".into()))?;
    Ok(SpaceSpec::parse(s)?)
}

fn weight(config: &ExperimentConfig) -> CliResult<Weight> {
    match config.weight.as_deref() {
        None => Ok(Weight::one()),
        Some(s) => Ok(Weight::parse(s)?),
    }
}

/// Norms evaluated through exact rational sums before rounding.
fn norm_provenance(x: &SpaceSpec) -> Provenance {
    match x {
        SpaceSpec::Lp { p } if integer_exponent(*p).is_some() => Provenance::Exact,
        SpaceSpec::Linfty => Provenance::Exact,
        _ => Provenance::Quadrature,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(x)?)
}

fn run_norm(config: &ExperimentConfig, function: &str) -> CliResult<Report> {
    let x = space(config)?;
    let f = parse_function(function)?;
    let v = norm(&x, &f)?;
    let prov = norm_provenance(&x);
    let mut records = vec![Record::new("norm", num(v), prov, format!("‖f‖ in {x}")).tol(NORM_TOL)];
    let mut details = json!({ "space": x.to_string(), "function": f, "norm": num(v) });
    if config.weight.is_some() {
        let w = weight(config)?;
        let wv = weighted_norm(&x, &w, &f)?;
        records.push(
            Record::new(
                "weighted_norm",
                num(wv),
                prov,
                format!("‖f·w‖ in {x}, w = {w}"),
            )
            .tol(NORM_TOL),
        );
        details["weight"] = json!(w.to_string());
        details["weighted_norm"] = num(wv);
    }
    Ok(Report::new(config, records, details))
}

fn run_rearrange(
    config: &ExperimentConfig,
    function: &str,
    other: Option<&str>,
) -> CliResult<Report> {
    let f = parse_function(function)?;
    let star = decreasing_rearrangement(&f);
    let d = distribution(&f);
    let breakpoints: Vec<Value> = d
        .breakpoints()
        .iter()
        .map(|(t, m)| json!([format_rational(t), format_rational(m)]))
        .collect();
    let mut records = vec![
        Record::new(
            "support_measure",
            json!(format_rational(&f.support_measure())),
            Provenance::Exact,
            "m{f ≠ 0}",
        ),
        Record::new(
            "l1_norm",
            json!(format_rational(&f.abs().integral())),
            Provenance::Exact,
            "∫|f| = ∫f*",
        )
        .check(f.abs().integral() == star.integral()),
        Record::new(
            "self_equimeasurable",
            json!(equimeasurable(&f, &star)),
            Provenance::Exact,
            "f and f* are equimeasurable",
        )
        .check(equimeasurable(&f, &star)),
    ];
    let mut details = json!({ "function": f, "rearrangement": star, "distribution": breakpoints });
    if let Some(g) = other {
        let g = parse_function(g)?;
        let same = equimeasurable(&f, &g);
        records.push(Record::new(
            "equimeasurable",
            json!(same),
            Provenance::Exact,
            "f and g have the same distribution function",
        ));
        details["other"] = to_value(&g)?;
    }
    Ok(Report::new(config, records, details))
}

/// A nonzero rational vector of length n drawn from stream i.
fn random_coefficients(seed: u64, i: u64, n: usize) -> CoeffSeq {
    let mut rng = stream_rng(seed, i);
    let mut v: Vec<Rational> = (0..n)
        .map(|_| {
            let p: i64 = rng.random_range(-60..=60);
            let q: i64 = rng.random_range(1..=12);
            Rational::new(p.into(), q.into())
        })
        .collect();
    if v.iter().all(|x| *x == Rational::from_integer(0.into())) {
        v[0] = Rational::from_integer(1.into());
    }
    CoeffSeq::new(v).expect("coefficients are finite")
}

fn khintchine_records(reports: &[KhintchineReport]) -> Vec<Record> {
    let ratio = |r: &KhintchineReport| r.l1 / r.l2;
    let lo = reports.iter().map(ratio).fold(f64::INFINITY, f64::min);
    let hi = reports.iter().map(ratio).fold(0.0, f64::max);
    vec![
        Record::new(
            "vectors",
            json!(reports.len()),
            Provenance::Exact,
            "vectors enumerated",
        ),
        Record::new(
            "lower_bound",
            json!(reports.iter().filter(|r| r.lower_ok).count()),
            Provenance::Exact,
            "(1/√2)‖a‖₂ ≤ ‖Σ a_k r_k‖₁",
        )
        .tol(0.0)
        .check(reports.iter().all(|r| r.lower_ok)),
        Record::new(
            "upper_bound",
            json!(reports.iter().filter(|r| r.upper_ok).count()),
            Provenance::Exact,
            "‖Σ a_k r_k‖₁ ≤ ‖a‖₂",
        )
        .tol(0.0)
        .check(reports.iter().all(|r| r.upper_ok)),
        Record::new(
            "min_ratio",
            num(lo),
            Provenance::Exact,
            "min ‖S‖₁/‖a‖₂ ≥ 1/√2",
        ),
        Record::new("max_ratio", num(hi), Provenance::Exact, "max ‖S‖₁/‖a‖₂ ≤ 1"),
    ]
}

fn run_khintchine(config: &ExperimentConfig, coeffs: Option<&str>) -> CliResult<Report> {
    if let Some(c) = coeffs {
        let a = CoeffSeq::parse(c)?;
        let r = khintchine_check(&a)?;
        let mut records = khintchine_records(std::slice::from_ref(&r));
        records.push(Record::new(
            "l1_exact",
            json!(r.l1_exact),
            Provenance::Exact,
            "‖Σ a_k r_k‖₁",
        ));
        records.push(Record::new(
            "lower_attained",
            json!(r.lower_attained),
            Provenance::Exact,
            "‖Σ a_k r_k‖₁ = (1/√2)‖a‖₂",
        ));
        return Ok(Report::new(config, records, to_value(&r)?));
    }
    let ns = config.ranks(&(1..=16).collect::<Vec<_>>());
    if let Some(&n) = ns.iter().find(|&&n| n as usize > KHINTCHINE_MAX_N) {
        return Err(CliError::Config(format!(
            "exact enumeration supports n <= {KHINTCHINE_MAX_N}, got {n}"
        )));
    }
    let seed = config.seed();
    let reports = map_range(config.trials, |i| {
        let n = ns[i % ns.len()] as usize;
        khintchine_check(&random_coefficients(seed, i as u64, n))
    })
    .into_iter()
    .collect::<rlab_core::Result<Vec<_>>>()?;
    let pair = khintchine_check(&CoeffSeq::from_ints(&[1, 1])?)?;
    let mut records = khintchine_records(&reports);
    records.push(
        Record::new(
            "pair_attains_lower",
            json!(pair.l1_exact),
            Provenance::Exact,
            "‖r₁ + r₂‖₁ = 1 = (1/√2)·√2",
        )
        .check(pair.lower_attained),
    );
    let extreme = |better: fn(f64, f64) -> bool| {
        reports
            .iter()
            .fold(None::<&KhintchineReport>, |best, r| match best {
                Some(b) if !better(r.l1 / r.l2, b.l1 / b.l2) => Some(b),
                _ => Some(r),
            })
            .cloned()
    };
    let details = json!({
        "ranks": ns,
        "vectors": reports.len(),
        "closest_to_lower": to_value(&extreme(|a, b| a < b))?,
        "closest_to_upper": to_value(&extreme(|a, b| a > b))?,
        "pair": to_value(&pair)?,
    });
    Ok(Report::new(config, records, details))
}

fn run_equiv(config: &ExperimentConfig) -> CliResult<Report> {
    let x = space(config)?;
    let w = weight(config)?;
    let ns = config.ranks(&[4, 8, 16]);
    let mut records = Vec::new();
    let mut reports = Vec::new();
    let mut ratios = Vec::new();
    for &n in &ns {
        let r = equivalence_constants(&x, &w, n, config.trials, config.seed())?;
        records.push(Record::new(
            format!("c_low[n={n}]"),
            num(r.c_low),
            Provenance::OptimizerLower,
            "min ‖Σ a_k r_k‖_{X(w)} over unit test vectors",
        ));
        records.push(Record::new(
            format!("c_high[n={n}]"),
            num(r.c_high),
            Provenance::OptimizerLower,
            "max ‖Σ a_k r_k‖_{X(w)} over unit test vectors",
        ));
        ratios.push(r.c_high / r.c_low);
        reports.push(r);
    }
    let cert =
        TrendCertificate::from_values(ns.iter().map(|&n| f64::from(n)).collect(), ratios.clone());
    records.push(Record::new(
        "bracket_ratio",
        nums(&ratios),
        Provenance::Trend,
        "c_high/c_low across n stays bounded iff {r_k} ≍ ℓ₂ in X(w)",
    ));
    Ok(Report::new(
        config,
        records,
        json!({ "reports": to_value(&reports)?, "ratio_trend": to_value(&cert)? }),
    ))
}

fn method_provenance(m: Method) -> Provenance {
    match m {
        Method::Exact | Method::TailBound | Method::SupNorm => Provenance::Exact,
        Method::SymUpper => Provenance::Quadrature,
        Method::Witness | Method::Optimizer => Provenance::OptimizerLower,
        Method::None => Provenance::Trend,
    }
}

fn run_multiplicator(
    config: &ExperimentConfig,
    function: &str,
    budget: usize,
) -> CliResult<Report> {
    let x = space(config)?;
    let f = parse_function(function)?;
    let mut records = Vec::new();
    let mut brackets = Vec::new();
    for &n in &config.ranks(&[8]) {
        let b = multiplicator_norm(&x, &f, n, budget, config.seed())?;
        records.push(Record::new(
            format!("lower[n={n}]"),
            num(b.lower),
            method_provenance(b.lower_method),
            "‖f·S‖_X/‖S‖_X for an explicit Rademacher sum S",
        ));
        records.push(
            Record::new(
                format!("upper[n={n}]"),
                num(b.upper),
                method_provenance(b.upper_method),
                "bound for ‖f‖_{M(X)} over the whole Rademacher span",
            )
            .check(b.is_consistent()),
        );
        brackets.push(b);
    }
    Ok(Report::new(
        config,
        records,
        json!({ "space": x.to_string(), "brackets": to_value(&brackets)? }),
    ))
}

fn run_projnorm(config: &ExperimentConfig) -> CliResult<Report> {
    let x = space(config)?;
    let w = weight(config)?;
    let ns = config.ranks(&[2, 4, 8]);
    let profile = projection_profile(&x, &w, &ns, config.trials, config.seed())?;
    let mut records: Vec<Record> = profile
        .reports
        .iter()
        .map(|r| {
            Record::new(
                format!("lower[n={}]", r.n),
                num(r.lower),
                Provenance::OptimizerLower,
                "‖P_n f‖_{X(w)}/‖f‖_{X(w)} ≤ ‖P_n‖",
            )
        })
        .collect();
    records.push(Record::new(
        "trend",
        to_value(&profile.certificate.verdict)?,
        Provenance::Trend,
        "growth of the lower bounds across n",
    ));
    Ok(Report::new(config, records, to_value(&profile)?))
}

fn branch_value(b: Branch) -> Value {
    serde_json::to_value(b).expect("branches serialize")
}

fn run_theorems(config: &ExperimentConfig, budget: usize) -> CliResult<Report> {
    let x = space(config)?;
    let w = weight(config)?;
    let opts = PredicateOptions {
        n: config.ranks(&[8])[0],
        budget,
        seed: config.seed(),
    };
    let r = theorem_predicates_with(&x, &w, &opts)?;
    let records = vec![
        Record::new(
            "g_in_x",
            json!(r.g_in_x.contained),
            Provenance::Trend,
            "log^(1/2)(e/t) ∈ X",
        ),
        Record::new(
            "g_in_dual",
            json!(r.g_in_dual.contained),
            Provenance::Trend,
            "log^(1/2)(e/t) ∈ X′",
        ),
        Record::new(
            "admissible",
            json!(r.admissibility.ok),
            Provenance::Quadrature,
            "w ∈ X and 1/w ∈ X′",
        ),
        Record::new(
            "w_in_mx",
            branch_value(r.w_in_mx),
            Provenance::Trend,
            "w ∈ M(X)",
        ),
        Record::new(
            "inv_w_in_mx_dual",
            branch_value(r.inv_w_in_mx_dual),
            Provenance::Trend,
            "1/w ∈ M(X′)",
        ),
        Record::new(
            "equivalence",
            branch_value(r.equivalence),
            Provenance::Trend,
            "{r_k} ≍ unit vector basis of ℓ₂ in X(w) iff G ⊂ X and w ∈ M(X)",
        ),
        Record::new(
            "g_in_weighted",
            branch_value(r.g_in_weighted),
            Provenance::Trend,
            "G ⊂ X(w)",
        ),
        Record::new(
            "projection_bounded",
            branch_value(r.projection_bounded),
            Provenance::Trend,
            "P bounded on X(w) iff G ⊂ X ⊂ G′, w ∈ M(X) and 1/w ∈ M(X′)",
        ),
    ];
    Ok(Report::new(config, records, to_value(&r)?))
}

fn run_cex_plan(config: &ExperimentConfig, m: &[u64], strict: bool) -> CliResult<Report> {
    let p = plan(m, strict)?;
    let s = p.summary();
    let mut records = vec![
        Record::new("n", json!(s.n), Provenance::Exact, "n_k = 2^(m_k)"),
        Record::new(
            "prefix",
            json!(s.prefix),
            Provenance::Exact,
            "N_k = n_1 + ... + n_k",
        ),
        Record::new(
            "alpha",
            json!(s.alpha),
            Provenance::Exact,
            "α_k = 2^(n_k) n_k^(-5/4)",
        ),
    ];
    for (i, &ok) in s.condition.iter().enumerate() {
        records.push(
            Record::new(
                format!("condition[k={}]", i + 2),
                json!(ok),
                Provenance::Exact,
                "m_k ≥ 8 N_(k-1), i.e. n_k^(1/8) ≥ 2^(N_(k-1))",
            )
            .check(ok || !strict),
        );
    }
    Ok(Report::new(config, records, to_value(&s)?))
}

fn run_cex_build(config: &ExperimentConfig, m: &[u64], blocks: usize) -> CliResult<Report> {
    let p = plan(m, false)?;
    let b = build_explicit(&p, blocks)?;
    let sym = sym_integral_trend(SymSource::Step(&b.f))?;
    let records = vec![
        Record::new(
            "measures",
            json!(b.measures),
            Provenance::Exact,
            "m(B_k) = m(D_k) = n_k 2^(-N_k)",
        ),
        Record::new(
            "heights",
            json!(b.heights),
            Provenance::Exact,
            "α_k rounded to a double",
        ),
        Record::new(
            "disjoint",
            json!(b.disjoint),
            Provenance::Exact,
            "the B_k and the D_k are disjoint",
        )
        .check(b.disjoint),
        Record::new(
            "equimeasurable",
            json!(b.equimeasurable),
            Provenance::Exact,
            "f = Σ α_k χ_(B_k) and g = Σ α_k χ_(D_k) are equimeasurable",
        )
        .check(b.equimeasurable),
        Record::new(
            "sym_partial_sums",
            nums(&sym.partial_sums),
            Provenance::Trend,
            "partial sums of ∫ f* log^(1/2)(e/t) dt",
        ),
    ];
    let details = json!({
        "plan": to_value(&p.summary())?,
        "build": to_value(&b)?,
        "sym_integral": to_value(&sym)?,
    });
    Ok(Report::new(config, records, details))
}

fn run_cex_certify(config: &ExperimentConfig, m: &[u64], blocks: usize) -> CliResult<Report> {
    let p = plan(m, true)?;
    let c = certify(&p, blocks, config.precision)?;
    let tol = 10f64.powi(1 - decimal_digits(config.precision) as i32);
    let mut records: Vec<Record> = c
        .inequalities
        .iter()
        .map(|i| {
            Record::new(
                i.label.clone(),
                json!([i.lhs_decimal, i.rhs_decimal]),
                Provenance::Exact,
                format!("{} {} {}", i.lhs, i.relation, i.rhs),
            )
            .tol(tol)
            .check(i.holds)
        })
        .collect();
    for (k, g) in c.g_terms.iter().enumerate() {
        if let Some(g) = g {
            records.push(Record::new(
                format!("g_term[k={}]", k + 1),
                json!(g),
                Provenance::Exact,
                "α_k·½ n_k^(3/2) 2^(-N_k) = ½ n_k^(1/4) 2^(-N_(k-1))",
            ));
        }
    }
    for (k, t) in c.f_terms.iter().enumerate() {
        records.push(Record::new(
            format!("f_term[k={}]", k + 1),
            json!(t),
            Provenance::Exact,
            "α_k·bound_B(n_k, N_(k-1))",
        ));
    }
    let last = c.f_partial_sums.last().expect("certificates have a block");
    records.push(
        Record::new(
            "f_partial_sum",
            json!([last.lo, last.hi]),
            Provenance::Exact,
            "enclosure of Σ_k α_k bound_B",
        )
        .tol(tol),
    );
    records.push(
        Record::new(
            "f_majorant",
            json!([c.f_majorant.lo, c.f_majorant.hi]),
            Provenance::Exact,
            "2√2·2^(-m_1/4)/(1 - 2^(-1/4))",
        )
        .tol(tol),
    );
    let pass = c.verdict == CertVerdict::Pass;
    records.push(
        Record::new(
            "verdict",
            to_value(&c.verdict)?,
            Provenance::Exact,
            "every inequality of the certificate holds",
        )
        .check(pass),
    );
    let report = Report::new(config, records, to_value(&c)?);
    Ok(if pass { report } else { report.fail() })
}

fn run_indices(config: &ExperimentConfig, phi: &str) -> CliResult<Report> {
    let phi = PhiFn::parse(phi)?;
    let ind = dilation_indices(&phi)?;
    let d2 = delta2_check(&phi)?;
    let mut records = vec![
        Record::new(
            "gamma",
            num(ind.gamma),
            Provenance::Quadrature,
            "lower dilation index γ_φ",
        )
        .tol(1e-3),
        Record::new(
            "delta",
            num(ind.delta),
            Provenance::Quadrature,
            "upper dilation index δ_φ",
        )
        .tol(1e-3),
        Record::new(
            "delta2",
            json!(d2.holds),
            Provenance::Trend,
            "φ(t) ≤ C φ(t²) near 0",
        ),
        Record::new(
            "delta2_constant",
            num(d2.c),
            Provenance::Trend,
            "observed sup φ(t)/φ(t²)",
        ),
    ];
    let mut details =
        json!({ "phi": phi.to_string(), "indices": to_value(&ind)?, "delta2": to_value(&d2)? });
    match psi_from_phi(&phi) {
        Ok(psi) => {
            let pi = dilation_indices(&psi)?;
            records.push(Record::new(
                "psi",
                json!(psi.to_string()),
                Provenance::Quadrature,
                "ψ(t) = ∫₀^t φ′ log^(1/2)(e/s) ds",
            ));
            records.push(
                Record::new("psi_gamma", num(pi.gamma), Provenance::Quadrature, "γ_ψ").tol(1e-3),
            );
            records.push(
                Record::new("psi_delta", num(pi.delta), Provenance::Quadrature, "δ_ψ").tol(1e-3),
            );
            details["psi"] = json!(psi.to_string());
            details["psi_indices"] = to_value(&pi)?;
        }
        Err(e) => details["psi_error"] = json!(e.to_string()),
    }
    Ok(Report::new(config, records, details))
}
