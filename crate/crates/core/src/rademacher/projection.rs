//! Lower bounds for ‖P_n‖ on X(w) from test functions.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dyadic::{check_level, sum_cells_f64};
use crate::error::Result;
use crate::par::{map_range, stream_rng};
use crate::spaces::{norm_cells, SpaceSpec, TrendCertificate};
use crate::weighted::Weight;

use super::{project_cells_f64, refine_f64};

/// Extra levels below rank n on which test functions live.
const TEST_DEPTH: u32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub space: String,
    pub weight: String,
    pub n: u32,
    pub trials: usize,
    pub seed: u64,
    /// max ‖P_n f‖_{X(w)} / ‖f‖_{X(w)} over the test functions.
    pub lower: f64,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionProfile {
    pub reports: Vec<ProjectionReport>,
    pub certificate: TrendCertificate,
}

fn structured_tests(n: u32, level: u32) -> Vec<(String, Vec<f64>)> {
    let cells = 1usize << level;
    let mut out = Vec::new();
    // r_1 is fixed by P_n.
    out.push((
        "r_1".into(),
        (0..cells)
            .map(|j| if j < cells / 2 { 1.0 } else { -1.0 })
            .collect(),
    ));
    // 2^n χ_{[0, 2^{-n}]} has c_k = 1 for every k ≤ n.
    let spike = cells >> n;
    out.push((
        "spike".into(),
        (0..cells)
            .map(|j| if j < spike { 1.0 } else { 0.0 })
            .collect(),
    ));
    let s = refine_f64(&sum_cells_f64(&vec![1.0; n as usize]), n, level);
    out.push((
        "sign-sum".into(),
        s.iter()
            .map(|v| v.signum() * (*v != 0.0) as i32 as f64)
            .collect(),
    ));
    for j in 1..=n.min(level) {
        let len = cells >> j;
        out.push((
            format!("prefix:{j}"),
            (0..cells)
                .map(|i| if i < len { 1.0 } else { 0.0 })
                .collect(),
        ));
    }
    out
}

fn random_test(seed: u64, i: u64, cells: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, i);
    if i % 2 == 0 {
        (0..cells)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect()
    } else {
        let density: f64 = rng.random_range(0.01..0.5);
        (0..cells)
            .map(|_| {
                if rng.random_bool(density) {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// A certified lower bound on ‖P_n‖_{X(w)→X(w)}.
pub fn projection_norm(
    x: &SpaceSpec,
    w: &Weight,
    n: u32,
    trials: usize,
    seed: u64,
) -> Result<ProjectionReport> {
    x.validate()?;
    let wl = w.function().level();
    let level = (n + TEST_DEPTH).max(wl);
    check_level(level)?;
    let wc = (!w.is_one()).then(|| w.function().cells_f64(level));
    let inv = (!w.is_one()).then(|| w.reciprocal().cells_f64(level));
    let mut tests = structured_tests(n, level);
    if let Some(inv) = &inv {
        // Also test g/w, so that the weighted function is the structured one.
        let extra: Vec<(String, Vec<f64>)> = tests
            .iter()
            .map(|(name, f)| {
                (
                    format!("{name}/w"),
                    f.iter().zip(inv).map(|(a, b)| a * b).collect(),
                )
            })
            .collect();
        tests.extend(extra);
    }
    let cells = 1usize << level;
    let randoms = map_range(trials, |i| random_test(seed, i as u64, cells));
    tests.extend(
        randoms
            .into_iter()
            .enumerate()
            .map(|(i, f)| (format!("random:{i}"), f)),
    );
    let weighted = |f: &[f64]| -> f64 {
        match &wc {
            None => norm_cells(x, f),
            Some(w) => norm_cells(x, &f.iter().zip(w).map(|(a, b)| a * b).collect::<Vec<_>>()),
        }
    };
    let ratios = map_range(tests.len(), |i| {
        let f = &tests[i].1;
        let den = weighted(f);
        if !(den > 0.0) {
            return f64::NEG_INFINITY;
        }
        weighted(&project_cells_f64(f, level, n)) / den
    });
    let (best, &lower) = ratios
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tests");
    Ok(ProjectionReport {
        space: x.to_string(),
        weight: w.to_string(),
        n,
        trials,
        seed,
        lower,
        witness: tests[best].0.clone(),
    })
}

/// [`projection_norm`] across `ns` with a growth certificate.
pub fn projection_profile(
    x: &SpaceSpec,
    w: &Weight,
    ns: &[u32],
    trials: usize,
    seed: u64,
) -> Result<ProjectionProfile> {
    let reports = ns
        .iter()
        .map(|&n| projection_norm(x, w, n, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let certificate = TrendCertificate::from_values(
        ns.iter().map(|&n| f64::from(n)).collect(),
        reports.iter().map(|r| r.lower).collect(),
    );
    Ok(ProjectionProfile {
        reports,
        certificate,
    })
}
