//! Finite-truncation readings of the equivalence and projection criteria for X(w).
//!
//! Each hypothesis is replaced by a computable proxy:
//! - G ⊂ X by log^{1/2}(e/t) ∈ X, and X ⊂ G′ by log^{1/2}(e/t) ∈ X′;
//! - w ∈ Sym(X) by ‖w*·log^{1/2}(e/t)‖_X < ∞;
//! - w ∈ M(X) by a multiplicator bracket, settled by Sym(X) ⊂ M(X), by M = Sym for Lorentz and
//!   Marcinkiewicz spaces with φ ∈ Δ², and by M(Exp L^p) = Exp L^q, q = 2p/(2−p), for p ≤ 2.
//!
//! Divergence of a closed-form weight is judged from its samples on increasing levels.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spaces::{
    contains_loghalf, delta2_check, dual_space, norm, sym_kernel_trend, LogHalfMembership,
    SpaceSpec, TrendCertificate,
};
use crate::weighted::{admissible, level_trend, Admissibility, Weight};

use super::multiplicator::{multiplicator_norm, Method, NormBracket};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Holds,
    Fails,
    Undetermined,
}

impl Branch {
    fn and(self, other: Branch) -> Branch {
        match (self, other) {
            (Branch::Fails, _) | (_, Branch::Fails) => Branch::Fails,
            (Branch::Holds, Branch::Holds) => Branch::Holds,
            _ => Branch::Undetermined,
        }
    }

    fn from_bool(b: bool) -> Branch {
        if b {
            Branch::Holds
        } else {
            Branch::Fails
        }
    }
}

/// A norm of a weight tracked across sampling levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipTrend {
    pub space: String,
    pub value: f64,
    pub certificate: Option<TrendCertificate>,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateOptions {
    /// Rademacher rank for the multiplicator brackets.
    pub n: u32,
    pub budget: usize,
    pub seed: u64,
}

impl Default for PredicateOptions {
    fn default() -> Self {
        Self {
            n: 8,
            budget: 2048,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub space: String,
    pub weight: String,
    pub dual: String,
    /// log^{1/2}(e/t) ∈ X, standing in for G ⊂ X.
    pub g_in_x: LogHalfMembership,
    /// log^{1/2}(e/t) ∈ X′, standing in for X ⊂ G′.
    pub g_in_dual: LogHalfMembership,
    pub admissibility: Admissibility,
    /// ‖w*·log^{1/2}(e/t)‖_X, standing in for w ∈ Sym(X).
    pub w_sym: MembershipTrend,
    /// ‖(1/w)*·log^{1/2}(e/t)‖_{X′}.
    pub inv_w_sym_dual: MembershipTrend,
    pub w_multiplicator: NormBracket,
    pub inv_w_multiplicator_dual: NormBracket,
    /// For X = Exp L^p with p ≤ 2: w ∈ Exp L^q, q = 2p/(2−p) (L_∞ when p = 2).
    pub explp_membership: Option<MembershipTrend>,
    pub w_in_mx: Branch,
    pub inv_w_in_mx_dual: Branch,
    /// {r_k} ≍ unit vector basis of ℓ₂ in X(w).
    pub equivalence: Branch,
    /// G ⊂ X(w).
    pub g_in_weighted: Branch,
    /// Boundedness of P_w on X(w), equivalently of P on X(w) with the dual pairing.
    pub projection_bounded: Branch,
    pub notes: Vec<String>,
}

fn sym_trend(x: &SpaceSpec, w: &Weight, inverse: bool) -> Result<MembershipTrend> {
    let mut diverged = false;
    let (value, certificate) = level_trend(w, |wl| {
        let f = if inverse {
            wl.reciprocal()
        } else {
            wl.function()
        };
        let k = sym_kernel_trend(x, f)?;
        diverged |= k.is_diverging();
        Ok(k.value)
    })?;
    let member = !diverged && !certificate.as_ref().is_some_and(|c| c.is_diverging());
    Ok(MembershipTrend {
        space: x.to_string(),
        value,
        certificate,
        member,
    })
}

/// Exponent q = 2p/(2−p) with q = ∞ for p = 2; `None` for p > 2.
pub fn explp_multiplier_exponent(p: f64) -> Option<f64> {
    if p < 2.0 {
        Some(2.0 * p / (2.0 - p))
    } else if p == 2.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

fn explq_membership(q: f64, w: &Weight) -> Result<MembershipTrend> {
    let y = if q.is_infinite() {
        SpaceSpec::Linfty
    } else {
        SpaceSpec::ExpLp { p: q }
    };
    let (value, certificate) = level_trend(w, |wl| norm(&y, wl.function()))?;
    Ok(MembershipTrend {
        space: y.to_string(),
        member: value.is_finite() && !certificate.as_ref().is_some_and(|c| c.is_diverging()),
        value,
        certificate,
    })
}

/// w ∈ M(X) from the available evidence.
fn multiplier_branch(
    x: &SpaceSpec,
    g_in_x: bool,
    sym: &MembershipTrend,
    bracket: &NormBracket,
    sampled: bool,
    explq: Option<&MembershipTrend>,
    notes: &mut Vec<String>,
) -> Result<Branch> {
    if let (SpaceSpec::ExpLp { .. }, Some(m)) = (x, explq) {
        return Ok(Branch::from_bool(m.member));
    }
    if sym.member {
        return Ok(Branch::Holds);
    }
    // A bracket of one sample says nothing about the limit weight.
    let rigorous = !sampled
        && matches!(
            bracket.upper_method,
            Method::Exact | Method::SymUpper | Method::TailBound | Method::SupNorm
        )
        && bracket.upper.is_finite();
    if rigorous {
        return Ok(Branch::Holds);
    }
    if let SpaceSpec::Lorentz { phi } | SpaceSpec::Marcinkiewicz { phi } = x {
        if g_in_x && delta2_check(phi)?.holds {
            notes.push(format!("{x}: φ ∈ Δ², so M(X) = Sym(X)"));
            return Ok(Branch::Fails);
        }
    }
    Ok(Branch::Undetermined)
}

/// [`theorem_predicates_with`] at the default options.
pub fn theorem_predicates(x: &SpaceSpec, w: &Weight) -> Result<PredicateReport> {
    theorem_predicates_with(x, w, &PredicateOptions::default())
}

pub fn theorem_predicates_with(
    x: &SpaceSpec,
    w: &Weight,
    opts: &PredicateOptions,
) -> Result<PredicateReport> {
    x.validate()?;
    let dual = dual_space(x)?;
    let g_in_x = contains_loghalf(x)?;
    let g_in_dual = contains_loghalf(&dual)?;
    let admissibility = admissible(x, w)?;
    let w_sym = sym_trend(x, w, false)?;
    let inv_w_sym_dual = sym_trend(&dual, w, true)?;
    let w_multiplicator = multiplicator_norm(x, w.function(), opts.n, opts.budget, opts.seed)?;
    let inv_w_multiplicator_dual =
        multiplicator_norm(&dual, w.reciprocal(), opts.n, opts.budget, opts.seed)?;
    let explp_membership = match x {
        SpaceSpec::ExpLp { p } => explp_multiplier_exponent(*p)
            .map(|q| explq_membership(q, w))
            .transpose()?,
        _ => None,
    };
    let mut notes = vec![
        "G ⊂ X is read as log^(1/2)(e/t) ∈ X; w ∈ Sym(X) as ‖w*·log^(1/2)(e/t)‖_X < ∞".to_string(),
    ];
    let w_in_mx = multiplier_branch(
        x,
        g_in_x.contained,
        &w_sym,
        &w_multiplicator,
        w.sample_level().is_some(),
        explp_membership.as_ref(),
        &mut notes,
    )?;
    let inv_w_in_mx_dual = multiplier_branch(
        &dual,
        g_in_dual.contained,
        &inv_w_sym_dual,
        &inv_w_multiplicator_dual,
        w.sample_level().is_some(),
        None,
        &mut notes,
    )?;
    let admissible_branch = Branch::from_bool(admissibility.ok);
    let equivalence = if !g_in_x.contained {
        notes.push("log^(1/2)(e/t) ∉ X: the equivalence fails already for w ≡ 1".into());
        Branch::Fails
    } else {
        admissible_branch.and(w_in_mx)
    };
    let g_in_weighted = if !g_in_x.contained {
        Branch::Fails
    } else {
        Branch::from_bool(w_sym.member)
    };
    let projection_bounded = if !g_in_x.contained || !g_in_dual.contained {
        notes.push("G ⊂ X ⊂ G′ fails: P is unbounded".into());
        Branch::Fails
    } else {
        let sufficient = w_sym.member && inv_w_sym_dual.member;
        if sufficient {
            notes.push("w*ℓ ∈ X and (1/w)*ℓ ∈ X′ suffice for boundedness".into());
        }
        admissible_branch.and(if sufficient {
            Branch::Holds
        } else {
            w_in_mx.and(inv_w_in_mx_dual)
        })
    };
    Ok(PredicateReport {
        space: x.to_string(),
        weight: w.to_string(),
        dual: dual.to_string(),
        g_in_x,
        g_in_dual,
        admissibility,
        w_sym,
        inv_w_sym_dual,
        w_multiplicator,
        inv_w_multiplicator_dual,
        explp_membership,
        w_in_mx,
        inv_w_in_mx_dual,
        equivalence,
        g_in_weighted,
        projection_bounded,
        notes,
    })
}
