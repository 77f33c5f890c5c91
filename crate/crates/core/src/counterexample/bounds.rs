//! Closed-form bound chains for the blocks, evaluated in exact monomial arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Rational;
use crate::error::{Error, Result};
use crate::exact::{decimal, Enclosure, EnclosureRepr, Monomial, Rounding};
use crate::par::map_range;

use super::{render_int, CounterexamplePlan, PlanSummary};

/// One checked inequality `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: String,
    /// `<=`, `>=` or `==`.
    pub relation: String,
    pub rhs: String,
    pub lhs_decimal: String,
    pub rhs_decimal: String,
    pub holds: bool,
}

fn digits_for(precision: u32) -> usize {
    crate::exact::decimal_digits(precision)
}

fn inequality(
    label: impl Into<String>,
    lhs: &Monomial,
    relation: &str,
    rhs: &Monomial,
    precision: u32,
) -> Inequality {
    let ord = lhs.cmp_exact(rhs);
    let holds = match relation {
        "<=" => ord != Ordering::Greater,
        ">=" => ord != Ordering::Less,
        "==" => ord == Ordering::Equal,
        _ => unreachable!("unknown relation {relation}"),
    };
    let digits = digits_for(precision);
    Inequality {
        label: label.into(),
        lhs: lhs.symbolic(),
        relation: relation.into(),
        rhs: rhs.symbolic(),
        lhs_decimal: lhs.to_decimal(digits, precision),
        rhs_decimal: rhs.to_decimal(digits, precision),
        holds,
    }
}

/// A closed-form bound for a single block with the inequalities it rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockBound {
    pub n: String,
    pub prefix: String,
    /// Exact symbolic value.
    pub value: String,
    pub decimal: String,
    pub chain: Vec<Inequality>,
    #[serde(skip)]
    pub monomial: Option<Monomial>,
}

impl BlockBound {
    pub fn holds(&self) -> bool {
        self.chain.iter().all(|i| i.holds)
    }

    pub fn to_f64(&self) -> f64 {
        self.monomial.as_ref().map_or(f64::NAN, Monomial::to_f64)
    }
}

fn log2_exact(n: &BigInt) -> Result<u64> {
    let m = n.bits().saturating_sub(1);
    if n.bits() == 0 || *n != BigInt::one() << m as usize {
        return Err(Error::NotPowerOfTwo(n.to_u64().unwrap_or(u64::MAX)));
    }
    Ok(m)
}

fn int(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

/// Upper bound for ‖χ_B‖_{M(L₁)}, B the Hadamard block of n = 2^m Rademachers following a
/// prefix of N: the head term is at most (⌈√N⌉ + 1)·n·2^{−(N+n)}‖b‖₂ (just n·2^{−n}‖b‖₂ when
/// N = 0), the tail term at most (N + n)·2^{−(N+n)}‖b‖₂; both are ≤ n·2^{−n}‖b‖₂, and the
/// Khintchine factor √2 gives 2√2·n·2^{−n}.
pub fn bound_b(n: &BigInt, prefix: &BigInt, precision: u32) -> Result<BlockBound> {
    log2_exact(n)?;
    let total = prefix + n;
    let target = Monomial::new(int(n), -(n * 8u32));
    let mut chain = Vec::new();
    if !prefix.is_zero() {
        let s = prefix.sqrt();
        let ceil = if &s * &s == *prefix { s } else { s + 1 };
        let head = Monomial::new(int(&(ceil + 1)) * int(n), -(&total * 8u32));
        chain.push(inequality(
            "head: (ceil(sqrt N) + 1) n 2^-(N+n) <= n 2^-n",
            &head,
            "<=",
            &target,
            precision,
        ));
    }
    let tail = Monomial::new(int(&total), -(&total * 8u32));
    chain.push(inequality(
        "tail: (N + n) 2^-(N+n) <= n 2^-n",
        &tail,
        "<=",
        &target,
        precision,
    ));
    let bound = Monomial::new(
        int(n) * Rational::from_integer(2.into()),
        BigInt::from(4) - n * 8u32,
    );
    Ok(BlockBound {
        n: render_int(n),
        prefix: render_int(prefix),
        value: bound.symbolic(),
        decimal: bound.to_decimal(digits_for(precision), precision),
        chain,
        monomial: Some(bound),
    })
}

/// Lower bound for ‖χ_D‖_{M(L₁)}, D the single-negative block of n = 2^m Rademachers after a
/// prefix of N, from the test sum n^{−1/2} Σ r_i: the value is (n^{1/2} − 2n^{−1/2})·n·2^{−(N+n)},
/// which is ≥ ½ n^{3/2} 2^{−(N+n)} for n ≥ 4.
pub fn bound_d(n: &BigInt, prefix: &BigInt, precision: u32) -> Result<BlockBound> {
    let m = log2_exact(n)?;
    if *n < BigInt::from(4) {
        return Err(Error::BlockTooSmall(n.to_u64().unwrap_or(u64::MAX)));
    }
    let total = prefix + n;
    let m4 = BigInt::from(m) * 4;
    // (n − 2)·n·n^{−1/2}·2^{−(N+n)} = (n − 2)·2^{m/2 − (N+n)}.
    let witness = Monomial::new(int(&(n - 2)), &m4 - &total * 8u32);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let floor = Monomial::new(half, &m4 * 3 - &total * 8u32);
    let chain = vec![inequality(
        "witness: (n^(1/2) - 2 n^(-1/2)) n 2^-(N+n) >= 1/2 n^(3/2) 2^-(N+n)",
        &witness,
        ">=",
        &floor,
        precision,
    )];
    Ok(BlockBound {
        n: render_int(n),
        prefix: render_int(prefix),
        value: witness.symbolic(),
        decimal: witness.to_decimal(digits_for(precision), precision),
        chain,
        monomial: Some(witness),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CertVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub plan: PlanSummary,
    pub blocks: usize,
    pub precision: u32,
    pub b_bounds: Vec<BlockBound>,
    /// `None` where n_k < 4.
    pub d_bounds: Vec<Option<BlockBound>>,
    /// α_k·bound_B(n_k, N_{k−1}) = 2√2 n_k^{−1/4}.
    pub f_terms: Vec<String>,
    /// Enclosures of the partial sums of the f-series.
    pub f_partial_sums: Vec<EnclosureRepr>,
    /// 2√2·2^{−m_1/4}/(1 − 2^{−1/4}), a bound for the whole series.
    pub f_majorant: EnclosureRepr,
    /// α_k·½ n_k^{3/2} 2^{−N_k} = ½ n_k^{1/4} 2^{−N_{k−1}}; `None` where n_k < 4.
    pub g_terms: Vec<Option<String>>,
    pub inequalities: Vec<Inequality>,
    pub verdict: CertVerdict,
    pub notes: Vec<String>,
}

/// Rational enclosure of a positive monomial, or [0, 2^{−(precision+64)}] when it is too small
/// to expand (values that large are never produced by the f-series).
fn enclose_small(m: &Monomial, precision: u32) -> Enclosure {
    if m.is_expandable() {
        m.enclose(precision)
    } else {
        debug_assert!(m.log2_estimate() < 0.0);
        let hi = Rational::new(BigInt::one(), BigInt::one() << (precision as usize + 64));
        Enclosure {
            lo: Rational::zero(),
            hi,
        }
    }
}

/// Checks the bound chains block by block for K = `blocks` (the plan is extended with the
/// smallest admissible m_k if it is shorter).
pub fn certify(plan: &CounterexamplePlan, blocks: usize, precision: u32) -> Result<Certificate> {
    if !plan.strict {
        return Err(Error::InvalidPlan(
            "certification needs a strict plan (m_k >= 8 N_(k-1))".into(),
        ));
    }
    if blocks == 0 {
        return Err(Error::InvalidPlan("at least one block is required".into()));
    }
    let plan = plan.extended(blocks)?;
    let mut notes = Vec::new();
    if plan.len() > blocks {
        notes.push(format!(
            "only the first {blocks} of {} blocks are certified",
            plan.len()
        ));
    }
    let per_block = map_range(blocks, |i| -> Result<_> {
        let k = i + 1;
        let n = plan.n(k);
        let prefix = plan.prefix(k - 1);
        let b = bound_b(&n, &prefix, precision)?;
        let d = match bound_d(&n, &prefix, precision) {
            Ok(d) => Some(d),
            Err(Error::BlockTooSmall(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((b, d))
    });
    let per_block: Vec<_> = per_block.into_iter().collect::<Result<_>>()?;
    let mut inequalities = Vec::new();
    let mut f_terms = Vec::new();
    let mut g_terms = Vec::new();
    let mut g_monomials: Vec<Option<Monomial>> = Vec::new();
    let mut sums = Vec::new();
    let mut acc = Enclosure::zero();
    for (i, (b, d)) in per_block.iter().enumerate() {
        let k = i + 1;
        let m = BigInt::from(plan.m(k));
        let prefix = plan.prefix(k - 1);
        if k >= 2 {
            inequalities.push(inequality(
                format!("block {k}: n_k^(1/8) >= 2^N_(k-1)"),
                &Monomial::pow2_8ths(m.clone()),
                ">=",
                &Monomial::pow2(prefix.clone()),
                precision,
            ));
        }
        for step in &b.chain {
            let mut s = step.clone();
            s.label = format!("block {k} B {}", s.label);
            inequalities.push(s);
        }
        let alpha = plan.alpha(k);
        let f_term = alpha.mul(b.monomial.as_ref().expect("bound value"));
        let majorant_term =
            Monomial::new(Rational::from_integer(2.into()), BigInt::from(4) - &m * 2);
        inequalities.push(inequality(
            format!("block {k}: alpha_k 2 sqrt2 n_k 2^-n_k = 2 sqrt2 n_k^(-1/4)"),
            &f_term,
            "==",
            &majorant_term,
            precision,
        ));
        acc = acc.add(&enclose_small(&majorant_term, precision));
        sums.push(acc.clone());
        f_terms.push(f_term.symbolic());
        match d {
            Some(d) => {
                for step in &d.chain {
                    let mut s = step.clone();
                    s.label = format!("block {k} D {}", s.label);
                    inequalities.push(s);
                }
                // α_k · ½ n^{3/2} 2^{−(N+n)} = ½ · 2^{2m/8 − N}.
                let half = Rational::new(BigInt::one(), BigInt::from(2));
                let g = Monomial::new(half.clone(), &m * 2 - &prefix * 8);
                let via_floor = alpha
                    .mul(&Monomial::new(
                        int(&plan.n(k)),
                        &m * 4 - (&prefix + plan.n(k)) * 8,
                    ))
                    .scale(&half);
                inequalities.push(inequality(
                    format!("block {k}: alpha_k 1/2 n_k^(3/2) 2^-N_k = 1/2 n_k^(1/4) 2^-N_(k-1)"),
                    &via_floor,
                    "==",
                    &g,
                    precision,
                ));
                inequalities.push(inequality(
                    format!("block {k}: 1/2 n_k^(1/4) 2^-N_(k-1) >= 1/2 n_k^(1/8)"),
                    &g,
                    ">=",
                    &Monomial::new(half, m.clone()),
                    precision,
                ));
                g_terms.push(Some(g.symbolic()));
                g_monomials.push(Some(g));
            }
            None => {
                notes.push(format!(
                    "block {k}: n_k = {} < 4, the witness bound for D_k is not evaluated",
                    render_int(&plan.n(k))
                ));
                g_terms.push(None);
                g_monomials.push(None);
            }
        }
    }
    let present: Vec<(usize, &Monomial)> = g_monomials
        .iter()
        .enumerate()
        .filter_map(|(i, g)| g.as_ref().map(|g| (i + 1, g)))
        .collect();
    for w in present.windows(2) {
        let ((k0, g0), (k1, g1)) = (w[0], w[1]);
        let mut s = inequality(
            format!("g-terms increase: block {k1} over block {k0}"),
            g1,
            ">=",
            g0,
            precision,
        );
        s.holds &= g1.cmp_exact(g0) == Ordering::Greater;
        inequalities.push(s);
    }
    // Σ_k 2√2 n_k^{−1/4} ≤ 2√2 Σ_{m ≥ m_1} 2^{−m/4} = 2√2·2^{−m_1/4}/(1 − 2^{−1/4}).
    let m1 = BigInt::from(plan.m(1));
    let num = Monomial::new(Rational::from_integer(2.into()), BigInt::from(4) - &m1 * 2)
        .enclose(precision);
    let q = Monomial::pow2_8ths(-2).enclose(precision);
    let one = Rational::one();
    let majorant = Enclosure {
        lo: &num.lo / (&one - &q.lo),
        hi: &num.hi / (&one - &q.hi),
    };
    let digits = digits_for(precision);
    let last = sums.last().expect("at least one block").clone();
    inequalities.push(Inequality {
        label: "f-series partial sum <= 2 sqrt2 2^(-m_1/4) / (1 - 2^(-1/4))".into(),
        lhs: format!(
            "[{}, {}]",
            decimal(&last.lo, digits, Rounding::Down),
            decimal(&last.hi, digits, Rounding::Up)
        ),
        relation: "<=".into(),
        rhs: format!(
            "[{}, {}]",
            decimal(&majorant.lo, digits, Rounding::Down),
            decimal(&majorant.hi, digits, Rounding::Up)
        ),
        lhs_decimal: decimal(&last.hi, digits, Rounding::Up),
        rhs_decimal: decimal(&majorant.lo, digits, Rounding::Down),
        holds: last.certainly_le(&majorant),
    });
    let verdict = if inequalities.iter().all(|i| i.holds) {
        CertVerdict::Pass
    } else {
        CertVerdict::Fail
    };
    let (b_bounds, d_bounds) = per_block.into_iter().unzip();
    Ok(Certificate {
        plan: plan.summary(),
        blocks,
        precision,
        b_bounds,
        d_bounds,
        f_terms,
        f_partial_sums: sums.iter().map(|e| e.to_decimal(digits)).collect(),
        f_majorant: majorant.to_decimal(digits),
        g_terms,
        inequalities,
        verdict,
        notes,
    })
}
