//! Step-function descriptors for the command line.

use rlab_core::dyadic::{parse_rational, rademacher, rademacher_sum, Rational};
use rlab_core::{CoeffSeq, Error, Result, StepFunction};

/// Parses one of
///
/// * `cells:v1,v2,...` with 2^L rational cell values,
/// * `indicator:t` for χ_{[0,t]} with t dyadic in [0, 1],
/// * `rad:k` for r_k,
/// * `sum:a1,a2,...` for Σ a_k r_k,
/// * `const:c`,
/// * `json:<file>` or a bare `{...}` StepFunction document.
pub fn parse_function(s: &str) -> Result<StepFunction> {
    let s = s.trim();
    if s.starts_with('{') {
        return StepFunction::from_json(s);
    }
    let bad = |why: &str| Error::Parse(format!("function descriptor {s:?}: {why}"));
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| bad("expected kind:argument"))?;
    match head {
        "cells" => {
            let values = rest
                .split(',')
                .map(|x| parse_rational(x.trim()))
                .collect::<Result<Vec<Rational>>>()?;
            let len = values.len() as u64;
            if !len.is_power_of_two() {
                return Err(bad("the number of cells must be a power of two"));
            }
            StepFunction::new(len.trailing_zeros(), values)
        }
        "indicator" => {
            let t = parse_rational(rest)?;
            let denom = t.denom().clone();
            let level = denom.bits().saturating_sub(1) as u32;
            if denom != num_bigint::BigInt::from(1u8) << level as usize {
                return Err(bad("t must be a dyadic rational"));
            }
            let cells: u64 = t
                .numer()
                .try_into()
                .map_err(|_| bad("t must lie in [0, 1]"))?;
            StepFunction::prefix_indicator(level, cells)
        }
        "rad" => {
            let k: u32 = rest
                .parse()
                .map_err(|_| bad("k must be a positive integer"))?;
            if k == 0 {
                return Err(bad("k must be a positive integer"));
            }
            rademacher(k, k)
        }
        "sum" => rademacher_sum(&CoeffSeq::parse(rest)?),
        "const" => Ok(StepFunction::constant(parse_rational(rest)?)),
        "json" => {
            let text = std::fs::read_to_string(rest)
                .map_err(|e| bad(&format!("cannot read {rest}: {e}")))?;
            StepFunction::from_json(&text)
        }
        _ => Err(bad("unknown kind")),
    }
}
