//! Record-by-record comparison of two reports of the same experiment.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::report::Report;

/// Relative tolerance used when neither record states one.
pub const DEFAULT_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffEntry {
    pub name: String,
    pub left: Value,
    pub right: Value,
    /// Largest relative difference over the numeric components, if both sides are numeric.
    pub rel_diff: Option<f64>,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diff {
    pub experiment: String,
    pub entries: Vec<DiffEntry>,
}

impl Diff {
    /// No record differs beyond its tolerance.
    pub fn agrees(&self) -> bool {
        self.entries.iter().all(|e| e.within_tolerance)
    }
}

fn numbers(v: &Value) -> Option<Vec<f64>> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| vec![x]),
        Value::String(s) => s.parse::<f64>().ok().map(|x| vec![x]),
        Value::Array(a) => a
            .iter()
            .map(numbers)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.concat()),
        _ => None,
    }
}

fn rel_diff(a: &Value, b: &Value) -> Option<f64> {
    let (x, y) = (numbers(a)?, numbers(b)?);
    if x.len() != y.len() {
        return None;
    }
    Some(x.iter().zip(&y).fold(0.0, |acc, (&p, &q)| {
        let d = if p == q {
            0.0
        } else {
            (p - q).abs() / p.abs().max(q.abs()).max(f64::MIN_POSITIVE)
        };
        acc.max(d)
    }))
}

/// Lists the records whose values differ. Errors if the reports come from different
/// experiments or carry different record sets.
pub fn compare_reports(a: &Report, b: &Report, rtol: f64) -> CliResult<Diff> {
    if a.schema != b.schema {
        return Err(CliError::SchemaMismatch(format!(
            "schema {} vs {}",
            a.schema, b.schema
        )));
    }
    if a.experiment != b.experiment {
        return Err(CliError::SchemaMismatch(format!(
            "experiment {} vs {}",
            a.experiment, b.experiment
        )));
    }
    let names = |r: &Report| {
        r.records
            .iter()
            .map(|x| x.name.clone())
            .collect::<BTreeSet<_>>()
    };
    let (na, nb) = (names(a), names(b));
    if na != nb {
        let only: Vec<_> = na.symmetric_difference(&nb).cloned().collect();
        return Err(CliError::SchemaMismatch(format!(
            "records present on one side only: {}",
            only.join(", ")
        )));
    }
    let mut entries = Vec::new();
    for ra in &a.records {
        let rb = b.record(&ra.name).expect("name sets agree");
        if ra.value == rb.value {
            continue;
        }
        let tolerance = [ra.tolerance, rb.tolerance, Some(rtol)]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max);
        let rel = rel_diff(&ra.value, &rb.value);
        entries.push(DiffEntry {
            name: ra.name.clone(),
            left: ra.value.clone(),
            right: rb.value.clone(),
            rel_diff: rel,
            tolerance,
            within_tolerance: rel.is_some_and(|d| d <= tolerance),
        });
    }
    Ok(Diff {
        experiment: a.experiment.clone(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Experiment, ExperimentConfig};
    use crate::report::{num, Provenance, Record};

    fn report(name: &str, values: &[(&str, f64)]) -> Report {
        let c = ExperimentConfig::new(Experiment::Indices { phi: name.into() });
        let records = values
            .iter()
            .map(|&(n, v)| Record::new(n, num(v), Provenance::Quadrature, "x"))
            .collect();
        Report::new(&c, records, Value::Null)
    }

    #[test]
    fn identical_reports_have_no_entries() {
        let a = report("sqrt", &[("gamma", 0.5), ("delta", 0.5)]);
        let d = compare_reports(&a, &a.clone(), DEFAULT_RTOL).unwrap();
        assert!(d.entries.is_empty() && d.agrees());
    }

    #[test]
    fn differences_are_measured_relative() {
        let a = report("sqrt", &[("gamma", 1.0), ("delta", 0.5)]);
        let b = report("sqrt", &[("gamma", 1.0 + 1e-12), ("delta", 0.6)]);
        let d = compare_reports(&a, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(d.entries.len(), 2);
        assert!(d.entries[0].within_tolerance);
        assert!(!d.entries[1].within_tolerance);
        assert!((d.entries[1].rel_diff.unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_record_sets_are_rejected() {
        let a = report("sqrt", &[("gamma", 1.0)]);
        let b = report("sqrt", &[("delta", 1.0)]);
        assert!(matches!(
            compare_reports(&a, &b, DEFAULT_RTOL),
            Err(CliError::SchemaMismatch(_))
        ));
    }
}
