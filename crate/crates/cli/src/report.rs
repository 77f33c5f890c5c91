use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub const SCHEMA: &str = "rlab-report/1";

/// How a number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Exact rational or integer arithmetic; decimals are rounded renderings.
    Exact,
    /// Closed forms, quadrature or root finding in floating point.
    Quadrature,
    /// The best value over explicit test vectors: a lower bound.
    OptimizerLower,
    /// A finite-truncation value judged by a trend certificate.
    Trend,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub value: Value,
    pub provenance: Provenance,
    /// Relative tolerance the value is stated to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// The statement the value is checked against.
    pub anchor: String,
    /// Outcome of the check, when the record is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ok: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Ok,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub status: Status,
    /// Full structured output of the underlying operation.
    pub details: Value,
}

/// JSON number, or a string for values JSON cannot hold.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

impl Record {
    pub fn new(
        name: impl Into<String>,
        value: Value,
        provenance: Provenance,
        anchor: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            provenance,
            tolerance: None,
            anchor: anchor.into(),
            ok: None,
        }
    }

    pub fn tol(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    pub fn check(mut self, ok: bool) -> Self {
        self.ok = Some(ok);
        self
    }
}

impl Report {
    pub fn new(config: &ExperimentConfig, records: Vec<Record>, details: Value) -> Self {
        let status = if records.iter().all(|r| r.ok != Some(false)) {
            Status::Ok
        } else {
            Status::Fail
        };
        Self {
            schema: SCHEMA.into(),
            experiment: config.experiment.name().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            records,
            status,
            details,
        }
    }

    /// Marks the report failed regardless of its records.
    pub fn fail(mut self) -> Self {
        self.status = Status::Fail;
        self
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// One row per record: name, value, provenance, tolerance, anchor, ok. Arrays are joined
    /// with `;`.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "provenance", "tolerance", "anchor", "ok"])?;
        for r in &self.records {
            let prov = serde_json::to_value(r.provenance)?;
            w.write_record([
                r.name.as_str(),
                &flat(&r.value),
                prov.as_str().unwrap_or_default(),
                &r.tolerance.map(|t| t.to_string()).unwrap_or_default(),
                r.anchor.as_str(),
                &r.ok.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(flat).collect::<Vec<_>>().join(";"),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
