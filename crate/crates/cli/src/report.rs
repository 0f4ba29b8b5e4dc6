//! Run reports and their JSON / CSV forms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default)]
    pub measured: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// First counterexample, for property checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            status: Status::from_bool(ok),
            measured: BTreeMap::new(),
            tolerance: None,
            detail: None,
            witness: None,
        }
    }

    pub fn measure(mut self, key: &str, value: impl Serialize) -> Self {
        self.measured.insert(key.to_string(), serde_json::to_value(value).expect("measurement serializes"));
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// A named table of string cells, for CSV output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Table>,
    /// Structured outputs such as state documents.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub artifacts: BTreeMap<String, Value>,
    /// Wall-clock milliseconds per stage. Left out unless requested so that
    /// reports stay byte-identical across runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        RunReport {
            scenario: scenario.into(),
            seed: None,
            checks: Vec::new(),
            tables: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            timings_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn artifact(&mut self, key: &str, value: impl Serialize) {
        self.artifacts.insert(key.to_string(), serde_json::to_value(value).expect("artifact serializes"));
    }

    /// Sorts checks by name and rejects duplicates.
    pub fn finish(mut self) -> CliResult<Self> {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = self.checks.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(CliError::Internal(format!("check '{}' reported twice", w[0].name)));
        }
        Ok(self)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::validation(format!("unknown format '{other}', expected json or csv"))),
        }
    }
}

const CHECK_COLUMNS: [&str; 5] = ["check", "status", "tolerance", "quantity", "value"];

/// Renders a report. CSV defaults to one row per (check, measured value);
/// `table` selects one of the report's tables instead.
pub fn emit_report(r: &RunReport, format: Format, table: Option<&str>) -> CliResult<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
            match table {
                Some(name) => {
                    let t = r.tables.get(name).ok_or_else(|| {
                        let known: Vec<&str> = r.tables.keys().map(String::as_str).collect();
                        CliError::validation(format!("report has no table '{name}' (available: {known:?})"))
                    })?;
                    w.write_record(&t.columns).map_err(csv_err)?;
                    for row in &t.rows {
                        w.write_record(row).map_err(csv_err)?;
                    }
                }
                None => {
                    w.write_record(CHECK_COLUMNS).map_err(csv_err)?;
                    for c in &r.checks {
                        let tol = c.tolerance.map(|t| t.to_string()).unwrap_or_default();
                        if c.measured.is_empty() {
                            w.write_record([c.name.as_str(), &c.status.to_string(), &tol, "", ""]).map_err(csv_err)?;
                        }
                        for (k, v) in &c.measured {
                            let v = match v {
                                Value::String(s) => s.clone(),
                                other => other.to_string(),
                            };
                            w.write_record([c.name.as_str(), &c.status.to_string(), &tol, k, &v]).map_err(csv_err)?;
                        }
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}
