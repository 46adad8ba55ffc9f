use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::io::write_text;

/// One named check. Reported-only checks never fail a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub asserted: bool,
    pub passed: bool,
}

impl CheckResult {
    /// Asserted check `|value - expected| <= tolerance`.
    pub fn near(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let residual = (value - expected).abs();
        CheckResult {
            name: name.into(),
            value,
            expected: Some(expected),
            residual,
            tolerance: Some(tolerance),
            asserted: true,
            passed: residual <= tolerance,
        }
    }

    /// Asserted check `|value| <= tolerance` for a residual-like quantity.
    pub fn small(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::near(name, value, 0.0, tolerance)
    }

    /// Asserted boolean outcome; `value` carries the measured quantity.
    pub fn flag(name: impl Into<String>, passed: bool, value: f64, tolerance: Option<f64>) -> Self {
        CheckResult {
            name: name.into(),
            value,
            expected: None,
            residual: value,
            tolerance,
            asserted: true,
            passed,
        }
    }

    pub fn reported(mut self) -> Self {
        self.asserted = false;
        self
    }
}

/// A CSV table attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file_name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            file_name: file_name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario: Value,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub outputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Extra files (name, contents), e.g. exported spaces.
    #[serde(skip)]
    pub files: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(command: &str, scenario: Value) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario,
            passed: true,
            checks: Vec::new(),
            outputs: BTreeMap::new(),
            timings_ms: None,
            tables: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn check(&mut self, c: CheckResult) {
        debug_assert!(
            self.checks.iter().all(|x| x.name != c.name),
            "duplicate check {}",
            c.name
        );
        if c.asserted && !c.passed {
            self.passed = false;
        }
        self.checks.push(c);
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable output"),
        );
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn timing(&mut self, key: &str, ms: f64) {
        self.timings_ms
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_string(), ms);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(
            "checks.csv",
            &[
                "name",
                "value",
                "expected",
                "residual",
                "tolerance",
                "asserted",
                "passed",
            ],
        );
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.checks {
            t.push(vec![
                c.name.clone(),
                c.value.to_string(),
                opt(c.expected),
                c.residual.to_string(),
                opt(c.tolerance),
                c.asserted.to_string(),
                c.passed.to_string(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Writes `report.json`, `checks.csv` and every attached table into `dir`.
/// Returns the written file names in order.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<Vec<String>> {
    let mut written = Vec::new();
    write_text(&dir.join("report.json"), &report.to_json())?;
    written.push("report.json".to_string());
    let checks = report.checks_table();
    write_text(&dir.join(&checks.file_name), &checks.to_csv())?;
    written.push(checks.file_name);
    for t in &report.tables {
        write_text(&dir.join(&t.file_name), &t.to_csv())?;
        written.push(t.file_name.clone());
    }
    for (name, contents) in &report.files {
        write_text(&dir.join(name), contents)?;
        written.push(name.clone());
    }
    Ok(written)
}

/// What goes to stdout: the JSON report, or the first table (falling back
/// to the checks table) as CSV.
pub fn render_stdout(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => match report.tables.first() {
            Some(t) => t.to_csv(),
            None => report.checks_table().to_csv(),
        },
    }
}
