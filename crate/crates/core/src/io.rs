//! Space files: CSV matrices and JSON documents.
//!
//! CSV: a header row `labels,<l1>,...,<ln>` followed by one row per point,
//! `<li>,<d(i,1)>,...,<d(i,n)>`.
//!
//! JSON: `{ "labels": [...], "matrix": [[...]] }`, optionally with a
//! `"weight": [...]` array for weighted spaces.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteQuasiMetric, Matrix};
use crate::weight::WeightedQuasiMetric;

/// Unvalidated contents of a space file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<f64>>,
}

impl SpaceFile {
    pub fn to_matrix(&self) -> Result<Matrix> {
        let m = Matrix::from_rows(&self.matrix)?;
        if self.labels.len() != m.n() {
            return Err(Error::Structural(format!(
                "{} labels for a {}x{} matrix",
                self.labels.len(),
                m.n(),
                m.n()
            )));
        }
        Ok(m)
    }

    /// Unvalidated space; callers validate with their own options.
    pub fn to_space(&self) -> Result<FiniteQuasiMetric> {
        FiniteQuasiMetric::new_unchecked(Some(self.labels.clone()), self.to_matrix()?)
    }

    pub fn from_space(q: &FiniteQuasiMetric) -> Self {
        SpaceFile {
            labels: q.labels(),
            matrix: q.matrix().to_rows(),
            weight: None,
        }
    }

    pub fn from_weighted(qw: &WeightedQuasiMetric) -> Self {
        SpaceFile {
            weight: Some(qw.weight().to_vec()),
            ..SpaceFile::from_space(qw.space())
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("space file serializes");
        s.push('\n');
        s
    }

    /// CSV text; the weight, if any, is not representable and is dropped.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("labels");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.matrix) {
            out.push_str(label);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn parse_json(text: &str, origin: &str) -> Result<SpaceFile> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string()))
}

pub fn parse_csv(text: &str, origin: &str) -> Result<SpaceFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::parse(format!("{origin}:1"), e.to_string()))?,
        None => return Err(Error::parse(origin, "empty file")),
    };
    if header.get(0) != Some("labels") {
        return Err(Error::parse(format!("{origin}:1"), "first field must be `labels`"));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    let mut matrix = Vec::with_capacity(n);
    for (row, record) in records.enumerate() {
        let line = row + 2;
        let loc = format!("{origin}:{line}");
        let record = record.map_err(|e| Error::parse(loc.clone(), e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != n + 1 {
            return Err(Error::parse(
                loc,
                format!("expected {} fields, found {}", n + 1, record.len()),
            ));
        }
        if matrix.len() >= n {
            return Err(Error::parse(loc, format!("more than {n} data rows")));
        }
        let expected = &labels[matrix.len()];
        if &record[0] != expected {
            return Err(Error::parse(
                loc,
                format!("row label {:?}, expected {expected:?}", &record[0]),
            ));
        }
        let values = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|e| {
                    Error::parse(
                        format!("{origin}:{line}, column {}", labels[col]),
                        format!("{field:?}: {e}"),
                    )
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        matrix.push(values);
    }
    if matrix.len() != n {
        return Err(Error::parse(
            origin,
            format!("{} data rows for {n} labels", matrix.len()),
        ));
    }
    Ok(SpaceFile {
        labels,
        matrix,
        weight: None,
    })
}

/// Reads a space file, choosing the format from the extension (`.csv`,
/// anything else is parsed as JSON).
pub fn read_space(path: &Path) -> Result<SpaceFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_csv(&text, &origin),
        _ => parse_json(&text, &origin),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
