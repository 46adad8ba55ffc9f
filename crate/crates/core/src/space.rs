//! Finite quasi-metric spaces.
//!
//! A [`FiniteQuasiMetric`] is an `n`-point space given by a dense row-major
//! distance matrix `D` with `D[i][j] = d(x_i, x_j)`. The axioms are
//!
//! * `D[i][i] = 0`,
//! * `D[i][j] > 0` for `i != j` (strict mode), or only
//!   `D[i][j] = D[j][i] = 0 => i = j` in weak-separation mode,
//! * `D[i][j] <= D[i][k] + D[k][j]`.
//!
//! Symmetry is *not* required. [`symmetrize`] and [`max_metric`] derive the
//! two classical metrics `(d(x,y) + d(y,x)) / 2` and `max(d(x,y), d(y,x))`.

use std::fmt;
use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base absolute tolerance, scaled by the largest matrix entry.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    /// Builds a matrix from nested rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    /// Wraps a row-major buffer of length `n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Structural(format!(
                "buffer has {} entries, expected {n}x{n}",
                data.len()
            )));
        }
        Ok(Matrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(Error::Structural(format!(
                "entry ({}, {}) is not finite",
                p / self.n.max(1),
                p % self.n.max(1)
            ))),
            None => Ok(()),
        }
    }
}

/// Tolerance and separation convention used by every validation routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Base tolerance; the effective tolerance is `tol * max|D|`.
    pub tol: f64,
    /// Accept `d(x, y) = 0` for `x != y` as long as `d(y, x) > 0`.
    pub weak_separation: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            tol: DEFAULT_TOL,
            weak_separation: false,
        }
    }
}

impl ValidationOptions {
    pub fn with_tol(tol: f64) -> Self {
        ValidationOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn weak(mut self, weak_separation: bool) -> Self {
        self.weak_separation = weak_separation;
        self
    }

    /// Absolute tolerance for a matrix whose largest entry has magnitude `scale`.
    pub fn effective_tol(&self, scale: f64) -> f64 {
        if scale > 0.0 {
            self.tol * scale
        } else {
            self.tol
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ZeroDiagonal,
    Nonnegativity,
    Positiveness,
    Separation,
    Triangle,
    Symmetry,
    /// `Q(phi(i), phi(j)) = D[i][j]` for the bundle embedding.
    Isometry,
    /// `W(phi(i)) = w[i]` for the bundle embedding.
    WeightTransport,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::ZeroDiagonal => "zero_diagonal",
            Axiom::Nonnegativity => "nonnegativity",
            Axiom::Positiveness => "positiveness",
            Axiom::Separation => "separation",
            Axiom::Triangle => "triangle",
            Axiom::Symmetry => "symmetry",
            Axiom::Isometry => "isometry",
            Axiom::WeightTransport => "weight_transport",
        };
        f.write_str(name)
    }
}

/// The worst witness for one violated axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
    /// Margin by which the constraint is missed at the witness.
    pub residual: f64,
    /// Number of index tuples violating this axiom.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub max_residual: f64,
    pub tol: f64,
}

impl ValidationReport {
    pub fn violation(&self, axiom: Axiom) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }

    pub fn summary(&self) -> String {
        if self.passed {
            return format!("passed (max residual {:e})", self.max_residual);
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{} at {:?} (residual {:e}, {} total)",
                    v.axiom, v.witness, v.residual, v.count
                )
            })
            .collect();
        parts.join("; ")
    }
}

/// Accumulates the worst witness per axiom while scanning index tuples.
#[derive(Debug, Default)]
pub(crate) struct ReportBuilder {
    tol: f64,
    max_residual: f64,
    violations: Vec<Violation>,
}

impl ReportBuilder {
    pub(crate) fn new(tol: f64) -> Self {
        ReportBuilder {
            tol,
            max_residual: 0.0,
            violations: Vec::new(),
        }
    }

    /// Records a measured residual; `violated` decides whether it is reported.
    pub(crate) fn observe(&mut self, axiom: Axiom, witness: &[usize], residual: f64, violated: bool) {
        if residual > self.max_residual {
            self.max_residual = residual;
        }
        if violated {
            self.push(axiom, witness, residual, 1);
        }
    }

    fn push(&mut self, axiom: Axiom, witness: &[usize], residual: f64, count: usize) {
        match self.violations.iter_mut().find(|v| v.axiom == axiom) {
            Some(v) => {
                v.count += count;
                if residual > v.residual {
                    v.residual = residual;
                    v.witness = witness.to_vec();
                }
            }
            None => self.violations.push(Violation {
                axiom,
                witness: witness.to_vec(),
                residual,
                count,
            }),
        }
    }

    fn merge_scan(&mut self, axiom: Axiom, scan: &TriangleScan) {
        self.max_residual = self.max_residual.max(scan.max_residual);
        if scan.count > 0 {
            self.push(axiom, &scan.witness, scan.worst, scan.count);
        }
    }

    pub(crate) fn finish(mut self) -> ValidationReport {
        self.violations.sort_by_key(|v| v.axiom);
        ValidationReport {
            passed: self.violations.is_empty(),
            violations: self.violations,
            max_residual: self.max_residual,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct TriangleScan {
    max_residual: f64,
    worst: f64,
    witness: Vec<usize>,
    count: usize,
}

/// Scans all `n^3` triples row by row; the combination step runs in row order
/// so the result does not depend on how rayon partitions the rows.
fn scan_triangles(d: &Matrix, tol: f64) -> TriangleScan {
    let n = d.n();
    let rows: Vec<TriangleScan> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut scan = TriangleScan::default();
            let row_i = d.row(i);
            for k in 0..n {
                let dik = row_i[k];
                let row_k = d.row(k);
                for j in 0..n {
                    let residual = row_i[j] - dik - row_k[j];
                    if residual > scan.max_residual {
                        scan.max_residual = residual;
                    }
                    if residual > tol {
                        scan.count += 1;
                        if residual > scan.worst || scan.witness.is_empty() {
                            scan.worst = residual;
                            scan.witness = vec![i, k, j];
                        }
                    }
                }
            }
            scan
        })
        .collect();
    rows.into_iter().fold(TriangleScan::default(), |mut acc, row| {
        acc.max_residual = acc.max_residual.max(row.max_residual);
        if row.count > 0 && (acc.count == 0 || row.worst > acc.worst) {
            acc.worst = row.worst;
            acc.witness = row.witness;
        }
        acc.count += row.count;
        acc
    })
}

fn check_axioms(d: &Matrix, opts: &ValidationOptions, builder: &mut ReportBuilder, tol: f64) {
    let n = d.n();
    for i in 0..n {
        let v = d.get(i, i).abs();
        builder.observe(Axiom::ZeroDiagonal, &[i], v, v > tol);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = d.get(i, j);
            builder.observe(Axiom::Nonnegativity, &[i, j], -v, v < -tol);
            if opts.weak_separation {
                if i < j && v <= tol && d.get(j, i) <= tol {
                    builder.observe(Axiom::Separation, &[i, j], tol - v.max(d.get(j, i)), true);
                }
            } else if v <= tol {
                builder.observe(Axiom::Positiveness, &[i, j], tol - v, true);
            }
        }
    }
    let scan = scan_triangles(d, tol);
    builder.merge_scan(Axiom::Triangle, &scan);
}

/// Checks the quasi-metric axioms. Structural problems (non-finite entries)
/// are errors; axiom failures are reported with witnesses.
pub fn validate_quasi_metric(d: &Matrix, opts: &ValidationOptions) -> Result<ValidationReport> {
    d.check_finite()?;
    let tol = opts.effective_tol(d.max_abs());
    let mut builder = ReportBuilder::new(tol);
    check_axioms(d, opts, &mut builder, tol);
    Ok(builder.finish())
}

/// Quasi-metric axioms plus exact symmetry.
pub fn validate_metric(d: &Matrix, opts: &ValidationOptions) -> Result<ValidationReport> {
    d.check_finite()?;
    let tol = opts.effective_tol(d.max_abs());
    let mut builder = ReportBuilder::new(tol);
    check_axioms(d, opts, &mut builder, tol);
    let n = d.n();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (d.get(i, j) - d.get(j, i)).abs();
            builder.observe(Axiom::Symmetry, &[i, j], gap, gap > 0.0);
        }
    }
    Ok(builder.finish())
}

/// An `n`-point quasi-metric space with optional point labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteQuasiMetric {
    labels: Option<Vec<String>>,
    matrix: Matrix,
}

impl FiniteQuasiMetric {
    /// Validates `matrix` and attaches `labels` (one per point).
    pub fn new(labels: Vec<String>, matrix: Matrix, opts: &ValidationOptions) -> Result<Self> {
        let space = Self::new_unchecked(Some(labels), matrix)?;
        space.ensure_valid(opts)?;
        Ok(space)
    }

    pub fn from_matrix(matrix: Matrix, opts: &ValidationOptions) -> Result<Self> {
        let space = FiniteQuasiMetric { labels: None, matrix };
        space.ensure_valid(opts)?;
        Ok(space)
    }

    /// Skips axiom validation. Only the label count is checked.
    pub fn new_unchecked(labels: Option<Vec<String>>, matrix: Matrix) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != matrix.n() {
                return Err(Error::Structural(format!(
                    "{} labels for {} points",
                    l.len(),
                    matrix.n()
                )));
            }
        }
        Ok(FiniteQuasiMetric { labels, matrix })
    }

    pub(crate) fn from_parts(labels: Option<Vec<String>>, matrix: Matrix) -> Self {
        FiniteQuasiMetric { labels, matrix }
    }

    fn ensure_valid(&self, opts: &ValidationOptions) -> Result<()> {
        let report = validate_quasi_metric(&self.matrix, opts)?;
        if report.passed {
            Ok(())
        } else {
            Err(Error::InvalidSpace(Box::new(report)))
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub(crate) fn raw_labels(&self) -> Option<&Vec<String>> {
        self.labels.as_ref()
    }

    /// Point labels; unlabeled spaces use the point indices.
    pub fn labels(&self) -> Vec<String> {
        match &self.labels {
            Some(l) => l.clone(),
            None => (0..self.n()).map(|i| i.to_string()).collect(),
        }
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Resolves a label, falling back to parsing a numeric index.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        if let Some(l) = &self.labels {
            if let Some(p) = l.iter().position(|s| s == label) {
                return Some(p);
            }
        }
        label.parse::<usize>().ok().filter(|&i| i < self.n())
    }

    pub fn validate(&self, opts: &ValidationOptions) -> Result<ValidationReport> {
        validate_quasi_metric(&self.matrix, opts)
    }

    pub fn reverse(&self) -> FiniteQuasiMetric {
        reverse(self)
    }

    pub fn symmetrize(&self) -> FiniteMetric {
        symmetrize(self)
    }

    pub fn max_metric(&self) -> FiniteMetric {
        max_metric(self)
    }
}

/// A quasi-metric whose matrix is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric(FiniteQuasiMetric);

impl FiniteMetric {
    pub fn new(labels: Vec<String>, matrix: Matrix, opts: &ValidationOptions) -> Result<Self> {
        let space = FiniteQuasiMetric::new_unchecked(Some(labels), matrix)?;
        Self::from_space(space, opts)
    }

    pub fn from_matrix(matrix: Matrix, opts: &ValidationOptions) -> Result<Self> {
        Self::from_space(FiniteQuasiMetric::from_parts(None, matrix), opts)
    }

    fn from_space(space: FiniteQuasiMetric, opts: &ValidationOptions) -> Result<Self> {
        let report = validate_metric(space.matrix(), opts)?;
        if !report.passed {
            return Err(Error::InvalidSpace(Box::new(report)));
        }
        Ok(FiniteMetric(space))
    }

    /// Wraps a space without validation. Symmetry is still required.
    pub fn new_unchecked(space: FiniteQuasiMetric) -> Result<Self> {
        if !space.matrix().is_symmetric() {
            return Err(Error::Structural("metric matrix is not symmetric".into()));
        }
        Ok(FiniteMetric(space))
    }

    pub fn as_quasi(&self) -> &FiniteQuasiMetric {
        &self.0
    }

    pub fn into_quasi(self) -> FiniteQuasiMetric {
        self.0
    }
}

impl Deref for FiniteMetric {
    type Target = FiniteQuasiMetric;

    fn deref(&self) -> &FiniteQuasiMetric {
        &self.0
    }
}

/// The reverse quasi-metric `d'(x, y) = d(y, x)`.
pub fn reverse(q: &FiniteQuasiMetric) -> FiniteQuasiMetric {
    FiniteQuasiMetric::from_parts(q.labels.clone(), q.matrix.transpose())
}

/// `rho(x, y) = (d(x, y) + d(y, x)) / 2`.
pub fn symmetrize(q: &FiniteQuasiMetric) -> FiniteMetric {
    let d = &q.matrix;
    let m = Matrix::from_fn(d.n(), |i, j| (d.get(i, j) + d.get(j, i)) / 2.0);
    FiniteMetric(FiniteQuasiMetric::from_parts(q.labels.clone(), m))
}

/// `d*(x, y) = max(d(x, y), d(y, x))`.
pub fn max_metric(q: &FiniteQuasiMetric) -> FiniteMetric {
    let d = &q.matrix;
    let m = Matrix::from_fn(d.n(), |i, j| d.get(i, j).max(d.get(j, i)));
    FiniteMetric(FiniteQuasiMetric::from_parts(q.labels.clone(), m))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Three-point weighted space built from rho(x,y)=2, rho(y,z)=3,
    /// rho(x,z)=4 and w=(0,2,1).
    pub fn w3_rows() -> Vec<Vec<f64>> {
        vec![vec![0.0, 3.0, 4.5], vec![1.0, 0.0, 2.5], vec![3.5, 3.5, 0.0]]
    }

    pub fn w3() -> FiniteQuasiMetric {
        let labels = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        FiniteQuasiMetric::new(
            labels,
            Matrix::from_rows(&w3_rows()).unwrap(),
            &ValidationOptions::default(),
        )
        .unwrap()
    }
}
