//! Weighted quasi-metrics.
//!
//! A quasi-metric `d` is weightable when some `w` satisfies
//! `d(x,y) + w(x) = d(y,x) + w(y)`. Equivalently the perimeter of every
//! triangle is the same in both orientations, and then
//! `d(x,y) = rho(x,y) + (w(y) - w(x)) / 2` with `rho` the symmetrization.
//!
//! This module detects weightability, recovers the weight from a basepoint,
//! and builds weighted spaces from a metric plus weight (`compose`), from a
//! Lipschitz function (`graph_space`) and through the bundle `S x [0, inf)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{
    symmetrize, validate_quasi_metric, Axiom, FiniteMetric, FiniteQuasiMetric, Matrix, ReportBuilder,
    ValidationOptions, ValidationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterCheck {
    pub holds: bool,
    pub max_residual: f64,
    /// Triple `(i, j, k)` whose loop `i -> j -> k -> i` has the largest
    /// orientation gap.
    pub worst_triple: [usize; 3],
    pub tol: f64,
}

/// `D[i][j] + D[j][k] + D[k][i] - D[i][k] - D[k][j] - D[j][i]`.
#[inline]
pub fn perimeter_gap(d: &Matrix, i: usize, j: usize, k: usize) -> f64 {
    (d.get(i, j) + d.get(j, k) + d.get(k, i)) - (d.get(i, k) + d.get(k, j) + d.get(j, i))
}

/// Orientation independence of triangle perimeters over all triples.
///
/// The gap changes sign under reversal and is invariant under rotation, so
/// scanning `i < j < k` covers every ordered triple.
pub fn check_perimeter_identity(q: &FiniteQuasiMetric, opts: &ValidationOptions) -> PerimeterCheck {
    let d = q.matrix();
    let n = d.n();
    let tol = opts.effective_tol(d.max_abs());
    let mut max_residual = 0.0;
    let mut worst = [0, 1.min(n.saturating_sub(1)), 2.min(n.saturating_sub(1))];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let r = perimeter_gap(d, i, j, k).abs();
                if r > max_residual {
                    max_residual = r;
                    worst = [i, j, k];
                }
            }
        }
    }
    PerimeterCheck {
        holds: max_residual <= tol,
        max_residual,
        worst_triple: worst,
        tol,
    }
}

/// A real-valued weight together with the basepoint it was recovered from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedWeight {
    pub w: Vec<f64>,
    pub basepoint: usize,
}

impl GeneralizedWeight {
    /// Shifted so the minimum is zero.
    pub fn normalized(&self) -> Vec<f64> {
        normalize_weight(&self.w)
    }
}

/// `w_a(i) = D[a][i] - D[i][a]` without checking that `q` is weightable.
pub fn weight_from_basepoint(q: &FiniteQuasiMetric, a: usize) -> Result<GeneralizedWeight> {
    if a >= q.n() {
        return Err(Error::IndexOutOfRange { index: a, n: q.n() });
    }
    let w = (0..q.n()).map(|i| q.d(a, i) - q.d(i, a)).collect();
    Ok(GeneralizedWeight { w, basepoint: a })
}

/// Recovers a generalized weight, failing with the worst triple when the
/// perimeter identity does not hold.
pub fn recover_weight(q: &FiniteQuasiMetric, a: usize, opts: &ValidationOptions) -> Result<GeneralizedWeight> {
    let check = check_perimeter_identity(q, opts);
    if !check.holds {
        return Err(Error::NotWeightable {
            triple: check.worst_triple,
            residual: check.max_residual,
        });
    }
    weight_from_basepoint(q, a)
}

pub fn normalize_weight(w: &[f64]) -> Vec<f64> {
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return w.to_vec();
    }
    w.iter().map(|v| v - min).collect()
}

/// Largest `|D[i][j] + w[i] - D[j][i] - w[j]|` and the pair attaining it.
pub fn weightability_residual(d: &Matrix, w: &[f64]) -> (f64, (usize, usize)) {
    let n = d.n();
    let mut worst = (0.0, (0, 0));
    for i in 0..n {
        for j in i + 1..n {
            let r = ((d.get(i, j) + w[i]) - (d.get(j, i) + w[j])).abs();
            if r > worst.0 {
                worst = (r, (i, j));
            }
        }
    }
    worst
}

/// Checks `1/2 |w[i] - w[j]| <= rho[i][j]` (strictly, unless weak separation
/// is allowed) and returns the worst pair on failure.
fn check_lipschitz(rho: &Matrix, half_w: impl Fn(usize) -> f64, opts: &ValidationOptions, tol: f64) -> Result<()> {
    let n = rho.n();
    let mut worst: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (half_w(i) - half_w(j)).abs();
            let r = rho.get(i, j);
            let excess = gap - r;
            let violated = if opts.weak_separation {
                excess > tol
            } else {
                excess >= -tol
            };
            if violated && worst.is_none_or(|(e, _, _)| excess > e) {
                worst = Some((excess, i, j));
            }
        }
    }
    match worst {
        Some((_, i, j)) => Err(Error::Lipschitz {
            pair: (i, j),
            half_gap: (half_w(i) - half_w(j)).abs(),
            rho: rho.get(i, j),
        }),
        None => Ok(()),
    }
}

fn check_weight_vector(w: &[f64], n: usize, what: &str) -> Result<()> {
    if w.len() != n {
        return Err(Error::Structural(format!(
            "{what} has {} entries for {n} points",
            w.len()
        )));
    }
    if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Structural(format!(
            "{what}[{i}] = {} must be finite and nonnegative",
            w[i]
        )));
    }
    Ok(())
}

/// A quasi-metric space together with a nonnegative weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuasiMetric {
    space: FiniteQuasiMetric,
    weight: Vec<f64>,
}

impl WeightedQuasiMetric {
    /// Validates the quasi-metric axioms, weightability and the Lipschitz
    /// bound `1/2 |w(x) - w(y)| <= rho(x, y)`.
    pub fn new(space: FiniteQuasiMetric, weight: Vec<f64>, opts: &ValidationOptions) -> Result<Self> {
        check_weight_vector(&weight, space.n(), "weight")?;
        let report = validate_quasi_metric(space.matrix(), opts)?;
        if !report.passed {
            return Err(Error::InvalidSpace(Box::new(report)));
        }
        let scale = space
            .matrix()
            .max_abs()
            .max(weight.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
        let tol = opts.effective_tol(scale);
        let (r, (i, j)) = weightability_residual(space.matrix(), &weight);
        if r > tol {
            let mut builder = ReportBuilder::new(tol);
            builder.observe(Axiom::WeightTransport, &[i, j], r, true);
            return Err(Error::InvalidSpace(Box::new(builder.finish())));
        }
        let rho = symmetrize(&space);
        check_lipschitz(rho.matrix(), |i| weight[i] / 2.0, &opts.weak(true), tol)?;
        Ok(WeightedQuasiMetric { space, weight })
    }

    /// No checks beyond matching lengths. Used to probe `check_embedding`
    /// with deliberately broken data.
    pub fn new_unchecked(space: FiniteQuasiMetric, weight: Vec<f64>) -> Result<Self> {
        if weight.len() != space.n() {
            return Err(Error::Structural(format!(
                "weight has {} entries for {} points",
                weight.len(),
                space.n()
            )));
        }
        Ok(WeightedQuasiMetric { space, weight })
    }

    pub fn space(&self) -> &FiniteQuasiMetric {
        &self.space
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn into_parts(self) -> (FiniteQuasiMetric, Vec<f64>) {
        (self.space, self.weight)
    }
}

/// `d(x, y) = rho(x, y) + (w(y) - w(x)) / 2`.
pub fn compose(rho: &FiniteMetric, w: &[f64], opts: &ValidationOptions) -> Result<WeightedQuasiMetric> {
    let n = rho.n();
    check_weight_vector(w, n, "weight")?;
    let r = rho.matrix();
    let scale = r.max_abs().max(w.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
    check_lipschitz(r, |i| w[i] / 2.0, opts, opts.effective_tol(scale))?;
    let d = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { r.get(i, j) + 0.5 * (w[j] - w[i]) });
    let space = FiniteQuasiMetric::from_parts(rho.raw_labels().cloned(), d);
    let report = validate_quasi_metric(space.matrix(), opts)?;
    if !report.passed {
        return Err(Error::InvalidSpace(Box::new(report)));
    }
    Ok(WeightedQuasiMetric {
        space,
        weight: w.to_vec(),
    })
}

/// Splits a weighted space into its symmetrization and its weight.
pub fn decompose(qw: &WeightedQuasiMetric) -> (FiniteMetric, Vec<f64>) {
    (symmetrize(&qw.space), qw.weight.clone())
}

/// A point `(x, xi)` of the bundle `S x [0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint {
    pub base: usize,
    pub height: f64,
}

impl BundlePoint {
    pub fn new(base: usize, height: f64) -> Self {
        BundlePoint { base, height }
    }

    /// `W(u) = 2 xi`.
    pub fn weight(&self) -> f64 {
        2.0 * self.height
    }
}

/// `Q(u, v) = d(x, y) + eta - xi`. Negative values are legal: the bundle is
/// a generalized weighted quasi-metric space.
pub fn bundle_distance(rho: &FiniteMetric, u: BundlePoint, v: BundlePoint) -> f64 {
    rho.d(u.base, v.base) + v.height - u.height
}

/// The graph of a 1-Lipschitz `f >= 0`: `Q(i, j) = rho(i, j) + f(j) - f(i)`
/// with weight `W(i) = 2 f(i)`.
pub fn graph_space(rho: &FiniteMetric, f: &[f64], opts: &ValidationOptions) -> Result<WeightedQuasiMetric> {
    let n = rho.n();
    check_weight_vector(f, n, "f")?;
    let r = rho.matrix();
    let scale = r.max_abs().max(f.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
    check_lipschitz(r, |i| f[i], opts, opts.effective_tol(scale))?;
    let d = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { r.get(i, j) + f[j] - f[i] });
    let space = FiniteQuasiMetric::from_parts(rho.raw_labels().cloned(), d);
    let report = validate_quasi_metric(space.matrix(), opts)?;
    if !report.passed {
        return Err(Error::InvalidSpace(Box::new(report)));
    }
    Ok(WeightedQuasiMetric {
        space,
        weight: f.iter().map(|v| 2.0 * v).collect(),
    })
}

/// Verifies that `phi(i) = (i, w[i] / 2)` embeds `qw` isometrically into the
/// bundle over its symmetrization: `Q(phi(i), phi(j)) = D[i][j]` and
/// `W(phi(i)) = w[i]`.
pub fn check_embedding(qw: &WeightedQuasiMetric, opts: &ValidationOptions) -> ValidationReport {
    let q = &qw.space;
    let w = &qw.weight;
    let rho = symmetrize(q);
    let n = q.n();
    let scale = q.matrix().max_abs().max(w.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
    let tol = opts.effective_tol(scale);
    let phi: Vec<BundlePoint> = (0..n).map(|i| BundlePoint::new(i, 0.5 * w[i])).collect();
    let mut builder = ReportBuilder::new(tol);
    for i in 0..n {
        let r = (phi[i].weight() - w[i]).abs();
        builder.observe(Axiom::WeightTransport, &[i], r, r > tol);
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = (bundle_distance(&rho, phi[i], phi[j]) - q.d(i, j)).abs();
            builder.observe(Axiom::Isometry, &[i, j], r, r > tol);
        }
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::{w3, w3_rows};

    fn opts() -> ValidationOptions {
        ValidationOptions::default()
    }

    fn w3_rho() -> FiniteMetric {
        let m = Matrix::from_rows(&[vec![0.0, 2.0, 4.0], vec![2.0, 0.0, 3.0], vec![4.0, 3.0, 0.0]]).unwrap();
        FiniteMetric::new(vec!["x".into(), "y".into(), "z".into()], m, &opts()).unwrap()
    }

    #[test]
    fn w3_perimeter_holds() {
        let rows = w3_rows();
        let forward = rows[0][1] + rows[1][2] + rows[2][0];
        let backward = rows[0][2] + rows[2][1] + rows[1][0];
        assert_eq!((forward, backward), (9.0, 9.0));
        let check = check_perimeter_identity(&w3(), &opts());
        assert!(check.holds);
        assert_eq!(check.max_residual, 0.0);
    }

    #[test]
    fn perturbed_w3_fails_at_xyz() {
        let mut m = w3().into_matrix();
        m.set(0, 1, 3.2);
        let q = FiniteQuasiMetric::new_unchecked(None, m).unwrap();
        let check = check_perimeter_identity(&q, &opts());
        assert!(!check.holds);
        assert!((check.max_residual - 0.2).abs() < 1e-12);
        assert_eq!(check.worst_triple, [0, 1, 2]);
        match recover_weight(&q, 0, &opts()) {
            Err(Error::NotWeightable { triple, .. }) => assert_eq!(triple, [0, 1, 2]),
            other => panic!("expected NotWeightable, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_metric_has_zero_weight() {
        let rho = w3_rho();
        let check = check_perimeter_identity(&rho, &opts());
        assert!(check.holds);
        assert_eq!(check.max_residual, 0.0);
        for a in 0..3 {
            assert_eq!(recover_weight(&rho, a, &opts()).unwrap().w, vec![0.0; 3]);
        }
    }

    #[test]
    fn recover_w3_weights() {
        let gx = recover_weight(&w3(), 0, &opts()).unwrap();
        assert_eq!(gx.w, vec![0.0, 2.0, 1.0]);
        let gy = recover_weight(&w3(), 1, &opts()).unwrap();
        assert_eq!(gy.w, vec![-2.0, 0.0, -1.0]);
        for i in 0..3 {
            assert_eq!(gy.w[i] - gx.w[i], -2.0);
        }
        assert_eq!(gy.normalized(), vec![0.0, 2.0, 1.0]);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_weight(&[-2.0, 0.0, -1.0]), vec![0.0, 2.0, 1.0]);
        assert_eq!(normalize_weight(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(normalize_weight(&[5.0, 7.0, 6.0]), vec![0.0, 2.0, 1.0]);
    }

    #[test]
    fn compose_reproduces_w3() {
        let qw = compose(&w3_rho(), &[0.0, 2.0, 1.0], &opts()).unwrap();
        assert_eq!(qw.space().matrix(), w3().matrix());
        assert_eq!(qw.space().labels(), vec!["x", "y", "z"]);
        let (rho, w) = decompose(&qw);
        assert_eq!(rho, w3_rho());
        assert_eq!(w, vec![0.0, 2.0, 1.0]);
        assert!(WeightedQuasiMetric::new(qw.space().clone(), w, &opts()).is_ok());
    }

    #[test]
    fn compose_constant_weight_is_identity() {
        let qw = compose(&w3_rho(), &[3.0, 3.0, 3.0], &opts()).unwrap();
        assert_eq!(qw.space().matrix(), w3_rho().matrix());
    }

    #[test]
    fn compose_rejects_lipschitz_violation() {
        let rho =
            FiniteMetric::from_matrix(Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), &opts()).unwrap();
        match compose(&rho, &[0.0, 4.0], &opts()) {
            Err(Error::Lipschitz { pair, half_gap, rho }) => {
                assert_eq!(pair, (0, 1));
                assert_eq!((half_gap, rho), (2.0, 1.0));
            }
            other => panic!("expected Lipschitz error, got {other:?}"),
        }
    }

    #[test]
    fn compose_equality_case_depends_on_separation_mode() {
        let rho =
            FiniteMetric::from_matrix(Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), &opts()).unwrap();
        assert!(matches!(
            compose(&rho, &[0.0, 2.0], &opts()),
            Err(Error::Lipschitz { .. })
        ));
        let qw = compose(&rho, &[0.0, 2.0], &opts().weak(true)).unwrap();
        assert_eq!(qw.space().d(1, 0), 0.0);
        assert_eq!(qw.space().d(0, 1), 2.0);
    }

    #[test]
    fn bundle_distances() {
        let rho = w3_rho();
        assert_eq!(
            bundle_distance(&rho, BundlePoint::new(0, 1.0), BundlePoint::new(1, 3.0)),
            4.0
        );
        let u = BundlePoint::new(2, 0.7);
        assert_eq!(bundle_distance(&rho, u, u), 0.0);
        assert_eq!(u.weight(), 1.4);
        let unit =
            FiniteMetric::from_matrix(Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), &opts()).unwrap();
        let d = bundle_distance(&unit, BundlePoint::new(0, 5.0), BundlePoint::new(1, 0.0));
        assert_eq!(d, -4.0);
    }

    #[test]
    fn graph_space_matches_compose() {
        let g = graph_space(&w3_rho(), &[0.0, 1.0, 0.5], &opts()).unwrap();
        assert_eq!(g.space().matrix(), w3().matrix());
        assert_eq!(g.weight(), &[0.0, 2.0, 1.0]);

        let flat = graph_space(&w3_rho(), &[0.0; 3], &opts()).unwrap();
        assert_eq!(flat.space().matrix(), w3_rho().matrix());
        assert_eq!(flat.weight(), &[0.0; 3]);

        let unit =
            FiniteMetric::from_matrix(Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), &opts()).unwrap();
        assert!(matches!(
            graph_space(&unit, &[0.0, 3.0], &opts()),
            Err(Error::Lipschitz { .. })
        ));
    }

    #[test]
    fn embedding_w3_and_corrupted_weight() {
        let qw = compose(&w3_rho(), &[0.0, 2.0, 1.0], &opts()).unwrap();
        let report = check_embedding(&qw, &opts());
        assert!(report.passed);
        assert_eq!(report.max_residual, 0.0);

        let flat = WeightedQuasiMetric::new(w3_rho().into_quasi(), vec![0.0; 3], &opts()).unwrap();
        assert!(check_embedding(&flat, &opts()).passed);

        let broken = WeightedQuasiMetric::new_unchecked(w3(), vec![0.0, 2.1, 1.0]).unwrap();
        let report = check_embedding(&broken, &opts());
        assert!(!report.passed);
        let v = report.violation(Axiom::Isometry).unwrap();
        assert!(v.witness.contains(&1));
        assert!((v.residual - 0.05).abs() < 1e-12);
        // Pairs (0,1), (1,0), (1,2), (2,1).
        assert_eq!(v.count, 4);
    }

    #[test]
    fn weighted_new_rejects_wrong_weight() {
        let err = WeightedQuasiMetric::new(w3(), vec![0.0, 1.0, 1.0], &opts()).unwrap_err();
        assert!(matches!(err, Error::InvalidSpace(_)));
        assert!(WeightedQuasiMetric::new(w3(), vec![0.0, 2.0, 1.0], &opts()).is_ok());
        assert!(WeightedQuasiMetric::new(w3(), vec![5.0, 7.0, 6.0], &opts()).is_ok());
    }
}
