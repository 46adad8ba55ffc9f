//! Quasi-Hausdorff distances between finite subsets.
//!
//! For a quasi-metric `q` and nonempty finite sets `A`, `B`:
//!
//! * forward  `sup_{a in A} inf_{b in B} q(a, b)`
//! * backward `sup_{b in B} inf_{a in A} q(a, b)`
//! * max      the larger of the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{max_metric, symmetrize, FiniteMetric, FiniteQuasiMetric};
use crate::weight::WeightedQuasiMetric;

/// Nonempty set of distinct point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PointSubset(Vec<usize>);

impl PointSubset {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Structural(format!("index {} repeated in subset", w[0])));
        }
        Ok(PointSubset(indices))
    }

    /// Like [`PointSubset::new`], additionally checking indices against `n`.
    pub fn within(indices: Vec<usize>, n: usize) -> Result<Self> {
        let s = Self::new(indices)?;
        s.check_range(n)?;
        Ok(s)
    }

    pub fn singleton(i: usize) -> Self {
        PointSubset(vec![i])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&i) if i >= n => Err(Error::IndexOutOfRange { index: i, n }),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for PointSubset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        PointSubset::new(v)
    }
}

impl From<PointSubset> for Vec<usize> {
    fn from(s: PointSubset) -> Vec<usize> {
        s.0
    }
}

fn check_sets(q: &FiniteQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<()> {
    a.check_range(q.n())?;
    b.check_range(q.n())
}

/// `q(a, B) = min_{b in B} q(a, b)`.
fn dist_to_set(q: &FiniteQuasiMetric, a: usize, b: &PointSubset) -> f64 {
    b.indices().iter().map(|&j| q.d(a, j)).fold(f64::INFINITY, f64::min)
}

/// `q(A, b) = min_{a in A} q(a, b)`.
fn dist_from_set(q: &FiniteQuasiMetric, a: &PointSubset, b: usize) -> f64 {
    a.indices().iter().map(|&i| q.d(i, b)).fold(f64::INFINITY, f64::min)
}

pub fn qh_forward(q: &FiniteQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    check_sets(q, a, b)?;
    Ok(a.indices().iter().map(|&i| dist_to_set(q, i, b)).fold(0.0, f64::max))
}

pub fn qh_backward(q: &FiniteQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    check_sets(q, a, b)?;
    Ok(b.indices().iter().map(|&j| dist_from_set(q, a, j)).fold(0.0, f64::max))
}

pub fn qh_max(q: &FiniteQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    Ok(qh_forward(q, a, b)?.max(qh_backward(q, a, b)?))
}

/// Classical Hausdorff distance under a metric.
pub fn hausdorff_metric(rho: &FiniteMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    qh_max(rho, a, b)
}

/// One-sided Hausdorff distance `sup_{a in A} rho(a, B)` under a metric.
pub fn hausdorff_forward_metric(rho: &FiniteMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    qh_forward(rho, a, b)
}

/// Comparison of the forward quasi-Hausdorff distance of a weighted space
/// with `H_rho(A, B) + (min_B w - max_A w) / 2`.
///
/// The `H_rho` term is evaluated under two readings: the one-sided
/// `sup_a rho(a, B)` and the symmetric Hausdorff metric. Residuals are
/// `forward - claimed`; neither is expected to vanish in general.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedFormula {
    pub forward: f64,
    pub rho_forward: f64,
    pub rho_symmetric: f64,
    pub weight_term: f64,
    pub residual_forward_rho: f64,
    pub residual_symmetric_rho: f64,
}

impl WeightedFormula {
    /// `forward <= H_rho` under the one-sided reading.
    pub fn bound_holds_forward_rho(&self) -> bool {
        self.forward <= self.rho_forward
    }

    pub fn bound_holds_symmetric_rho(&self) -> bool {
        self.forward <= self.rho_symmetric
    }
}

pub fn weighted_formula(qw: &WeightedQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<WeightedFormula> {
    let q = qw.space();
    let w = qw.weight();
    let forward = qh_forward(q, a, b)?;
    let rho = symmetrize(q);
    let rho_forward = hausdorff_forward_metric(&rho, a, b)?;
    let rho_symmetric = hausdorff_metric(&rho, a, b)?;
    let min_b = b.indices().iter().map(|&j| w[j]).fold(f64::INFINITY, f64::min);
    let max_a = a.indices().iter().map(|&i| w[i]).fold(f64::NEG_INFINITY, f64::max);
    let weight_term = 0.5 * (min_b - max_a);
    Ok(WeightedFormula {
        forward,
        rho_forward,
        rho_symmetric,
        weight_term,
        residual_forward_rho: forward - (rho_forward + weight_term),
        residual_symmetric_rho: forward - (rho_symmetric + weight_term),
    })
}

/// Residual of the weighted formula under the one-sided `H_rho` reading.
pub fn weighted_formula_residual(qw: &WeightedQuasiMetric, a: &PointSubset, b: &PointSubset) -> Result<f64> {
    Ok(weighted_formula(qw, a, b)?.residual_forward_rho)
}

/// Forward Hausdorff distance between `E(x)` and `E(y)` in
/// `X = M x [0, inf)` with `delta((u, xi), (v, eta)) = d*(u, v) + |xi - eta|`,
/// where `E(z) = {(u, eta) : d(u, z) <= eta}`.
///
/// The heights are eliminated in closed form: for fixed `u` the inner
/// infimum over `(z, zeta)` in `E(y)` is `min_z d*(u, z) + max(0, d(z, y) - xi)`,
/// nonincreasing in `xi`, so the outer supremum sits at `xi = d(u, x)`.
pub fn e_embedding_distance(q: &FiniteQuasiMetric, x: usize, y: usize) -> Result<f64> {
    let n = q.n();
    for i in [x, y] {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
    }
    let dstar = max_metric(q);
    let mut sup = 0.0f64;
    for u in 0..n {
        let xi = q.d(u, x);
        let inner = (0..n)
            .map(|z| dstar.d(u, z) + (q.d(z, y) - xi).max(0.0))
            .fold(f64::INFINITY, f64::min);
        sup = sup.max(inner);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::w3;
    use crate::space::{Matrix, ValidationOptions};
    use crate::weight::compose;

    fn set(v: &[usize]) -> PointSubset {
        PointSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn w3_quasi_hausdorff() {
        let q = w3();
        let (a, b) = (set(&[0]), set(&[1, 2]));
        assert_eq!(qh_forward(&q, &a, &b).unwrap(), 3.0);
        // backward: y <- x = 3, z <- x = 4.5
        assert_eq!(qh_backward(&q, &a, &b).unwrap(), 4.5);
        assert_eq!(qh_max(&q, &a, &b).unwrap(), 4.5);
    }

    #[test]
    fn equal_and_nested_sets() {
        let q = w3();
        let a = set(&[0, 2]);
        assert_eq!(qh_max(&q, &a, &a).unwrap(), 0.0);
        let b = set(&[0, 1, 2]);
        assert_eq!(qh_forward(&q, &a, &b).unwrap(), 0.0);
        assert!(qh_backward(&q, &a, &b).unwrap() > 0.0);
    }

    #[test]
    fn rho_hausdorff() {
        let rho = w3().symmetrize();
        assert_eq!(hausdorff_metric(&rho, &set(&[0]), &set(&[1, 2])).unwrap(), 4.0);
        assert_eq!(hausdorff_metric(&rho, &set(&[1, 2]), &set(&[1, 2])).unwrap(), 0.0);
        assert_eq!(hausdorff_metric(&rho, &set(&[0]), &set(&[1])).unwrap(), 2.0);
    }

    #[test]
    fn weighted_formula_gap_on_w3() {
        let rho = w3().symmetrize();
        let qw = compose(&rho, &[0.0, 2.0, 1.0], &ValidationOptions::default()).unwrap();
        let f = weighted_formula(&qw, &set(&[0]), &set(&[1, 2])).unwrap();
        assert_eq!(f.forward, 3.0);
        assert_eq!(f.rho_forward + f.weight_term, 2.5);
        assert_eq!(f.residual_forward_rho, 0.5);
        assert!(!f.bound_holds_forward_rho());

        let flat = compose(&rho, &[1.0, 1.0, 1.0], &ValidationOptions::default()).unwrap();
        assert_eq!(
            weighted_formula_residual(&flat, &set(&[0]), &set(&[1, 2])).unwrap(),
            0.0
        );
        assert_eq!(weighted_formula_residual(&qw, &set(&[2]), &set(&[1])).unwrap(), 0.0);
    }

    #[test]
    fn e_embedding_reproduces_w3() {
        let q = w3();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(e_embedding_distance(&q, x, y).unwrap(), q.d(x, y));
            }
        }
    }

    #[test]
    fn subset_errors() {
        assert!(matches!(PointSubset::new(vec![]), Err(Error::EmptySubset)));
        assert!(PointSubset::new(vec![1, 1]).is_err());
        let q = FiniteQuasiMetric::from_matrix(
            Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            &ValidationOptions::default(),
        )
        .unwrap();
        assert!(matches!(
            qh_forward(&q, &set(&[0]), &set(&[5])),
            Err(Error::IndexOutOfRange { index: 5, n: 2 })
        ));
        let parsed: std::result::Result<PointSubset, _> = serde_json::from_str("[]");
        assert!(parsed.is_err());
    }
}
