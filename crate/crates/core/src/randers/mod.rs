//! Randers distance fields on masked 2D grids.
//!
//! A Randers norm is `F(x, v) = alpha_x(v) + beta_x(v)` with `alpha` a
//! Riemannian metric and `beta` a one-form of `alpha`-norm below one. The
//! induced distance is asymmetric; when `beta = df` it splits as
//! `d_F(x, y) = d_alpha(x, y) + f(y) - f(x)`.
//!
//! The grid engine connects active nodes with a fixed stencil, weights each
//! edge by the discretized Randers length and runs Dijkstra.

pub mod checks;
pub mod domain;
pub mod field;
pub mod graph;
pub mod solve;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    busemann_mayer_estimate, check_randers_decomposition, perimeter_defect, recover_grid_weight, BusemannMayer,
    DecompositionCheck, PerimeterDefect, WeightSample,
};
pub use domain::{BoundingBox, GridDomain, Mask};
pub use field::{CovectorField, MetricField, OneForm, ScalarField};
pub use graph::{build_graph, Graph, Stencil};
pub use solve::{backward_distances, forward_distances, Direction, DistanceField};

pub const DEFAULT_POSITIVITY_MARGIN: f64 = 1e-6;

/// Grid domain, Riemannian metric field and one-form.
#[derive(Debug, Clone)]
pub struct RandersStructure {
    pub domain: GridDomain,
    pub alpha: MetricField,
    pub beta: OneForm,
}

impl RandersStructure {
    /// Checks that `alpha` is symmetric positive definite at every active node.
    pub fn new(domain: GridDomain, alpha: MetricField, beta: OneForm) -> Result<Self> {
        for node in 0..domain.active_count() {
            let p = domain.coords(node);
            if let Err(reason) = alpha.check_spd(p) {
                return Err(Error::Evaluation {
                    node,
                    x: p[0],
                    y: p[1],
                    reason,
                });
            }
        }
        Ok(RandersStructure { domain, alpha, beta })
    }

    /// Same domain and metric with `beta = 0`.
    pub fn without_beta(&self) -> RandersStructure {
        RandersStructure {
            domain: self.domain.clone(),
            alpha: self.alpha.clone(),
            beta: OneForm::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub holds: bool,
    /// `sup |b|_alpha` over active nodes.
    pub sup: f64,
    pub worst_node: usize,
}

/// `F = alpha + beta` is positive definite iff `|b|_alpha < 1`; this checks
/// `sup |b|_alpha < 1 - margin` over active nodes.
pub fn check_positivity(rs: &RandersStructure, margin: f64) -> Result<PositivityCheck> {
    let domain = &rs.domain;
    let mut sup = 0.0;
    let mut worst_node = 0;
    for node in 0..domain.active_count() {
        let p = domain.coords(node);
        let b = rs.beta.covector(p);
        let norm = rs.alpha.dual_norm(p, b);
        if !norm.is_finite() {
            return Err(Error::Evaluation {
                node,
                x: p[0],
                y: p[1],
                reason: format!("one-form evaluates to {b:?}"),
            });
        }
        if norm > sup {
            sup = norm;
            worst_node = node;
        }
    }
    Ok(PositivityCheck {
        holds: sup < 1.0 - margin,
        sup,
        worst_node,
    })
}

/// Central-difference estimate of `max |d_1 b_2 - d_2 b_1|` over nodes whose
/// four axis neighbours are active. Exact forms report zero.
pub fn check_closedness(rs: &RandersStructure) -> f64 {
    let OneForm::Components(b) = &rs.beta else {
        return 0.0;
    };
    let domain = &rs.domain;
    let (hx, hy) = domain.spacing();
    let mut worst = 0.0f64;
    for node in 0..domain.active_count() {
        let (i, j) = domain.cell(node);
        let (i, j) = (i as isize, j as isize);
        let (Some(e), Some(w), Some(n), Some(s)) = (
            domain.node_at(i + 1, j),
            domain.node_at(i - 1, j),
            domain.node_at(i, j + 1),
            domain.node_at(i, j - 1),
        ) else {
            continue;
        };
        let d1b2 = (b.value(domain.coords(e))[1] - b.value(domain.coords(w))[1]) / (2.0 * hx);
        let d2b1 = (b.value(domain.coords(n))[0] - b.value(domain.coords(s))[0]) / (2.0 * hy);
        worst = worst.max((d1b2 - d2b1).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(beta: OneForm) -> RandersStructure {
        RandersStructure::new(GridDomain::unit_square(21).unwrap(), MetricField::Euclidean, beta).unwrap()
    }

    #[test]
    fn positivity_constant_forms() {
        let ok = check_positivity(&square(OneForm::Components(CovectorField::Constant([0.5, 0.0]))), 1e-6).unwrap();
        assert!(ok.holds);
        assert!((ok.sup - 0.5).abs() < 1e-15);
        let bad = check_positivity(&square(OneForm::Components(CovectorField::Constant([1.2, 0.0]))), 1e-6).unwrap();
        assert!(!bad.holds);
        let rs = square(OneForm::Components(CovectorField::Constant([1.2, 0.0])));
        assert!(matches!(
            build_graph(&rs, Stencil::Sixteen),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn positivity_dtheta_on_annulus() {
        let rs = RandersStructure::new(
            GridDomain::annulus(1.5, 3.0, 121).unwrap(),
            MetricField::Euclidean,
            OneForm::Components(CovectorField::DTheta { lambda: 0.5 }),
        )
        .unwrap();
        let c = check_positivity(&rs, 1e-6).unwrap();
        assert!(c.holds);
        // |lambda dtheta| = lambda / r, largest on the inner rim.
        assert!((c.sup - 0.5 / 1.5).abs() < 1e-9, "sup = {}", c.sup);
        let p = rs.domain.coords(c.worst_node);
        assert!((p[0].hypot(p[1]) - 1.5).abs() < 1e-9);
    }

    #[test]
    fn closedness() {
        let exact = square(OneForm::Potential(ScalarField::Linear { cx: 0.3, cy: 0.1 }));
        assert_eq!(check_closedness(&exact), 0.0);

        let shear = square(OneForm::Components(CovectorField::custom(|p| [0.0, p[0]])));
        assert!((check_closedness(&shear) - 1.0).abs() < 1e-12);

        let coarse = RandersStructure::new(
            GridDomain::annulus(1.5, 3.0, 61).unwrap(),
            MetricField::Euclidean,
            OneForm::Components(CovectorField::DTheta { lambda: 0.5 }),
        )
        .unwrap();
        let fine = RandersStructure::new(
            GridDomain::annulus(1.5, 3.0, 121).unwrap(),
            MetricField::Euclidean,
            OneForm::Components(CovectorField::DTheta { lambda: 0.5 }),
        )
        .unwrap();
        let (rc, rf) = (check_closedness(&coarse), check_closedness(&fine));
        // Second order: halving h divides the residual by about four.
        assert!(rf < 1e-2 && rf < rc / 3.0, "coarse {rc}, fine {rf}");
    }

    #[test]
    fn rejects_indefinite_metric() {
        let err = RandersStructure::new(
            GridDomain::unit_square(5).unwrap(),
            MetricField::Diagonal(1.0, 0.0),
            OneForm::Zero,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Evaluation { node: 0, .. }));
    }
}
