//! Asymmetric distances: finite quasi-metric spaces, weighted quasi-metrics,
//! Randers distance fields on 2D grids and quasi-Hausdorff distances.
//!
//! * [`space`]: quasi-metric axioms, reverse, symmetrization, max-metric.
//! * [`weight`]: weightability via the perimeter identity, weight recovery,
//!   the `rho + (w(y) - w(x)) / 2` decomposition and bundle embeddings.
//! * [`randers`]: grid discretization of `F = alpha + beta` and Dijkstra
//!   distance fields, with checks of the exact-form splitting.
//! * [`hausdorff`]: forward, backward and max quasi-Hausdorff distances.
//! * [`cli`]: the `quasimetric` command-line driver.

pub mod cli;
pub mod error;
pub mod hausdorff;
pub mod io;
pub mod randers;
pub mod space;
pub mod weight;

pub use error::{Error, Result};
pub use hausdorff::{
    e_embedding_distance, hausdorff_metric, qh_backward, qh_forward, qh_max, weighted_formula,
    weighted_formula_residual, PointSubset, WeightedFormula,
};
pub use space::{
    max_metric, reverse, symmetrize, validate_metric, validate_quasi_metric, Axiom, FiniteMetric, FiniteQuasiMetric,
    Matrix, ValidationOptions, ValidationReport, Violation,
};
pub use weight::{
    bundle_distance, check_embedding, check_perimeter_identity, compose, decompose, graph_space, normalize_weight,
    recover_weight, weight_from_basepoint, weightability_residual, BundlePoint, GeneralizedWeight, PerimeterCheck,
    WeightedQuasiMetric,
};
