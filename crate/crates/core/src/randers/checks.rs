//! Numerical checks of the Randers splitting on the grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::{build_graph, Graph, Stencil};
use super::solve::{backward_distances, forward_distances};
use super::RandersStructure;
use crate::error::{Error, Result};

fn require_potential(rs: &RandersStructure, what: &str) -> Result<()> {
    if rs.beta.potential().is_none() {
        return Err(Error::Domain(format!("{what} needs a potential one-form")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    /// `max |d_F(x,y) - d_alpha(x,y) - (f(y) - f(x))|`.
    pub max_residual: f64,
    pub worst_pair: (usize, usize),
    pub pairs: usize,
}

/// Compares `d_F` on the full graph with `d_alpha` on the `beta`-free graph
/// over the sampled `(x, y)` pairs.
pub fn check_randers_decomposition(
    rs: &RandersStructure,
    stencil: Stencil,
    pairs: &[(usize, usize)],
) -> Result<DecompositionCheck> {
    require_potential(rs, "the Randers decomposition check")?;
    let f = rs.beta.potential().unwrap();
    let full = build_graph(rs, stencil)?;
    let bare = build_graph(&rs.without_beta(), stencil)?;

    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in pairs {
        by_source.entry(x).or_default().push(y);
    }
    let mut worst = DecompositionCheck {
        max_residual: 0.0,
        worst_pair: pairs.first().copied().unwrap_or((0, 0)),
        pairs: pairs.len(),
    };
    for (x, targets) in by_source {
        let df = forward_distances(&full, x)?;
        let d0 = forward_distances(&bare, x)?;
        let fx = f.value(rs.domain.coords(x));
        for y in targets {
            let fy = f.value(rs.domain.coords(y));
            let r = (df.value(y) - d0.value(y) - (fy - fx)).abs();
            if r > worst.max_residual || r.is_nan() {
                worst.max_residual = r;
                worst.worst_pair = (x, y);
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSample {
    pub node: usize,
    /// `d_F(a, x) - d_F(x, a)`.
    pub weight: f64,
    /// `2 (f(x) - f(a))`.
    pub expected: f64,
    pub residual: f64,
}

/// Grid version of `w_a(x) = d_F(a, x) - d_F(x, a)`, compared with `2 (f(x) - f(a))`.
pub fn recover_grid_weight(
    rs: &RandersStructure,
    graph: &Graph,
    basepoint: usize,
    samples: &[usize],
) -> Result<Vec<WeightSample>> {
    require_potential(rs, "grid weight recovery")?;
    let f = rs.beta.potential().unwrap();
    let from_a = forward_distances(graph, basepoint)?;
    let to_a = backward_distances(graph, basepoint)?;
    let fa = f.value(rs.domain.coords(basepoint));
    Ok(samples
        .iter()
        .map(|&x| {
            let weight = from_a.value(x) - to_a.value(x);
            let expected = 2.0 * (f.value(rs.domain.coords(x)) - fa);
            WeightSample {
                node: x,
                weight,
                expected,
                residual: (weight - expected).abs(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterDefect {
    pub triple: [usize; 3],
    /// `d(x,y) + d(y,z) + d(z,x)`.
    pub forward: f64,
    /// `d(x,z) + d(z,y) + d(y,x)`.
    pub backward: f64,
    pub defect: f64,
}

/// Orientation gap of the geodesic triangle through three nodes.
pub fn perimeter_defect(graph: &Graph, triple: [usize; 3]) -> Result<PerimeterDefect> {
    let [x, y, z] = triple;
    let dx = forward_distances(graph, x)?;
    let dy = forward_distances(graph, y)?;
    let dz = forward_distances(graph, z)?;
    let forward = dx.value(y) + dy.value(z) + dz.value(x);
    let backward = dx.value(z) + dz.value(y) + dy.value(x);
    if !(forward.is_finite() && backward.is_finite()) {
        return Err(Error::Domain(format!("nodes {triple:?} are not mutually reachable")));
    }
    Ok(PerimeterDefect {
        triple,
        forward,
        backward,
        defect: forward - backward,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub t: f64,
    pub node: usize,
    /// `d_F(p, q) / t`.
    pub outward: f64,
    /// `d_F(q, p) / t`, the estimate of `F(p, -v)`.
    pub inward: f64,
}

/// Estimates of `F(p, v)` from `d_F(p, p + t v) / t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannMayer {
    pub samples: Vec<RaySample>,
    /// Value at the smallest radius.
    pub smallest: f64,
    /// Linear extrapolation to `t = 0` from the two smallest radii.
    pub richardson: f64,
    /// Extrapolated `F(p, -v)`.
    pub reverse: f64,
    /// `(F(p, v) + F(p, -v)) / 2`.
    pub symmetric_part: f64,
    /// `(F(p, v) - F(p, -v)) / 2`.
    pub beta_part: f64,
}

/// Default radii, in units of the grid spacing.
pub const DEFAULT_RADII: [f64; 3] = [4.0, 8.0, 16.0];

/// Recovers `F(p, v)` and its even/odd parts from distances along the ray
/// `p + t v`. `radii` are absolute lengths; each ray point is snapped to
/// the nearest active node and `t` is replaced by the actual node offset.
pub fn busemann_mayer_estimate(
    rs: &RandersStructure,
    graph: &Graph,
    p: usize,
    v: [f64; 2],
    radii: &[f64],
) -> Result<BusemannMayer> {
    let speed = v[0].hypot(v[1]);
    if speed.is_nan() || speed <= 0.0 || radii.is_empty() {
        return Err(Error::Domain("need a nonzero direction and at least one radius".into()));
    }
    let unit = [v[0] / speed, v[1] / speed];
    let origin = rs.domain.coords(p);
    let from_p = forward_distances(graph, p)?;
    let to_p = backward_distances(graph, p)?;

    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let mut samples = Vec::with_capacity(radii.len());
    for t in radii {
        let target = [origin[0] + t * unit[0], origin[1] + t * unit[1]];
        let node = rs
            .domain
            .nearest_node(target)
            .ok_or(Error::RayExitsMask { node: p, t })?;
        let q = rs.domain.coords(node);
        let t_eff = (q[0] - origin[0]).hypot(q[1] - origin[1]);
        if t_eff == 0.0 {
            return Err(Error::Domain(format!("radius {t} is below the grid spacing")));
        }
        samples.push(RaySample {
            t: t_eff,
            node,
            outward: speed * from_p.value(node) / t_eff,
            inward: speed * to_p.value(node) / t_eff,
        });
    }

    let extrapolate = |get: fn(&RaySample) -> f64| -> f64 {
        match samples.as_slice() {
            [only] => get(only),
            [a, b, ..] => (b.t * get(a) - a.t * get(b)) / (b.t - a.t),
            [] => unreachable!(),
        }
    };
    let forward = extrapolate(|s| s.outward);
    let reverse = extrapolate(|s| s.inward);
    Ok(BusemannMayer {
        smallest: samples[0].outward,
        richardson: forward,
        reverse,
        symmetric_part: 0.5 * (forward + reverse),
        beta_part: 0.5 * (forward - reverse),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randers::{CovectorField, GridDomain, MetricField, OneForm, ScalarField};

    fn linear(n: usize) -> RandersStructure {
        RandersStructure::new(
            GridDomain::unit_square(n).unwrap(),
            MetricField::Euclidean,
            OneForm::Potential(ScalarField::Linear { cx: 0.5, cy: 0.0 }),
        )
        .unwrap()
    }

    #[test]
    fn decomposition_exact_on_linear_potential() {
        let rs = linear(21);
        let x = rs.domain.node_at(0, 0).unwrap();
        let y = rs.domain.node_at(20, 0).unwrap();
        let z = rs.domain.node_at(7, 13).unwrap();
        let check = check_randers_decomposition(&rs, Stencil::Sixteen, &[(x, y), (y, x), (z, x), (x, z)]).unwrap();
        assert!(check.max_residual <= 1e-12, "{check:?}");

        let g = build_graph(&rs, Stencil::Sixteen).unwrap();
        let g0 = build_graph(&rs.without_beta(), Stencil::Sixteen).unwrap();
        let gap = forward_distances(&g, x).unwrap().value(y) - forward_distances(&g0, x).unwrap().value(y);
        assert!((gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_potential_changes_nothing() {
        let rs = RandersStructure::new(
            GridDomain::unit_square(11).unwrap(),
            MetricField::Euclidean,
            OneForm::Potential(ScalarField::custom(|_| 3.0)),
        )
        .unwrap();
        let g = build_graph(&rs, Stencil::Sixteen).unwrap();
        let g0 = build_graph(&rs.without_beta(), Stencil::Sixteen).unwrap();
        assert_eq!(
            forward_distances(&g, 5).unwrap().values,
            forward_distances(&g0, 5).unwrap().values
        );
    }

    #[test]
    fn grid_weight_is_twice_potential() {
        let rs = linear(21);
        let g = build_graph(&rs, Stencil::Sixteen).unwrap();
        let a = rs.domain.node_at(0, 0).unwrap();
        let x = rs.domain.node_at(20, 0).unwrap();
        let samples = recover_grid_weight(&rs, &g, a, &[a, x]).unwrap();
        assert_eq!(samples[0].weight, 0.0);
        assert!((samples[1].weight - 1.0).abs() < 1e-12);
        assert!(samples.iter().all(|s| s.residual < 1e-12));
    }

    #[test]
    fn potential_perimeter_defect_vanishes() {
        let rs = RandersStructure::new(
            GridDomain::unit_square(21).unwrap(),
            MetricField::Diagonal(1.0, 2.0),
            OneForm::Potential(ScalarField::Radial { k: 0.3 }),
        )
        .unwrap();
        let g = build_graph(&rs, Stencil::Sixteen).unwrap();
        let d = perimeter_defect(&g, [3, 250, 400]).unwrap();
        assert!(d.defect.abs() <= 1e-12, "{d:?}");
        assert!(d.forward > 0.0);
    }

    #[test]
    fn busemann_mayer_axis_directions() {
        let rs = linear(41);
        let g = build_graph(&rs, Stencil::Sixteen).unwrap();
        let h = rs.domain.h();
        let p = rs.domain.node_at(20, 20).unwrap();
        let radii: Vec<f64> = DEFAULT_RADII.iter().map(|r| r * h).collect();
        let e = busemann_mayer_estimate(&rs, &g, p, [1.0, 0.0], &radii).unwrap();
        assert!((e.richardson - 1.5).abs() < 1e-9);
        assert!((e.symmetric_part - 1.0).abs() < 1e-9);
        assert!((e.beta_part - 0.5).abs() < 1e-9);
        let e = busemann_mayer_estimate(&rs, &g, p, [0.0, 1.0], &radii).unwrap();
        assert!((e.richardson - 1.0).abs() < 1e-9 && e.beta_part.abs() < 1e-9);
        // Homogeneity in v.
        let e2 = busemann_mayer_estimate(&rs, &g, p, [2.0, 0.0], &radii).unwrap();
        assert!((e2.richardson - 3.0).abs() < 1e-9);

        let corner = rs.domain.node_at(40, 40).unwrap();
        assert!(matches!(
            busemann_mayer_estimate(&rs, &g, corner, [1.0, 0.0], &radii),
            Err(Error::RayExitsMask { .. })
        ));
    }

    #[test]
    fn decomposition_needs_potential() {
        let rs = RandersStructure::new(
            GridDomain::unit_square(5).unwrap(),
            MetricField::Euclidean,
            OneForm::Components(CovectorField::Constant([0.1, 0.0])),
        )
        .unwrap();
        assert!(check_randers_decomposition(&rs, Stencil::Eight, &[(0, 1)]).is_err());
    }
}
