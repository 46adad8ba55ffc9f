//! Built-in scenarios that need no input files.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::commands::{apply_grid_args, e_embedding_residual, hausdorff_table, run_randers, sampled_matrix};
use super::report::{CheckResult, RunReport};
use super::scenario::{DomainConfig, RandersScenario, RayConfig, Resolution, Tolerances, TripleConfig};
use super::GridArgs;
use crate::error::Result;
use crate::hausdorff::{weighted_formula, PointSubset};
use crate::randers::{
    build_graph, forward_distances, GridDomain, Mask, MetricField, OneForm, RandersStructure, Stencil,
};
use crate::space::{symmetrize, FiniteQuasiMetric, Matrix, ValidationOptions};
use crate::weight::{check_perimeter_identity, recover_weight, WeightedQuasiMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DemoName {
    /// The three-point weighted space x, y, z.
    W3,
    /// Euclidean benchmark and the f = 0.5 x splitting on the unit square.
    UnitSquare,
    /// Closed but not exact one-form on an annulus.
    Annulus,
}

/// Seed for the sampled pairs of the unit-square demo.
pub const PAIR_SEED: u64 = 20_240_601;
pub const PAIR_COUNT: usize = 100;

pub fn run(report: &mut RunReport, name: DemoName, grid: &GridArgs, opts: &ValidationOptions) -> Result<()> {
    match name {
        DemoName::W3 => w3(report, opts),
        DemoName::UnitSquare => unit_square(report, grid),
        DemoName::Annulus => annulus(report, grid),
    }
}

pub fn w3_space() -> FiniteQuasiMetric {
    let rows = vec![vec![0.0, 3.0, 4.5], vec![1.0, 0.0, 2.5], vec![3.5, 3.5, 0.0]];
    let labels = ["x", "y", "z"].map(String::from).to_vec();
    FiniteQuasiMetric::new(
        labels,
        Matrix::from_rows(&rows).expect("square"),
        &ValidationOptions::default(),
    )
    .expect("W3 is a quasi-metric")
}

fn w3(report: &mut RunReport, opts: &ValidationOptions) -> Result<()> {
    let q = w3_space();
    let v = q.validate(opts)?;
    report.check(CheckResult::flag(
        "quasi_metric_axioms",
        v.passed,
        v.max_residual,
        Some(v.tol),
    ));
    let perim = check_perimeter_identity(&q, opts);
    report.check(CheckResult::flag(
        "perimeter_identity",
        perim.holds,
        perim.max_residual,
        Some(perim.tol),
    ));
    let w = recover_weight(&q, 0, opts)?.normalized();
    for (i, expected) in [0.0, 2.0, 1.0].into_iter().enumerate() {
        report.check(CheckResult::near(
            format!("weight_{}", q.label(i)),
            w[i],
            expected,
            perim.tol,
        ));
    }
    report.check(CheckResult::small("e_embedding", e_embedding_residual(&q)?, 1e-12));

    let qw = WeightedQuasiMetric::new(q.clone(), w.clone(), opts)?;
    let a = PointSubset::singleton(0);
    let b = PointSubset::new(vec![1, 2])?;
    let f = weighted_formula(&qw, &a, &b)?;
    report.check(CheckResult::near("qh_forward_x_yz", f.forward, 3.0, 1e-12));
    report.check(CheckResult::near("weighted_formula_residual", f.residual_forward_rho, 0.0, 0.0).reported());
    let sets = vec![a, b, PointSubset::new(vec![0, 1, 2])?];
    report.table(hausdorff_table(&q, &symmetrize(&q), Some(&qw), &sets)?);
    report.output("weight", &w);
    Ok(())
}

fn scenario(domain: DomainConfig, one_form: &str) -> RandersScenario {
    RandersScenario {
        domain,
        metric: "euclidean".into(),
        one_form: one_form.into(),
        stencil: Stencil::Sixteen,
        sources: Vec::new(),
        pairs: Vec::new(),
        triples: Vec::new(),
        rays: Vec::new(),
        basepoint: None,
        tolerances: Tolerances::default(),
    }
}

/// Max relative error of grid distances from the centre against the
/// Euclidean distance, over nodes at least `10 h` away.
pub fn euclidean_benchmark(n: usize, stencil: Stencil) -> Result<(f64, f64)> {
    let rs = RandersStructure::new(GridDomain::unit_square(n)?, MetricField::Euclidean, OneForm::Zero)?;
    let graph = build_graph(&rs, stencil)?;
    let c = rs.domain.nearest_node([0.5, 0.5]).expect("centre is active");
    let field = forward_distances(&graph, c)?;
    let p = rs.domain.coords(c);
    let cutoff = 10.0 * rs.domain.h();
    let mut worst = 0.0f64;
    for node in 0..rs.domain.active_count() {
        let q = rs.domain.coords(node);
        let exact = (q[0] - p[0]).hypot(q[1] - p[1]);
        if exact >= cutoff {
            worst = worst.max((field.value(node) - exact).abs() / exact);
        }
    }
    let corner = forward_distances(&graph, rs.domain.node_at(0, 0).expect("corner"))?;
    let far = corner.value(rs.domain.node_at(n as isize - 1, n as isize - 1).expect("corner"));
    Ok((worst, far))
}

fn unit_square(report: &mut RunReport, grid: &GridArgs) -> Result<()> {
    let mut sc = scenario(
        DomainConfig {
            bbox: [0.0, 1.0, 0.0, 1.0],
            resolution: Resolution::Square(101),
            mask: Mask::Full,
        },
        "potential:linear(0.5,0)",
    );
    apply_grid_args(&mut sc, grid);
    let (n, _) = sc.domain.resolution.dims();

    let start = std::time::Instant::now();
    let (err, diagonal) = euclidean_benchmark(n, sc.stencil)?;
    report.timing("euclidean_benchmark", start.elapsed().as_secs_f64() * 1e3);
    report.check(CheckResult::small("euclidean_max_rel_error", err, 0.03));
    report.check(CheckResult::near(
        "euclidean_diagonal",
        diagonal,
        2f64.sqrt(),
        0.03 * 2f64.sqrt(),
    ));

    let domain = GridDomain::unit_square(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let m = domain.active_count();
    sc.pairs = (0..PAIR_COUNT)
        .map(|_| {
            [
                domain.coords(rng.random_range(0..m)),
                domain.coords(rng.random_range(0..m)),
            ]
        })
        .collect();
    sc.pairs.insert(0, [[0.0, 0.0], [1.0, 0.0]]);
    sc.basepoint = Some([0.0, 0.0]);
    sc.sources = vec![[0.5, 0.5]];
    sc.triples = vec![TripleConfig {
        points: [[0.1, 0.1], [0.9, 0.2], [0.5, 0.8]],
        expected: None,
        tolerance: None,
    }];
    sc.rays = [
        ([1.0, 0.0], [1.5, 1.0, 0.5]),
        ([0.0, 1.0], [1.0, 1.0, 0.0]),
        ([-1.0, 0.0], [0.5, 1.0, -0.5]),
    ]
    .into_iter()
    .map(|(direction, expected)| RayConfig {
        point: [0.5, 0.5],
        direction,
        radii: None,
        expected: Some(expected),
        rel_tolerance: Some(0.05),
    })
    .collect();
    let Some((rs, graph)) = run_randers(report, &sc)? else {
        return Ok(());
    };

    // d_F((0,0) -> (1,0)) = 1.5 and back 0.5.
    let a = rs.domain.node_at(0, 0).expect("corner");
    let b = rs.domain.node_at(n as isize - 1, 0).expect("corner");
    let there = forward_distances(&graph, a)?.value(b);
    let back = forward_distances(&graph, b)?.value(a);
    report.check(CheckResult::near("d_f_east", there, 1.5, 0.03 * 1.5));
    report.check(CheckResult::near("d_f_west", back, 0.5, 0.03 * 0.5));

    // Sampled distance matrix on a handful of nodes is a weightable quasi-metric.
    let sample: Vec<usize> = (0..8)
        .map(|k| {
            rs.domain
                .nearest_node([0.1 * k as f64 + 0.1, 0.9 - 0.1 * k as f64])
                .expect("active")
        })
        .collect();
    let q = FiniteQuasiMetric::new_unchecked(None, sampled_matrix(&graph, &sample)?)?;
    let opts = ValidationOptions::default();
    let v = q.validate(&opts)?;
    report.check(CheckResult::flag(
        "sampled_axioms",
        v.passed,
        v.max_residual,
        Some(v.tol),
    ));
    let perim = check_perimeter_identity(&q, &opts);
    report.check(CheckResult::flag(
        "sampled_perimeter_identity",
        perim.holds,
        perim.max_residual,
        Some(perim.tol),
    ));
    Ok(())
}

/// Points at the given angles (degrees) on the circle of radius `r`.
fn on_circle(r: f64, degrees: [f64; 3]) -> [[f64; 2]; 3] {
    degrees.map(|d| {
        let t = d.to_radians();
        [r * t.cos(), r * t.sin()]
    })
}

fn annulus(report: &mut RunReport, grid: &GridArgs) -> Result<()> {
    let mut sc = scenario(
        DomainConfig {
            bbox: [-3.0, 3.0, -3.0, 3.0],
            resolution: Resolution::Square(241),
            mask: Mask::Annulus {
                center: [0.0, 0.0],
                r_in: 1.5,
                r_out: 3.0,
            },
        },
        "dtheta(0.5)",
    );
    apply_grid_args(&mut sc, grid);
    let two_pi = 2.0 * PI;
    sc.triples = vec![
        TripleConfig {
            points: on_circle(2.25, [0.0, 120.0, 240.0]),
            expected: Some(two_pi),
            tolerance: Some(0.05 * two_pi),
        },
        TripleConfig {
            points: on_circle(2.25, [0.0, 15.0, 30.0]),
            expected: Some(0.0),
            tolerance: Some(0.02 * two_pi),
        },
    ];
    if let Some((_, _)) = run_randers(report, &sc)? {
        let sup = report
            .checks
            .iter()
            .find(|c| c.name == "positivity")
            .map(|c| c.value)
            .unwrap_or(f64::NAN);
        report.check(CheckResult::near("positivity_sup", sup, 0.5 / 1.5, 0.01));
    }
    Ok(())
}
