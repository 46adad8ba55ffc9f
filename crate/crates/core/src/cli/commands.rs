use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::report::{CheckResult, RunReport, Table};
use super::scenario::{RandersScenario, Resolution};
use super::GridArgs;
use crate::error::{Error, Result};
use crate::hausdorff::{
    e_embedding_distance, hausdorff_forward_metric, hausdorff_metric, qh_backward, qh_forward, qh_max,
    weighted_formula, PointSubset,
};
use crate::io::{read_space, SpaceFile};
use crate::randers::checks::DEFAULT_RADII;
use crate::randers::{
    backward_distances, build_graph, busemann_mayer_estimate, check_closedness, check_positivity,
    check_randers_decomposition, forward_distances, perimeter_defect, recover_grid_weight, DistanceField, Graph,
    RandersStructure,
};
use crate::space::{symmetrize, FiniteMetric, FiniteQuasiMetric, Matrix, ValidationOptions};
use crate::weight::{
    check_embedding, check_perimeter_identity, compose as compose_space, normalize_weight, recover_weight,
    weightability_residual, WeightedQuasiMetric,
};

fn num(v: f64) -> String {
    v.to_string()
}

/// Loads a space file and records the axiom check. Returns `None` if the
/// axioms fail, after recording the failure.
fn load_valid(
    report: &mut RunReport,
    input: &Path,
    opts: &ValidationOptions,
) -> Result<Option<(SpaceFile, FiniteQuasiMetric)>> {
    let file = read_space(input)?;
    let q = file.to_space()?;
    let v = q.validate(opts)?;
    report.check(CheckResult::flag(
        "quasi_metric_axioms",
        v.passed,
        v.max_residual,
        Some(v.tol),
    ));
    let passed = v.passed;
    report.output("validation", &v);
    Ok(passed.then_some((file, q)))
}

pub fn validate(report: &mut RunReport, input: &Path, opts: &ValidationOptions) -> Result<()> {
    let Some((_, q)) = load_valid(report, input, opts)? else {
        return Ok(());
    };
    report.output("n", q.n());
    report.output("symmetric", q.matrix().is_symmetric());
    Ok(())
}

fn resolve_basepoint(q: &FiniteQuasiMetric, basepoint: Option<&str>) -> Result<usize> {
    match basepoint {
        None => Ok(0),
        Some(b) => q
            .index_of(b)
            .ok_or_else(|| Error::Structural(format!("unknown basepoint {b:?}"))),
    }
}

fn weight_table(q: &FiniteQuasiMetric, raw: &[f64], normalized: &[f64]) -> Table {
    let mut t = Table::new("weight.csv", &["label", "w_basepoint", "w_normalized"]);
    for i in 0..q.n() {
        t.push(vec![q.label(i), num(raw[i]), num(normalized[i])]);
    }
    t
}

pub fn weigh(report: &mut RunReport, input: &Path, basepoint: Option<&str>, opts: &ValidationOptions) -> Result<()> {
    let Some((file, q)) = load_valid(report, input, opts)? else {
        return Ok(());
    };
    let a = resolve_basepoint(&q, basepoint)?;
    let perim = check_perimeter_identity(&q, opts);
    report.check(CheckResult::flag(
        "perimeter_identity",
        perim.holds,
        perim.max_residual,
        Some(perim.tol),
    ));
    report.output("perimeter", perim);
    if !perim.holds {
        return Ok(());
    }
    let gw = recover_weight(&q, a, opts)?;
    let normalized = gw.normalized();
    let (r, _) = weightability_residual(q.matrix(), &gw.w);
    report.check(CheckResult::small("weight_transport_residual", r, perim.tol));
    if let Some(given) = &file.weight {
        if given.len() != q.n() {
            return Err(Error::Structural(format!(
                "weight has {} entries for {} points",
                given.len(),
                q.n()
            )));
        }
        let given = normalize_weight(given);
        let diff = given
            .iter()
            .zip(&normalized)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.check(CheckResult::small("file_weight_agreement", diff, perim.tol));
    }
    report.output("basepoint", q.label(a));
    report.output("weight_basepoint", &gw.w);
    report.output("weight", &normalized);
    report.table(weight_table(&q, &gw.w, &normalized));
    if let Ok(qw) = WeightedQuasiMetric::new(q.clone(), normalized, opts) {
        report.file("weighted.json", SpaceFile::from_weighted(&qw).to_json());
    }
    Ok(())
}

pub fn compose(report: &mut RunReport, input: &Path, weight: Option<&[f64]>, opts: &ValidationOptions) -> Result<()> {
    let file = read_space(input)?;
    let labels = file.labels.clone();
    let rho = FiniteMetric::new(labels, file.to_matrix()?, opts)?;
    let w = match (weight, &file.weight) {
        (Some(w), _) => w.to_vec(),
        (None, Some(w)) => w.clone(),
        (None, None) => {
            return Err(Error::Structural(
                "no weight given (use --weight or a \"weight\" field)".into(),
            ))
        }
    };
    let qw = compose_space(&rho, &w, opts)?;
    let v = qw.space().validate(opts)?;
    report.check(CheckResult::flag(
        "quasi_metric_axioms",
        v.passed,
        v.max_residual,
        Some(v.tol),
    ));
    let emb = check_embedding(&qw, opts);
    report.check(CheckResult::small("embedding_isometry", emb.max_residual, emb.tol));
    report.check(w_bound_check(&qw, emb.tol));
    let out = SpaceFile::from_weighted(&qw);
    report.output("matrix", &out.matrix);
    report.output("weight", qw.weight());
    report.file("space.json", out.to_json());
    Ok(())
}

/// `max (|w(x) - w(y)| / 2 - rho(x, y))`; must not be positive.
fn w_bound_check(qw: &WeightedQuasiMetric, tol: f64) -> CheckResult {
    let rho = symmetrize(qw.space());
    let w = qw.weight();
    let mut excess = f64::NEG_INFINITY;
    for i in 0..qw.n() {
        for j in 0..qw.n() {
            if i != j {
                excess = excess.max(0.5 * (w[i] - w[j]).abs() - rho.d(i, j));
            }
        }
    }
    if qw.n() < 2 {
        excess = 0.0;
    }
    CheckResult::flag("w_bound", excess <= tol, excess, Some(tol))
}

pub fn embed_check(report: &mut RunReport, input: &Path, opts: &ValidationOptions) -> Result<()> {
    let Some((file, q)) = load_valid(report, input, opts)? else {
        return Ok(());
    };
    let w = match &file.weight {
        Some(w) => w.clone(),
        None => recover_weight(&q, 0, opts)?.normalized(),
    };
    let qw = WeightedQuasiMetric::new(q, w, opts)?;
    let emb = check_embedding(&qw, opts);
    report.check(CheckResult::small("embedding_isometry", emb.max_residual, emb.tol));
    report.check(w_bound_check(&qw, emb.tol));
    report.output("embedding", &emb);
    report.output("weight", qw.weight());
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointRef {
    Index(usize),
    Label(String),
}

fn read_subsets(path: &Path, q: &FiniteQuasiMetric) -> Result<Vec<PointSubset>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let raw: Vec<Vec<PointRef>> = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string()))?;
    raw.into_iter()
        .enumerate()
        .map(|(k, set)| {
            let idx = set
                .into_iter()
                .map(|p| match p {
                    PointRef::Index(i) => Ok(i),
                    PointRef::Label(l) => q
                        .index_of(&l)
                        .ok_or_else(|| Error::parse(format!("{origin}, subset {k}"), format!("unknown point {l:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            PointSubset::within(idx, q.n())
        })
        .collect()
}

fn subset_name(q: &FiniteQuasiMetric, s: &PointSubset) -> String {
    let names: Vec<String> = s.indices().iter().map(|&i| q.label(i)).collect();
    format!("{{{}}}", names.join(" "))
}

pub fn hausdorff(report: &mut RunReport, input: &Path, subsets: &Path, opts: &ValidationOptions) -> Result<()> {
    let Some((file, q)) = load_valid(report, input, opts)? else {
        return Ok(());
    };
    let sets = read_subsets(subsets, &q)?;
    if sets.is_empty() {
        return Err(Error::EmptySubset);
    }
    let weighted = match &file.weight {
        Some(w) => Some(WeightedQuasiMetric::new(q.clone(), w.clone(), opts)?),
        None if check_perimeter_identity(&q, opts).holds => {
            let w = recover_weight(&q, 0, opts)?.normalized();
            WeightedQuasiMetric::new(q.clone(), w, opts).ok()
        }
        None => None,
    };
    let rho = symmetrize(&q);
    let table = hausdorff_table(&q, &rho, weighted.as_ref(), &sets)?;

    // qh_max is a quasi-metric on finite subsets; check the triangle
    // inequality over the requested family.
    let k = sets.len();
    let mut hm = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            hm[a * k + b] = qh_max(&q, &sets[a], &sets[b])?;
        }
    }
    let scale = q.matrix().max_abs();
    let tol = opts.effective_tol(scale);
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                worst = worst.max(hm[a * k + b] - hm[a * k + c] - hm[c * k + b]);
            }
        }
    }
    report.check(CheckResult::flag("qh_max_triangle", worst <= tol, worst, Some(tol)));

    if let Some(qw) = &weighted {
        let mut max_res = [0.0f64; 2];
        let mut violations = [0usize; 2];
        for a in &sets {
            for b in &sets {
                let f = weighted_formula(qw, a, b)?;
                max_res[0] = max_res[0].max(f.residual_forward_rho.abs());
                max_res[1] = max_res[1].max(f.residual_symmetric_rho.abs());
                violations[0] += usize::from(!f.bound_holds_forward_rho());
                violations[1] += usize::from(!f.bound_holds_symmetric_rho());
            }
        }
        report.check(CheckResult::small("weighted_formula_residual_forward_rho", max_res[0], tol).reported());
        report.check(CheckResult::small("weighted_formula_residual_symmetric_rho", max_res[1], tol).reported());
        report.check(CheckResult::small("forward_bound_violations_forward_rho", violations[0] as f64, 0.0).reported());
        report
            .check(CheckResult::small("forward_bound_violations_symmetric_rho", violations[1] as f64, 0.0).reported());
    }
    report.output("subsets", sets.iter().map(|s| subset_name(&q, s)).collect::<Vec<_>>());
    report.table(table);
    Ok(())
}

pub(crate) fn hausdorff_table(
    q: &FiniteQuasiMetric,
    rho: &FiniteMetric,
    weighted: Option<&WeightedQuasiMetric>,
    sets: &[PointSubset],
) -> Result<Table> {
    let mut t = Table::new(
        "hausdorff.csv",
        &[
            "a",
            "b",
            "forward",
            "backward",
            "max",
            "rho_hausdorff",
            "rho_forward",
            "residual_forward_rho",
            "residual_symmetric_rho",
        ],
    );
    for a in sets {
        for b in sets {
            let (r1, r2) = match weighted {
                Some(qw) => {
                    let f = weighted_formula(qw, a, b)?;
                    (num(f.residual_forward_rho), num(f.residual_symmetric_rho))
                }
                None => (String::new(), String::new()),
            };
            t.push(vec![
                subset_name(q, a),
                subset_name(q, b),
                num(qh_forward(q, a, b)?),
                num(qh_backward(q, a, b)?),
                num(qh_max(q, a, b)?),
                num(hausdorff_metric(rho, a, b)?),
                num(hausdorff_forward_metric(rho, a, b)?),
                r1,
                r2,
            ]);
        }
    }
    Ok(t)
}

/// Largest `|e_embedding_distance(x, y) - D[x][y]|` over all pairs.
pub(crate) fn e_embedding_residual(q: &FiniteQuasiMetric) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in 0..q.n() {
        for y in 0..q.n() {
            worst = worst.max((e_embedding_distance(q, x, y)? - q.d(x, y)).abs());
        }
    }
    Ok(worst)
}

pub fn randers(report: &mut RunReport, input: &Path, grid: &GridArgs) -> Result<()> {
    let mut scenario = RandersScenario::load(input)?;
    apply_grid_args(&mut scenario, grid);
    run_randers(report, &scenario)?;
    Ok(())
}

pub(crate) fn apply_grid_args(scenario: &mut RandersScenario, grid: &GridArgs) {
    if let Some(s) = grid.stencil {
        scenario.stencil = s;
    }
    if let Some(n) = grid.resolution {
        scenario.domain.resolution = Resolution::Square(n);
    }
}

fn field_table(rs: &RandersStructure, field: &DistanceField, name: String) -> Table {
    let mut t = Table::new(name, &["i", "j", "x", "y", "dist"]);
    for node in 0..rs.domain.active_count() {
        let (i, j) = rs.domain.cell(node);
        let [x, y] = rs.domain.coords(node);
        t.push(vec![
            i.to_string(),
            j.to_string(),
            num(x),
            num(y),
            num(field.value(node)),
        ]);
    }
    t
}

/// Forward and backward fields per source, computed once.
struct FieldCache<'a> {
    graph: &'a Graph,
    fields: BTreeMap<usize, (DistanceField, DistanceField)>,
}

impl<'a> FieldCache<'a> {
    fn new(graph: &'a Graph) -> Self {
        FieldCache {
            graph,
            fields: BTreeMap::new(),
        }
    }

    fn get(&mut self, x: usize) -> Result<&(DistanceField, DistanceField)> {
        if !self.fields.contains_key(&x) {
            let f = forward_distances(self.graph, x)?;
            let b = backward_distances(self.graph, x)?;
            self.fields.insert(x, (f, b));
        }
        Ok(&self.fields[&x])
    }
}

/// Runs every check a scenario asks for. Returns the structure and graph
/// for callers that add further checks, or `None` when positivity fails.
pub(crate) fn run_randers(report: &mut RunReport, sc: &RandersScenario) -> Result<Option<(RandersStructure, Graph)>> {
    report.output("randers_scenario", sc);
    let rs = sc.build()?;
    let tol = &sc.tolerances;
    let h = rs.domain.h();
    report.output("active_nodes", rs.domain.active_count());
    report.output("h", h);

    let pos = check_positivity(&rs, tol.positivity_margin)?;
    report.check(CheckResult::flag(
        "positivity",
        pos.holds,
        pos.sup,
        Some(1.0 - tol.positivity_margin),
    ));
    if !pos.holds {
        return Ok(None);
    }
    let potential = rs.beta.potential().is_some();
    if !potential && !rs.beta.is_zero() {
        report.check(CheckResult::small("closedness", check_closedness(&rs), 0.0).reported());
    }

    let start = std::time::Instant::now();
    let graph = build_graph(&rs, sc.stencil)?;
    report.timing("build_graph", start.elapsed().as_secs_f64() * 1e3);
    report.output("edges", graph.edge_count());

    let node = |p: [f64; 2]| RandersScenario::node(&rs, p);
    let mut cache = FieldCache::new(&graph);

    let mut unreachable = 0usize;
    for (k, &p) in sc.sources.iter().enumerate() {
        let s = node(p)?;
        let (fwd, _) = cache.get(s)?;
        unreachable += fwd.unreachable;
        report.table(field_table(&rs, fwd, format!("field_{k}.csv")));
    }
    if !sc.sources.is_empty() {
        report.check(CheckResult::flag(
            "unreachable_nodes",
            unreachable == 0,
            unreachable as f64,
            Some(0.0),
        ));
    }

    let pairs = sc
        .pairs
        .iter()
        .map(|[a, b]| Ok((node(*a)?, node(*b)?)))
        .collect::<Result<Vec<_>>>()?;
    if !pairs.is_empty() {
        let mut t = Table::new("pairs.csv", &["x_node", "y_node", "d_xy", "d_yx"]);
        for &(x, y) in &pairs {
            let (fwd, bwd) = cache.get(x)?;
            t.push(vec![x.to_string(), y.to_string(), num(fwd.value(y)), num(bwd.value(y))]);
        }
        report.table(t);
    }
    if potential && !pairs.is_empty() {
        let dec = check_randers_decomposition(&rs, sc.stencil, &pairs)?;
        report.check(CheckResult::small(
            "randers_decomposition",
            dec.max_residual,
            tol.decomposition,
        ));
        let a = match sc.basepoint {
            Some(p) => node(p)?,
            None => pairs[0].0,
        };
        let mut samples: Vec<usize> = pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
        samples.sort_unstable();
        samples.dedup();
        let ws = recover_grid_weight(&rs, &graph, a, &samples)?;
        let worst = ws.iter().fold(0.0f64, |m, s| m.max(s.residual));
        report.check(CheckResult::small("grid_weight", worst, tol.weight));
    }

    if !sc.triples.is_empty() {
        let mut t = Table::new(
            "defects.csv",
            &["triple", "x", "y", "z", "forward", "backward", "defect", "expected"],
        );
        for (k, tc) in sc.triples.iter().enumerate() {
            let nodes = [node(tc.points[0])?, node(tc.points[1])?, node(tc.points[2])?];
            let d = perimeter_defect(&graph, nodes)?;
            let name = format!("perimeter_defect_{k}");
            let check = match (tc.expected, tc.tolerance) {
                (Some(e), Some(tl)) => CheckResult::near(name, d.defect, e, tl),
                (Some(e), None) if potential => CheckResult::near(name, d.defect, e, tol.decomposition),
                (None, _) if potential => CheckResult::small(name, d.defect, tol.decomposition),
                (e, tl) => CheckResult::near(name, d.defect, e.unwrap_or(0.0), tl.unwrap_or(0.0)).reported(),
            };
            report.check(check);
            t.push(vec![
                k.to_string(),
                nodes[0].to_string(),
                nodes[1].to_string(),
                nodes[2].to_string(),
                num(d.forward),
                num(d.backward),
                num(d.defect),
                tc.expected.map(num).unwrap_or_default(),
            ]);
        }
        report.table(t);
    }

    if !sc.rays.is_empty() {
        let mut t = Table::new(
            "busemann.csv",
            &[
                "ray",
                "node",
                "vx",
                "vy",
                "smallest",
                "richardson",
                "reverse",
                "symmetric_part",
                "beta_part",
            ],
        );
        for (k, ray) in sc.rays.iter().enumerate() {
            let p = node(ray.point)?;
            let radii: Vec<f64> = ray
                .radii
                .clone()
                .unwrap_or_else(|| DEFAULT_RADII.to_vec())
                .iter()
                .map(|r| r * h)
                .collect();
            let bm = busemann_mayer_estimate(&rs, &graph, p, ray.direction, &radii)?;
            if let Some(e) = ray.expected {
                // Relative to the symmetric part so that zero targets get a
                // meaningful tolerance.
                let rel = ray.rel_tolerance.unwrap_or(0.05);
                let got = [bm.richardson, bm.symmetric_part, bm.beta_part];
                for (c, label) in ["f", "symmetric", "beta"].iter().enumerate() {
                    let tl = rel * e[c].abs().max(e[1].abs());
                    report.check(CheckResult::near(format!("busemann_{k}_{label}"), got[c], e[c], tl));
                }
            } else {
                report.check(CheckResult::small(format!("busemann_{k}_beta"), bm.beta_part, 0.0).reported());
            }
            t.push(vec![
                k.to_string(),
                p.to_string(),
                num(ray.direction[0]),
                num(ray.direction[1]),
                num(bm.smallest),
                num(bm.richardson),
                num(bm.reverse),
                num(bm.symmetric_part),
                num(bm.beta_part),
            ]);
        }
        report.table(t);
    }
    Ok(Some((rs, graph)))
}

/// Builds a matrix from grid distances between sample nodes.
pub(crate) fn sampled_matrix(graph: &Graph, nodes: &[usize]) -> Result<Matrix> {
    let rows = nodes
        .iter()
        .map(|&x| {
            let f = forward_distances(graph, x)?;
            Ok(nodes.iter().map(|&y| f.value(y)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Matrix::from_rows(&rows)
}
