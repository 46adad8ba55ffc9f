use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::OneForm;
use super::{check_positivity, RandersStructure, DEFAULT_POSITIVITY_MARGIN};
use crate::error::{Error, Result};

/// Neighbour offsets used to connect grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Stencil {
    /// `max(|di|, |dj|) <= 1`.
    Eight,
    /// `max(|di|, |dj|) <= 2` with `gcd(|di|, |dj|) = 1`.
    #[default]
    Sixteen,
}

impl Stencil {
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const EIGHT: [(isize, isize); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        const SIXTEEN: [(isize, isize); 16] = [
            (1, 0),
            (2, 1),
            (1, 1),
            (1, 2),
            (0, 1),
            (-1, 2),
            (-1, 1),
            (-2, 1),
            (-1, 0),
            (-2, -1),
            (-1, -1),
            (-1, -2),
            (0, -1),
            (1, -2),
            (1, -1),
            (2, -1),
        ];
        match self {
            Stencil::Eight => &EIGHT,
            Stencil::Sixteen => &SIXTEEN,
        }
    }

    pub fn size(self) -> u32 {
        self.offsets().len() as u32
    }
}

impl TryFrom<u32> for Stencil {
    type Error = String;

    fn try_from(k: u32) -> std::result::Result<Self, String> {
        match k {
            8 => Ok(Stencil::Eight),
            16 => Ok(Stencil::Sixteen),
            _ => Err(format!("unsupported stencil size {k} (expected 8 or 16)")),
        }
    }
}

impl From<Stencil> for u32 {
    fn from(s: Stencil) -> u32 {
        s.size()
    }
}

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Adjacency {
    fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }
}

/// Directed graph over the active nodes of a grid domain, together with its
/// edge-reversed copy.
#[derive(Debug, Clone)]
pub struct Graph {
    forward: Adjacency,
    reverse: Adjacency,
}

impl Graph {
    /// Builds a graph from per-node outgoing edge lists.
    pub fn from_edges(out: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = out.len();
        let mut forward = Adjacency {
            offsets: Vec::with_capacity(n + 1),
            ..Default::default()
        };
        forward.offsets.push(0);
        let mut in_degree = vec![0usize; n];
        for (u, edges) in out.iter().enumerate() {
            for &(v, w) in edges {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::NonPositiveEdge {
                        from: u,
                        to: v,
                        weight: w,
                    });
                }
                forward.targets.push(v);
                forward.weights.push(w);
                in_degree[v] += 1;
            }
            forward.offsets.push(forward.targets.len());
        }
        let mut reverse = Adjacency {
            offsets: Vec::with_capacity(n + 1),
            targets: vec![0; forward.targets.len()],
            weights: vec![0.0; forward.targets.len()],
        };
        reverse.offsets.push(0);
        for d in &in_degree {
            reverse.offsets.push(reverse.offsets.last().unwrap() + d);
        }
        let mut fill = reverse.offsets[..n].to_vec();
        for u in 0..n {
            for (v, w) in forward.neighbors(u) {
                reverse.targets[fill[v]] = u;
                reverse.weights[fill[v]] = w;
                fill[v] += 1;
            }
        }
        Ok(Graph { forward, reverse })
    }

    pub fn node_count(&self) -> usize {
        self.forward.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.forward.targets.len()
    }

    /// Outgoing edges `u -> v` with weights.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.forward.neighbors(u)
    }

    /// Incoming edges `v -> u`, yielded as `(v, weight)`.
    pub fn in_edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.reverse.neighbors(u)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.out_edges(u).find(|&(t, _)| t == v).map(|(_, w)| w)
    }

    /// Every node reachable from node 0 along forward and along reversed edges.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let reach = |adj: &Adjacency| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for (v, _) in adj.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            count == n
        };
        reach(&self.forward) && reach(&self.reverse)
    }
}

/// Discretizes `d_F` on the grid.
///
/// For each active node `u` and stencil offset reaching an active node `v`
/// whose segment midpoint `m` is also active, the edge `u -> v` has weight
/// `alpha_m(v - u) + B(u, v)`. `B` is `f(v) - f(u)` for a potential and
/// `b(m) . (v - u)` for a component one-form.
pub fn build_graph(rs: &RandersStructure, stencil: Stencil) -> Result<Graph> {
    let positivity = check_positivity(rs, DEFAULT_POSITIVITY_MARGIN)?;
    if !positivity.holds {
        return Err(Error::NotPositive {
            sup: positivity.sup,
            node: positivity.worst_node,
        });
    }
    let domain = &rs.domain;
    let n = domain.active_count();
    let (hx, hy) = domain.spacing();
    let potential: Option<Vec<f64>> = rs
        .beta
        .potential()
        .map(|f| (0..n).map(|u| f.value(domain.coords(u))).collect());

    let out: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let (i, j) = domain.cell(u);
            let pu = domain.coords(u);
            let mut edges = Vec::with_capacity(stencil.offsets().len());
            for &(di, dj) in stencil.offsets() {
                let Some(v) = domain.node_at(i as isize + di, j as isize + dj) else {
                    continue;
                };
                let delta = [di as f64 * hx, dj as f64 * hy];
                let mid = [pu[0] + 0.5 * delta[0], pu[1] + 0.5 * delta[1]];
                if !domain.contains(mid) {
                    continue;
                }
                let length = rs.alpha.norm(mid, delta);
                let beta = match (&rs.beta, &potential) {
                    (_, Some(f)) => f[v] - f[u],
                    (OneForm::Components(b), None) => {
                        let b = b.value(mid);
                        b[0] * delta[0] + b[1] * delta[1]
                    }
                    _ => 0.0,
                };
                let weight = length + beta;
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(Error::NonPositiveEdge { from: u, to: v, weight });
                }
                edges.push((v, weight));
            }
            Ok(edges)
        })
        .collect::<Result<_>>()?;

    let graph = Graph::from_edges(out)?;
    if !graph.is_strongly_connected() {
        return Err(Error::Domain(
            "active nodes are not connected under the chosen stencil".into(),
        ));
    }
    Ok(graph)
}
