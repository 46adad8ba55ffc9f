//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's checking code.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;

pub type Rows = Vec<Vec<f64>>;

/// Pairwise Euclidean distances of `n` random points in the unit square,
/// scaled by `scale`.
pub fn random_euclidean(rng: &mut impl Rng, n: usize, scale: f64) -> Rows {
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| scale * (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]))
                .collect()
        })
        .collect()
}

/// A metric rho and a weight w with `|w_i - w_j| / 2 < rho_ij` off the
/// diagonal: rho is a Euclidean metric plus a multiple (>= 1) of the
/// pseudo-metric `|w_i - w_j| / 2`.
pub fn random_weighted_construction(rng: &mut impl Rng, n: usize) -> (Rows, Vec<f64>) {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
    let scale = rng.random_range(0.1..4.0);
    let e = random_euclidean(rng, n, scale);
    let s = rng.random_range(1.0..1.5);
    let rho = (0..n)
        .map(|i| (0..n).map(|j| e[i][j] + s * 0.5 * (w[i] - w[j]).abs()).collect())
        .collect();
    (rho, w)
}

/// `rho + (w_j - w_i) / 2`, written out directly.
pub fn compose_by_hand(rho: &Rows, w: &[f64]) -> Rows {
    let n = rho.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { rho[i][j] + 0.5 * (w[j] - w[i]) })
                .collect()
        })
        .collect()
}

/// Shortest-path closure: the result satisfies the triangle inequality.
pub fn floyd_closure(mut d: Rows) -> Rows {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A random quasi-metric with entries on the grid `step * {1, ..., max_steps}`
/// before closure (so every entry stays a multiple of `step`).
pub fn random_quasi_metric(rng: &mut impl Rng, n: usize, step: f64, max_steps: u32) -> Rows {
    let raw = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        step * rng.random_range(1..=max_steps) as f64
                    }
                })
                .collect()
        })
        .collect();
    floyd_closure(raw)
}

/// Largest `d(i,j) - d(i,k) - d(k,j)` over all triples.
pub fn brute_force_triangle(d: &Rows) -> f64 {
    let n = d.len();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max(d[i][j] - d[i][k] - d[k][j]);
            }
        }
    }
    worst
}

/// Forward Hausdorff distance between `E(x)` and `E(y)` computed directly
/// on `M x {0, step, 2 step, ..., top}` with
/// `delta((u, a), (v, b)) = max(d(u,v), d(v,u)) + |a - b|` and
/// `E(z) = {(u, a) : d(u, z) <= a}`.
pub fn bundle_oracle(d: &Rows, x: usize, y: usize, step: f64, top: f64) -> f64 {
    let n = d.len();
    let levels = (top / step).round() as usize;
    let heights: Vec<f64> = (0..=levels).map(|k| k as f64 * step).collect();
    let in_e = |u: usize, a: f64, z: usize| d[u][z] <= a + 1e-12;
    let mut sup = 0.0f64;
    for u in 0..n {
        for &a in &heights {
            if !in_e(u, a, x) {
                continue;
            }
            let mut inf = f64::INFINITY;
            for v in 0..n {
                for &b in &heights {
                    if in_e(v, b, y) {
                        inf = inf.min(d[u][v].max(d[v][u]) + (a - b).abs());
                    }
                }
            }
            sup = sup.max(inf);
        }
    }
    sup
}

/// Forward, backward and max quasi-Hausdorff distances written out with loops.
pub fn hausdorff_by_hand(d: &Rows, a: &[usize], b: &[usize]) -> (f64, f64, f64) {
    let fwd = a
        .iter()
        .map(|&i| b.iter().map(|&j| d[i][j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let bwd = b
        .iter()
        .map(|&j| a.iter().map(|&i| d[i][j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    (fwd, bwd, fwd.max(bwd))
}

/// Random nonempty subset of `0..n` with at most `max_len` elements, sorted.
pub fn random_subset(rng: &mut impl Rng, n: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(1..=max_len.min(n));
    let mut all: Vec<usize> = (0..n).collect();
    for k in 0..len {
        let j = rng.random_range(k..n);
        all.swap(k, j);
    }
    let mut s = all[..len].to_vec();
    s.sort_unstable();
    s
}

/// `a - min(a)`.
pub fn shift_to_zero(a: &[f64]) -> Vec<f64> {
    let m = a.iter().copied().fold(f64::INFINITY, f64::min);
    a.iter().map(|v| v - m).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
