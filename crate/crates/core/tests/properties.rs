//! Property tests for finite quasi-metric spaces, weights and quasi-Hausdorff
//! distances.

#![allow(clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;

use common::*;
use quasimetric::{
    check_embedding, check_perimeter_identity, compose, decompose, e_embedding_distance, hausdorff_metric, max_metric,
    qh_backward, qh_forward, qh_max, recover_weight, reverse, symmetrize, validate_metric, FiniteMetric,
    FiniteQuasiMetric, Matrix, PointSubset, ValidationOptions,
};

/// A quasi-metric on `2..=max_n` points with entries that are multiples of 1/8.
fn quasi_metric(max_n: usize) -> impl Strategy<Value = Rows> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u32..=40, n * n).prop_map(move |raw| {
            let rows = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { 0.0 } else { raw[i * n + j] as f64 / 8.0 })
                        .collect()
                })
                .collect();
            floyd_closure(rows)
        })
    })
}

/// A metric `rho` and weight `w` with `|w_i - w_j| / 2 < rho_ij`.
fn weighted(max_n: usize) -> impl Strategy<Value = (Rows, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n),
            prop::collection::vec(0.0f64..5.0, n),
            0.1f64..4.0,
        )
            .prop_map(move |(pts, w, scale)| {
                let rho = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let e = scale * (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                                // Coincident points still get a positive distance.
                                let e = if i != j { e.max(1e-3) } else { 0.0 };
                                e + 0.5 * (w[i] - w[j]).abs()
                            })
                            .collect()
                    })
                    .collect();
                (rho, w)
            })
    })
}

fn space(rows: &Rows) -> FiniteQuasiMetric {
    FiniteQuasiMetric::new_unchecked(None, Matrix::from_rows(rows).unwrap()).unwrap()
}

fn metric(rows: &Rows) -> FiniteMetric {
    FiniteMetric::new_unchecked(space(rows)).unwrap()
}

fn subset_of(n: usize) -> impl Strategy<Value = PointSubset> {
    prop::collection::btree_set(0..n, 1..=n.min(4)).prop_map(|s| PointSubset::new(s.into_iter().collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_spaces_are_valid(d in quasi_metric(7)) {
        let q = space(&d);
        prop_assert!(q.validate(&ValidationOptions::default()).unwrap().passed);
        prop_assert!(brute_force_triangle(&d) <= 0.0);
    }

    #[test]
    fn reverse_preserves_validity(d in quasi_metric(7)) {
        let q = space(&d);
        let r = reverse(&q);
        prop_assert!(r.validate(&ValidationOptions::default()).unwrap().passed);
        for i in 0..q.n() {
            for j in 0..q.n() {
                prop_assert_eq!(r.d(i, j), q.d(j, i));
            }
        }
        prop_assert_eq!(reverse(&r), q);
    }

    #[test]
    fn symmetrizations_are_metrics(d in quasi_metric(7)) {
        let q = space(&d);
        let opts = ValidationOptions::default();
        let rho = symmetrize(&q);
        let star = max_metric(&q);
        prop_assert!(validate_metric(rho.matrix(), &opts).unwrap().passed);
        prop_assert!(validate_metric(star.matrix(), &opts).unwrap().passed);
        prop_assert_eq!(symmetrize(&reverse(&q)), rho.clone());
        for i in 0..q.n() {
            for j in 0..q.n() {
                prop_assert!(rho.d(i, j) <= star.d(i, j));
                prop_assert!(star.d(i, j) <= 2.0 * rho.d(i, j));
            }
        }
    }

    #[test]
    fn weight_is_basepoint_independent((rho, w) in weighted(9)) {
        let opts = ValidationOptions::default();
        let q = space(&compose_by_hand(&rho, &w));
        prop_assert!(check_perimeter_identity(&q, &opts).holds);
        let reference = recover_weight(&q, 0, &opts).unwrap().normalized();
        for a in 1..q.n() {
            let other = recover_weight(&q, a, &opts).unwrap().normalized();
            prop_assert!(max_abs_diff(&reference, &other) <= 1e-9);
        }
        prop_assert!(max_abs_diff(&reference, &shift_to_zero(&w)) <= 1e-9);
    }

    #[test]
    fn compose_round_trip_and_embedding((rho, w) in weighted(9)) {
        let opts = ValidationOptions::default();
        let qw = compose(&metric(&rho), &w, &opts).unwrap();
        let flat: Vec<f64> = compose_by_hand(&rho, &w).into_iter().flatten().collect();
        prop_assert!(max_abs_diff(qw.space().matrix().as_slice(), &flat) <= 1e-12);
        let (rho2, w2) = decompose(&qw);
        let rho_flat: Vec<f64> = rho.iter().flatten().copied().collect();
        prop_assert!(max_abs_diff(rho2.matrix().as_slice(), &rho_flat) <= 1e-12);
        prop_assert_eq!(&w2, &w);
        for i in 0..qw.n() {
            for j in 0..qw.n() {
                prop_assert!(0.5 * (w2[i] - w2[j]).abs() <= rho2.d(i, j));
            }
        }
        prop_assert!(check_embedding(&qw, &opts).max_residual <= 1e-12);
    }

    #[test]
    fn hausdorff_matches_definition(
        (d, a, b) in quasi_metric(8).prop_flat_map(|d| {
            let n = d.len();
            (Just(d), subset_of(n), subset_of(n))
        })
    ) {
        let q = space(&d);
        let (f, bw, m) = hausdorff_by_hand(&d, a.indices(), b.indices());
        prop_assert_eq!(qh_forward(&q, &a, &b).unwrap(), f);
        prop_assert_eq!(qh_backward(&q, &a, &b).unwrap(), bw);
        prop_assert_eq!(qh_max(&q, &a, &b).unwrap(), m);
        // Duality with the reverse space.
        prop_assert_eq!(qh_forward(&q, &a, &b).unwrap(), qh_backward(&reverse(&q), &b, &a).unwrap());
        let rho = symmetrize(&q);
        prop_assert_eq!(hausdorff_metric(&rho, &a, &b).unwrap(), qh_max(&rho, &a, &b).unwrap());
        prop_assert_eq!(qh_forward(&q, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn qh_max_on_singletons_is_max_metric(d in quasi_metric(7)) {
        let q = space(&d);
        let star = max_metric(&q);
        for i in 0..q.n() {
            for j in 0..q.n() {
                let (si, sj) = (PointSubset::singleton(i), PointSubset::singleton(j));
                // Both one-sided distances collapse to D[i][j] on singletons;
                // the max-metric appears once both orders are combined.
                let v = qh_max(&q, &si, &sj).unwrap();
                prop_assert_eq!(v, q.d(i, j));
                prop_assert_eq!(v.max(qh_max(&q, &sj, &si).unwrap()), star.d(i, j));
            }
        }
    }

    #[test]
    fn qh_max_triangle(
        (d, a, b, c) in quasi_metric(8).prop_flat_map(|d| {
            let n = d.len();
            (Just(d), subset_of(n), subset_of(n), subset_of(n))
        })
    ) {
        let q = space(&d);
        let ab = qh_max(&q, &a, &b).unwrap();
        let ac = qh_max(&q, &a, &c).unwrap();
        let cb = qh_max(&q, &c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn e_embedding_reproduces_d(d in quasi_metric(6)) {
        let q = space(&d);
        for x in 0..q.n() {
            for y in 0..q.n() {
                prop_assert!((e_embedding_distance(&q, x, y).unwrap() - d[x][y]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn e_embedding_matches_bundle_oracle(d in quasi_metric(4)) {
        let q = space(&d);
        let top = d.iter().flatten().fold(0.0f64, |m, v| m.max(*v)) + 0.5;
        for x in 0..q.n() {
            for y in 0..q.n() {
                let e = e_embedding_distance(&q, x, y).unwrap();
                prop_assert!((bundle_oracle(&d, x, y, 0.125, top) - e).abs() <= 0.125);
            }
        }
    }
}

#[test]
fn perturbed_space_is_not_weightable() {
    let opts = ValidationOptions::default();
    let rho = vec![vec![0.0, 2.0, 3.0], vec![2.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]];
    let mut d = compose_by_hand(&rho, &[0.0, 1.0, 0.5]);
    assert!(check_perimeter_identity(&space(&d), &opts).holds);
    d[0][1] += 1e-6;
    let check = check_perimeter_identity(&space(&d), &opts);
    assert!(!check.holds);
    assert!(recover_weight(&space(&d), 0, &opts).is_err());
}
