mod common;

use approx::assert_relative_eq;
use common::{jacobi_singular_values, random_matrix, rng};
use proptest::prelude::*;
use unmix_core::linalg::{NORM_MAX_ITERS, NORM_TOL};
use unmix_core::{estimate_operator_norm, normalize_problem, DenseOperator, MeasurementProblem};

#[test]
fn norm_matches_jacobi_svd() {
    let mut r = rng(11);
    for &(rows, cols) in &[(3, 3), (5, 12), (20, 40), (40, 20), (100, 256)] {
        let op = random_matrix(&mut r, rows, cols);
        let sv = jacobi_singular_values(op.data(), rows, cols);
        let est = estimate_operator_norm(&op, NORM_TOL, NORM_MAX_ITERS).unwrap();
        assert_relative_eq!(est, sv[0], max_relative = 1e-6);
        assert_eq!(op.norm_estimate(), est);
    }
}

#[test]
fn jacobi_oracle_on_known_matrix() {
    // [[3, 0], [4, 5]] has singular values √45 and √5
    let sv = jacobi_singular_values(&[3.0, 0.0, 4.0, 5.0], 2, 2);
    assert_relative_eq!(sv[0], 45f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(sv[1], 5f64.sqrt(), max_relative = 1e-14);
}

#[test]
fn normalized_problem_hits_target() {
    let mut r = rng(3);
    let op = random_matrix(&mut r, 30, 50);
    let y = vec![1.0; 30];
    let p = MeasurementProblem::new(op, y, None, None).unwrap();
    let n = normalize_problem(&p, 0.99).unwrap();
    let sv = jacobi_singular_values(n.op.data(), 30, 50);
    assert_relative_eq!(sv[0], 0.99, max_relative = 1e-6);
    assert_relative_eq!(n.y[0] / p.y[0], n.scale_factor, max_relative = 1e-15);
    // idempotent
    assert_eq!(normalize_problem(&n, 0.99).unwrap(), n);
}

#[test]
fn rank_one_operator_norm() {
    // u vᵀ with |u| = 5, |v| = 3
    let u = [3.0, 4.0];
    let v = [1.0, 2.0, 2.0];
    let data: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    let op = DenseOperator::new(2, 3, data).unwrap();
    assert_relative_eq!(op.norm_estimate(), 15.0, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn adjoint_is_consistent(seed in 0u64..1000, rows in 1usize..12, cols in 1usize..12) {
        let mut r = rng(seed);
        let op = random_matrix(&mut r, rows, cols);
        let x: Vec<f64> = (0..cols).map(|i| ((i * 7 + seed as usize) % 5) as f64 - 2.0).collect();
        let z: Vec<f64> = (0..rows).map(|i| ((i * 3 + seed as usize) % 7) as f64 - 3.0).collect();
        let lhs = common::dot(&op.apply(&x).unwrap(), &z);
        let rhs = common::dot(&x, &op.apply_adjoint(&z).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn norm_bounds_every_image(seed in 0u64..500) {
        let mut r = rng(seed);
        let op = random_matrix(&mut r, 6, 9);
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7 + seed as f64).sin()).collect();
        let tx = op.apply(&x).unwrap();
        let lhs = common::dot(&tx, &tx).sqrt();
        let rhs = op.norm_estimate() * common::dot(&x, &x).sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-8));
    }
}
