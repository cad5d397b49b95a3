mod common;

use common::{bisect, linf_prox_grid};
use proptest::prelude::*;
use unmix_core::prox::{brute_force_prox_1d, ScalarPenalty};
use unmix_core::{
    shrink_lq, threshold_half_closed_form, threshold_linf, threshold_lp, LpThresholdParams,
    LqShrinkParams,
};

fn lp(p: f64, alpha: f64) -> LpThresholdParams {
    LpThresholdParams::new(p, alpha).unwrap()
}

#[test]
fn lp_threshold_matches_grid_oracle() {
    let mut r = common::rng(5);
    use rand::Rng;
    for &p in &[0.0, 0.3, 0.5, 0.8, 1.0] {
        for &alpha in &[0.01, 0.1, 1.0] {
            let params = lp(p, alpha);
            for _ in 0..50 {
                let x: f64 = r.gen_range(-5.0..5.0);
                if (x.abs() - params.tau_alpha).abs() < 1e-3 {
                    continue;
                }
                let want = brute_force_prox_1d(x, ScalarPenalty::Lp { p, alpha }, 6.0, 1e-3);
                let got = threshold_lp(x, &params).unwrap();
                assert!((got - want).abs() <= 1e-4, "p={p} α={alpha} x={x}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn half_closed_form_against_bisection() {
    for &alpha in &[0.05, 0.5, 2.0] {
        let params = lp(0.5, alpha);
        for k in 0..200 {
            let x = -6.0 + 12.0 * k as f64 / 199.0;
            let closed = threshold_half_closed_form(x, alpha).unwrap();
            if x.abs() < params.tau_alpha {
                assert_eq!(closed, 0.0);
                continue;
            }
            let a = x.abs();
            let root = bisect(|t| params.f(t) - a, params.gamma_alpha, a);
            assert!((closed.abs() - root).abs() <= 1e-9, "α={alpha} x={x}");
            assert_eq!(closed.signum(), x.signum());
        }
    }
}

#[test]
fn lq_shrink_matches_grid_oracle() {
    for &(q, beta, eps) in &[(2.0, 0.5, 0.0), (4.0, 0.3, 0.0), (10.0, 0.05, 0.1), (3.0, 1.0, 0.5)] {
        let params = LqShrinkParams::new(q, beta, eps).unwrap();
        for k in 0..41 {
            let x = -4.0 + 0.2 * k as f64;
            let want =
                brute_force_prox_1d(x, ScalarPenalty::Lq { q, beta, epsilon: eps }, 5.0, 1e-3);
            let got = shrink_lq(x, &params).unwrap();
            assert!((got - want).abs() <= 1e-6, "q={q} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn linf_prox_matches_sup_norm_scan() {
    use rand::Rng;
    let mut r = common::rng(9);
    for _ in 0..100 {
        let d = r.gen_range(1..=6);
        let x: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let beta = r.gen_range(0.01..8.0);
        let got = threshold_linf(&x, beta).unwrap();
        let want = linf_prox_grid(&x, beta, 1e-4);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 2e-4, "x={x:?} β={beta}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn linf_prox_satisfies_moreau_optimality() {
    // w = x − prox(x) must lie in the ℓ1 ball of radius β/2 and attain
    // ⟨w, prox(x)⟩ = (β/2)‖prox(x)‖_∞.
    let x = [0.4, -2.5, 1.9, 0.0, -1.1];
    for &beta in &[0.3, 1.0, 2.0, 5.0, 20.0] {
        let r = threshold_linf(&x, beta).unwrap();
        let w: Vec<f64> = x.iter().zip(&r).map(|(a, b)| a - b).collect();
        let l1: f64 = w.iter().map(|v| v.abs()).sum();
        let inf = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(l1 <= beta / 2.0 + 1e-12);
        assert!((common::dot(&w, &r) - beta / 2.0 * inf).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn lp_threshold_is_odd(x in -10.0f64..10.0, p in 0.0f64..=1.0, alpha in 0.001f64..5.0) {
        let params = lp(p, alpha);
        let a = threshold_lp(x, &params).unwrap();
        let b = threshold_lp(-x, &params).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn lp_threshold_respects_gap(x in -10.0f64..10.0, p in 0.01f64..0.99, alpha in 0.001f64..5.0) {
        let params = lp(p, alpha);
        let h = threshold_lp(x, &params).unwrap();
        prop_assert!(h == 0.0 || h.abs() >= params.gamma_alpha);
        prop_assert!(h.abs() <= x.abs());
        prop_assert!(h == 0.0 || h.signum() == x.signum());
    }

    #[test]
    fn lp_threshold_is_monotone(x in -10.0f64..10.0, dx in 0.0f64..2.0, p in 0.0f64..=1.0, alpha in 0.001f64..5.0) {
        let params = lp(p, alpha);
        prop_assert!(threshold_lp(x, &params).unwrap() <= threshold_lp(x + dx, &params).unwrap() + 1e-12);
    }

    #[test]
    fn soft_threshold_is_nonexpansive(x in -10.0f64..10.0, y in -10.0f64..10.0, alpha in 0.001f64..5.0) {
        let params = lp(1.0, alpha);
        let d = threshold_lp(x, &params).unwrap() - threshold_lp(y, &params).unwrap();
        prop_assert!(d.abs() <= (x - y).abs() + 1e-15);
    }

    #[test]
    fn lq_shrink_is_odd_and_nonexpansive(x in -10.0f64..10.0, y in -10.0f64..10.0, q in 2.0f64..12.0, beta in 0.0f64..3.0, eps in 0.0f64..1.0) {
        let params = LqShrinkParams::new(q, beta, eps).unwrap();
        let sx = shrink_lq(x, &params).unwrap();
        prop_assert!((sx + shrink_lq(-x, &params).unwrap()).abs() <= 1e-15);
        let sy = shrink_lq(y, &params).unwrap();
        prop_assert!((sx - sy).abs() <= (x - y).abs() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn linf_prox_is_odd_and_nonexpansive(
        x in prop::collection::vec(-5.0f64..5.0, 1..8),
        shift in prop::collection::vec(-1.0f64..1.0, 8),
        beta in 0.01f64..10.0,
    ) {
        let y: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let px = threshold_linf(&x, beta).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let pn = threshold_linf(&neg, beta).unwrap();
        for (a, b) in px.iter().zip(&pn) {
            prop_assert!((a + b).abs() <= 1e-12);
        }
        let py = threshold_linf(&y, beta).unwrap();
        prop_assert!(common::dist(&px, &py) <= common::dist(&x, &y) + 1e-12);
    }
}
