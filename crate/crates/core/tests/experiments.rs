mod common;

use proptest::prelude::*;
use unmix_core::experiments::{
    experiment_solve_config, grid_search_with_threshold, mono_sweep, support_of, MonoConfig,
};
use unmix_core::{
    best_parameter_regions, best_result, compare_multi_mono, generate_problem, grid_search,
    metric_ae, metric_sd, Criterion, GridSpec, ProblemSpec, QNorm, SolveConfig,
};

fn small_spec(seed: u64) -> ProblemSpec {
    ProblemSpec { m: 20, n: 40, sparsity: 3, seed, ..ProblemSpec::default() }
}

fn small_grid(count: usize) -> GridSpec {
    GridSpec { alpha0: 0.002, beta0: 0.002, ratio: 1.6, count }
}

fn fast_config() -> SolveConfig {
    SolveConfig { max_outer: 60, ..experiment_solve_config() }
}

#[test]
fn generation_is_reproducible_and_shaped() {
    let spec = ProblemSpec { seed: 42, ..ProblemSpec::default() };
    let a = generate_problem(&spec).unwrap();
    let b = generate_problem(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!((a.rows(), a.cols()), (100, 256));
    let v = a.truth_v.as_ref().unwrap();
    assert!((common::dot(v, v).sqrt() - 0.7).abs() <= 1e-12);
    let u = a.truth_u.as_ref().unwrap();
    assert_eq!(support_of(u).len(), 7);
    assert!(u.iter().all(|x| x.abs() <= 3.0));
    assert!(v.iter().all(|x| x.abs() <= 0.7));
    assert!((a.op.norm_estimate() - 0.99).abs() <= 1e-9);
    // y = T(u† + v†) in normalized units
    let x: Vec<f64> = u.iter().zip(v).map(|(p, q)| p + q).collect();
    let tx = a.op.apply(&x).unwrap();
    assert!(common::dist(&tx, &a.y) <= 1e-12 * common::dot(&a.y, &a.y).sqrt());
    let other = generate_problem(&ProblemSpec { seed: 43, ..spec }).unwrap();
    assert_ne!(a.y, other.y);
}

#[test]
fn min_magnitude_keeps_entries_away_from_zero() {
    let spec = ProblemSpec { min_magnitude: 1.0, seed: 3, ..ProblemSpec::default() };
    let p = generate_problem(&spec).unwrap();
    let u = p.truth_u.unwrap();
    assert!(u.iter().filter(|x| **x != 0.0).all(|x| (1.0..=3.0).contains(&x.abs())));
}

#[test]
fn oversized_sparsity_is_rejected() {
    assert!(generate_problem(&ProblemSpec { sparsity: 41, ..small_spec(0) }).is_err());
}

#[test]
fn grid_sizes_and_order() {
    let prob = generate_problem(&small_spec(1)).unwrap();
    let one = grid_search(&prob, 0.5, QNorm::Finite(2.0), &small_grid(0), &fast_config()).unwrap();
    assert_eq!(one.len(), 1);
    let g = small_grid(3);
    let rs = grid_search(&prob, 0.5, QNorm::Finite(2.0), &g, &fast_config()).unwrap();
    assert_eq!(rs.len(), 16);
    for (k, r) in rs.iter().enumerate() {
        assert_eq!(r.alpha, g.alphas()[k / 4]);
        assert_eq!(r.beta, g.betas()[k % 4]);
        assert_eq!(r.ae, metric_ae(&r.solution.u, prob.truth_u.as_ref().unwrap()).unwrap());
    }
}

#[test]
fn feasibility_is_monotone_in_threshold() {
    let prob = generate_problem(&small_spec(2)).unwrap();
    let g = small_grid(5);
    let mut prev: Option<Vec<bool>> = None;
    for &t in &[0.0, 0.05, 0.1, 0.3, 1.0, 10.0] {
        let rs = grid_search_with_threshold(&prob, 0.5, QNorm::Finite(2.0), &g, &fast_config(), t).unwrap();
        let flags: Vec<bool> = rs.iter().map(|r| r.feasible).collect();
        if t == 0.0 {
            assert!(flags.iter().all(|f| !f));
        }
        if let Some(p) = &prev {
            assert!(p.iter().zip(&flags).all(|(a, b)| !a || *b));
        }
        let truth = support_of(prob.truth_u.as_ref().unwrap()).len();
        for r in &rs {
            assert_eq!(r.feasible, r.feasible_under(truth, t));
        }
        prev = Some(flags);
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let prob = generate_problem(&small_spec(3)).unwrap();
    let g = small_grid(4);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| grid_search(&prob, 0.3, QNorm::Inf, &g, &fast_config()).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn twenty_best_pairs_on_protocol_grid() {
    let prob = generate_problem(&small_spec(4)).unwrap();
    let cfg = SolveConfig { max_outer: 5, ..experiment_solve_config() };
    let rs = grid_search(&prob, 0.5, QNorm::Finite(2.0), &GridSpec::default(), &cfg).unwrap();
    assert_eq!(rs.len(), 961);
    let top = best_parameter_regions(&rs, Criterion::Ae, 20).unwrap();
    assert_eq!(top.len(), 20);
    let best = best_result(&rs, Criterion::Ae).unwrap();
    assert_eq!(top[0], (best.alpha, best.beta));
    let ae_of = |pair: &(f64, f64)| rs.iter().find(|r| (r.alpha, r.beta) == *pair).unwrap().ae;
    for w in top.windows(2) {
        assert!(ae_of(&w[0]) <= ae_of(&w[1]));
    }
    let all = best_parameter_regions(&rs, Criterion::Sd, 961).unwrap();
    assert_eq!(all.len(), 961);
}

#[test]
fn degenerate_multi_matches_mono() {
    // β so large that v ≡ 0: the multi-penalty iteration is the mono one
    let problems: Vec<_> = (0..3).map(|s| generate_problem(&small_spec(10 + s)).unwrap()).collect();
    let grid = GridSpec { alpha0: 0.01, beta0: 1e6, ratio: 2.0, count: 2 };
    let alphas = grid.alphas();
    let cfg = SolveConfig { max_outer: 5000, stop_tol: 1e-13, ..experiment_solve_config() };
    let mono_cfg = MonoConfig { max_iters: 200_000, stop_tol: 1e-14 };
    let stats =
        compare_multi_mono(&problems, &[0.5], &[QNorm::Inf], &grid, &alphas, &cfg, &mono_cfg).unwrap();
    let multi = &stats.multi[0];
    let mono = &stats.mono[0];
    for (a, b) in multi.per_problem.iter().zip(&mono.per_problem) {
        assert!((a.ae - b.ae).abs() <= 1e-8);
        assert_eq!(a.sd, b.sd);
    }
    assert_eq!(multi.prob_sd_better_or_equal, 1.0);
}

#[test]
fn empty_q_list_gives_mono_only_report() {
    let problems = vec![generate_problem(&small_spec(5)).unwrap()];
    let grid = small_grid(2);
    let stats = compare_multi_mono(
        &problems,
        &[0.3, 0.5],
        &[],
        &grid,
        &grid.alphas(),
        &fast_config(),
        &MonoConfig::default(),
    )
    .unwrap();
    assert!(stats.multi.is_empty());
    assert_eq!(stats.mono.len(), 2);
    assert!(compare_multi_mono(&[], &[0.5], &[], &grid, &[0.1], &fast_config(), &MonoConfig::default()).is_err());
}

#[test]
fn mono_sweep_reports_best_alpha() {
    let prob = generate_problem(&small_spec(6)).unwrap();
    let alphas = small_grid(4).alphas();
    let best = mono_sweep(&prob, 1.0, &alphas, &MonoConfig::default()).unwrap();
    assert!(alphas.contains(&best.ae_params.0));
    assert!(best.ae_params.1.is_nan());
}

#[test]
fn tiny_penalties_approach_least_squares_floor() {
    // overdetermined, so least squares is unique and the error floor is its error
    let prob = generate_problem(&ProblemSpec { m: 60, n: 20, sparsity: 3, seed: 8, ..ProblemSpec::default() }).unwrap();
    let g = GridSpec { alpha0: 1e-7, beta0: 1e-7, ratio: 2.0, count: 0 };
    let cfg = SolveConfig { max_outer: 5000, stop_tol: 1e-12, ..experiment_solve_config() };
    let r = &grid_search(&prob, 1.0, QNorm::Finite(2.0), &g, &cfg).unwrap()[0];
    let x: Vec<f64> = r.solution.u.iter().zip(&r.solution.v).map(|(a, b)| a + b).collect();
    let truth: Vec<f64> = prob.truth_u.as_ref().unwrap().iter().zip(prob.truth_v.as_ref().unwrap()).map(|(a, b)| a + b).collect();
    // noiseless data: u + v recovers u† + v†
    assert!(common::dist(&x, &truth) <= 1e-3);
}

proptest! {
    #[test]
    fn sd_is_symmetric(a in prop::collection::vec(-2.0f64..2.0, 12), mask in prop::collection::vec(any::<bool>(), 24)) {
        let a: Vec<f64> = a.iter().zip(&mask).map(|(x, m)| if *m { 0.0 } else { *x }).collect();
        let b: Vec<f64> = a.iter().zip(&mask[12..]).map(|(x, m)| if *m { 0.0 } else { x + 0.5 }).collect();
        prop_assert_eq!(metric_sd(&a, &b).unwrap(), metric_sd(&b, &a).unwrap());
    }

    #[test]
    fn ae_triangle_inequality(
        a in prop::collection::vec(-5.0f64..5.0, 8),
        b in prop::collection::vec(-5.0f64..5.0, 8),
        c in prop::collection::vec(-5.0f64..5.0, 8),
    ) {
        let ab = metric_ae(&a, &b).unwrap();
        let bc = metric_ae(&b, &c).unwrap();
        let ac = metric_ae(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert_eq!(ab, metric_ae(&b, &a).unwrap());
    }
}
