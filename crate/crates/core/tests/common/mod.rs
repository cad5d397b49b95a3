#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unmix_core::experiments::ProblemSpec;
use unmix_core::{generate_problem, DenseOperator, MeasurementProblem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small normalized Gaussian problem with ground truth.
pub fn small_problem(seed: u64, m: usize, n: usize, sparsity: usize) -> MeasurementProblem {
    generate_problem(&ProblemSpec { m, n, sparsity, seed, ..ProblemSpec::default() }).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseOperator {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseOperator::new(rows, cols, data).unwrap()
}

/// Singular values by one-sided Jacobi on the columns of `a` (`rows × cols`,
/// row-major), descending.
pub fn jacobi_singular_values(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    // work on the thinner orientation: columns of length `len`, `k` of them
    let (k, len, mut cols_data): (usize, usize, Vec<Vec<f64>>) = if cols <= rows {
        (cols, rows, (0..cols).map(|j| (0..rows).map(|i| a[i * cols + j]).collect()).collect())
    } else {
        (rows, cols, (0..rows).map(|i| a[i * cols..(i + 1) * cols].to_vec()).collect())
    };
    let _ = len;
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = cols_data[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols_data[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols_data[p].iter().zip(&cols_data[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols_data.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols_data.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Scalar bisection root of a nondecreasing `g` on `[lo, hi]`.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Distance of `u` from the soft-thresholding path `{S_γ(y) : γ ≥ 0}` in ℝ^n,
/// measured componentwise after reconstructing `γ`.
pub fn soft_path_deviation(u: &[f64], y: &[f64]) -> f64 {
    // candidate γ from every nonzero component; zero vector sits at γ = max|y|
    let gammas: Vec<f64> = u
        .iter()
        .zip(y)
        .filter(|(a, _)| **a != 0.0)
        .map(|(a, b)| b.abs() - a.abs())
        .collect();
    let gamma = if gammas.is_empty() {
        y.iter().fold(0.0f64, |m, b| m.max(b.abs()))
    } else {
        gammas.iter().sum::<f64>() / gammas.len() as f64
    };
    let gamma = gamma.max(0.0);
    u.iter()
        .zip(y)
        .map(|(a, b)| (a - b.signum() * (b.abs() - gamma).max(0.0)).abs())
        .fold(0.0, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Brute-force ℓ∞ prox: minimizes `‖t − x‖² + β‖t‖_∞` over a grid of
/// candidate sup-norms `s`, using that for fixed `s` the best `t` clips `x`.
pub fn linf_prox_grid(x: &[f64], beta: f64, step: f64) -> Vec<f64> {
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clip = |s: f64| -> Vec<f64> { x.iter().map(|v| v.clamp(-s, s)).collect() };
    let obj = |s: f64| -> f64 {
        x.iter().map(|v| (v - v.clamp(-s, s)).powi(2)).sum::<f64>() + beta * s
    };
    let steps = (xmax / step).ceil() as usize;
    let mut best = (0.0, obj(0.0));
    for k in 0..=steps {
        let s = (k as f64 * step).min(xmax);
        let f = obj(s);
        if f < best.1 {
            best = (s, f);
        }
    }
    clip(best.0)
}
