//! Thresholding operators.
//!
//! * [`threshold_lp`] – the proximal map `H_α^p` of `t ↦ α|t|^p`, `p ∈ [0, 1]`,
//!   for the scaled objective `(t − x)² + α|t|^p`.
//! * [`shrink_lq`] – the minimizer of `(t − x)² + β|t|^q + ε t²`, `q ≥ 2`.
//! * [`threshold_linf`] – the vector minimizer of `‖v − x‖² + β‖v‖_∞`.
//!
//! For `0 < p < 1` the map `H_α^p` jumps at `|x| = τ_α` from zero to `γ_α`;
//! on `|x| ≥ τ_α` it inverts `F(t) = t + (αp/2) t^{p−1}` on the branch
//! `t ≥ γ_α`. Inverses are found with safeguarded Newton iterations.

use std::cmp::Ordering;

use crate::error::{Error, Result};

const ROOT_TOL: f64 = 1e-12;
const ROOT_MAX_ITERS: usize = 200;

/// Precomputed constants of `H_α^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpThresholdParams {
    pub p: f64,
    pub alpha: f64,
    /// Smallest nonzero output magnitude.
    pub gamma_alpha: f64,
    /// Input magnitude at which the output leaves zero.
    pub tau_alpha: f64,
    /// Minimizer of `F_α^p` on `(0, ∞)`; zero for `p ∈ {0, 1}`.
    pub t_alpha: f64,
}

impl LpThresholdParams {
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        let params = if p == 0.0 {
            let s = alpha.sqrt();
            LpThresholdParams { p, alpha, gamma_alpha: s, tau_alpha: s, t_alpha: 0.0 }
        } else if p == 1.0 {
            LpThresholdParams { p, alpha, gamma_alpha: 0.0, tau_alpha: alpha / 2.0, t_alpha: 0.0 }
        } else {
            let gamma = (alpha * (1.0 - p)).powf(1.0 / (2.0 - p));
            LpThresholdParams {
                p,
                alpha,
                gamma_alpha: gamma,
                tau_alpha: (2.0 - p) / (2.0 - 2.0 * p) * gamma,
                t_alpha: (alpha * p * (1.0 - p) / 2.0).powf(1.0 / (2.0 - p)),
            }
        };
        Ok(params)
    }

    /// `F_α^p(t) = t + (αp/2) sgn(t)|t|^{p−1}` for `t ≠ 0`.
    pub fn f(&self, t: f64) -> f64 {
        t + 0.5 * self.alpha * self.p * t.signum() * t.abs().powf(self.p - 1.0)
    }

    /// `H_α^p(x)` for finite `x`.
    pub fn threshold(&self, x: f64) -> f64 {
        let a = x.abs();
        if a < self.tau_alpha {
            return 0.0;
        }
        let mag = if self.p == 0.0 {
            a
        } else if self.p == 1.0 {
            a - self.tau_alpha
        } else {
            self.invert_f(a)
        };
        mag.copysign(x)
    }

    /// Root of `F(t) = a` on `[γ_α, a]`, assuming `a ≥ τ_α`.
    fn invert_f(&self, a: f64) -> f64 {
        let c = 0.5 * self.alpha * self.p;
        let e = self.p - 1.0;
        let g = |t: f64| t + c * t.powf(e) - a;
        let dg = |t: f64| 1.0 + c * e * t.powf(e - 1.0);
        safeguarded_newton(g, dg, self.gamma_alpha, a, a).max(self.gamma_alpha)
    }
}

/// Precomputed constants of the `ℓ_q` shrinkage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqShrinkParams {
    pub q: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// `βq / (2(1+ε)^{q−1})`.
    pub coeff: f64,
}

impl LqShrinkParams {
    pub fn new(q: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !(q >= 2.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must be finite and >= 2, got {q}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {epsilon}")));
        }
        Ok(LqShrinkParams {
            q,
            beta,
            epsilon,
            coeff: beta * q / (2.0 * (1.0 + epsilon).powf(q - 1.0)),
        })
    }

    /// `(1+ε)^{−1} S_{β,ε}^q(x)` for finite `x`.
    pub fn shrink(&self, x: f64) -> f64 {
        let a = x.abs();
        let k = self.coeff;
        let t = if a == 0.0 || k == 0.0 {
            a
        } else if self.q == 2.0 {
            a / (1.0 + k)
        } else {
            let e = self.q - 1.0;
            let pow: fn(f64, f64) -> f64 = if e.fract() == 0.0 && e < 64.0 {
                |t, e| t.powi(e as i32)
            } else {
                f64::powf
            };
            let g = |t: f64| t + k * pow(t, e) - a;
            let dg = |t: f64| 1.0 + k * e * pow(t, e - 1.0);
            // both a and (a/k)^{1/(q-1)} bound the root from above
            let start = a.min((a / k).powf(1.0 / e));
            safeguarded_newton(g, dg, 0.0, a, start)
        };
        t.copysign(x) / (1.0 + self.epsilon)
    }
}

/// Newton's method on an increasing function `g` with root in `[lo, hi]`,
/// falling back to bisection whenever a step leaves the bracket.
fn safeguarded_newton(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    start: f64,
) -> f64 {
    let mut t = start.clamp(lo, hi);
    for _ in 0..ROOT_MAX_ITERS {
        let gt = g(t);
        if gt == 0.0 {
            return t;
        }
        if gt > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = dg(t);
        let mut next = t - gt / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= ROOT_TOL * t.abs().max(1e-300) || hi - lo <= ROOT_TOL * hi.abs() {
            return next;
        }
        t = next;
    }
    t
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("thresholding input {x}")))
    }
}

/// `H_α^p(x)`. At `|x| = τ_α` the nonzero branch is returned.
pub fn threshold_lp(x: f64, params: &LpThresholdParams) -> Result<f64> {
    check_finite(x)?;
    Ok(params.threshold(x))
}

/// Closed-form `H_α^{1/2}`.
pub fn threshold_half_closed_form(x: f64, alpha: f64) -> Result<f64> {
    check_finite(x)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let a = x.abs();
    let tau = 54f64.cbrt() / 4.0 * alpha.powf(2.0 / 3.0);
    if a < tau {
        return Ok(0.0);
    }
    let arg = (alpha / 8.0 * (a / 3.0).powf(-1.5)).min(1.0);
    let phi = arg.acos();
    Ok(2.0 / 3.0 * x * (1.0 + (2.0 * std::f64::consts::PI / 3.0 - 2.0 / 3.0 * phi).cos()))
}

/// `(1+ε)^{−1} S_{β,ε}^q(x)`.
pub fn shrink_lq(x: f64, params: &LqShrinkParams) -> Result<f64> {
    check_finite(x)?;
    Ok(params.shrink(x))
}

/// Minimizer of `‖v − x‖² + β‖v‖_∞`.
///
/// Entries are ranked by magnitude (stable, so ties keep index order); the
/// top `n` are clipped to a common magnitude and the rest pass through.
/// Returns zero when `‖x‖₁ ≤ β/2`.
pub fn threshold_linf(x: &[f64], beta: f64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::Empty("threshold_linf input"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("threshold_linf input {v}")));
    }
    let mut out = x.to_vec();
    threshold_linf_in_place(&mut out, beta);
    Ok(out)
}

pub(crate) fn threshold_linf_in_place(x: &mut [f64], beta: f64) {
    let half = 0.5 * beta;
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= half {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].abs().partial_cmp(&x[a].abs()).unwrap_or(Ordering::Equal));
    let mag = |k: usize| x[order[k]].abs();

    let mut n = 1;
    if x.len() > 1 && mag(1) >= mag(0) - half {
        let mut partial = mag(0);
        for k in 1..x.len() {
            // k is the zero-based position of candidate count k + 1
            if mag(k) * k as f64 >= partial - half {
                n = k + 1;
            }
            partial += mag(k);
        }
    }
    let level = ((0..n).map(mag).sum::<f64>() - half) / n as f64;
    for &i in &order[..n] {
        x[i] = level.copysign(x[i]);
    }
}

/// Scalar penalty for [`brute_force_prox_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarPenalty {
    /// `α|t|^p`, with `|t|^0 = [t ≠ 0]`.
    Lp { p: f64, alpha: f64 },
    /// `β|t|^q + ε t²`.
    Lq { q: f64, beta: f64, epsilon: f64 },
}

impl ScalarPenalty {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarPenalty::Lp { p, alpha } => {
                if t == 0.0 {
                    0.0
                } else if p == 0.0 {
                    alpha
                } else {
                    alpha * t.abs().powf(p)
                }
            }
            ScalarPenalty::Lq { q, beta, epsilon } => beta * t.abs().powf(q) + epsilon * t * t,
        }
    }

    /// `(t − x)² + penalty(t)`.
    pub fn objective(&self, x: f64, t: f64) -> f64 {
        (t - x) * (t - x) + self.value(t)
    }
}

/// Reference minimizer of `(t − x)² + penalty(t)` by exhaustive search.
///
/// Scans a uniform grid on `[−grid_halfwidth, grid_halfwidth]`, refines every
/// local grid minimum by golden-section search, and also tries `t = 0`.
/// Slow; intended as a test oracle.
pub fn brute_force_prox_1d(
    x: f64,
    penalty: ScalarPenalty,
    grid_halfwidth: f64,
    coarse_step: f64,
) -> f64 {
    let f = |t: f64| penalty.objective(x, t);
    let steps = (2.0 * grid_halfwidth / coarse_step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| -grid_halfwidth + k as f64 * coarse_step)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();

    let mut best_t = 0.0;
    let mut best_f = f(0.0);
    let consider = |t: f64, best_t: &mut f64, best_f: &mut f64| {
        let ft = f(t);
        if ft < *best_f {
            *best_f = ft;
            *best_t = t;
        }
    };
    for k in 0..grid.len() {
        let left = if k > 0 { vals[k - 1] } else { f64::INFINITY };
        let right = if k + 1 < grid.len() { vals[k + 1] } else { f64::INFINITY };
        if vals[k] <= left && vals[k] <= right {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(grid.len() - 1)];
            let t = golden_section(&f, lo, hi);
            consider(t, &mut best_t, &mut best_f);
            consider(grid[k], &mut best_t, &mut best_f);
        }
    }
    best_t
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    0.5 * (a + b)
}
