//! Alternating iterative thresholding for the multi-penalty functional.
//!
//! Each outer iteration runs `L` thresholding steps on `u` with `v` frozen,
//! then `M` steps on `v` with the new `u` frozen. Every step minimizes a
//! surrogate that majorizes `J` as long as `‖T‖ ≤ 1`, so `J` never increases.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist2, DenseOperator, MeasurementProblem};
use crate::prox::{threshold_linf_in_place, LpThresholdParams, LqShrinkParams};

/// Slack on `‖T‖ ≤ 1` accepted by the solver.
const NORM_SLACK: f64 = 1e-9;

/// Exponent of the noise penalty: a finite `q ≥ 2` or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QNorm {
    Finite(f64),
    Inf,
}

impl QNorm {
    pub fn is_inf(&self) -> bool {
        matches!(self, QNorm::Inf)
    }

    /// Sort key; `∞` orders last.
    pub fn as_f64(&self) -> f64 {
        match *self {
            QNorm::Finite(q) => q,
            QNorm::Inf => f64::INFINITY,
        }
    }
}

impl fmt::Display for QNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QNorm::Finite(q) => write!(f, "{q}"),
            QNorm::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for QNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(QNorm::Inf);
        }
        let q: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("invalid q {s:?}")))?;
        if q.is_infinite() && q > 0.0 {
            return Ok(QNorm::Inf);
        }
        if !(q >= 2.0) {
            return Err(Error::InvalidParameter(format!("q must be >= 2 or inf, got {s}")));
        }
        Ok(QNorm::Finite(q))
    }
}

impl Serialize for QNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QNorm::Finite(q) => s.serialize_f64(*q),
            QNorm::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for QNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(q) => Ok(QNorm::Finite(q)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Regularization parameters `(p, q, α, β, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegParams {
    pub p: f64,
    pub q: QNorm,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl RegParams {
    pub fn new(p: f64, q: QNorm, alpha: f64, beta: f64, epsilon: f64) -> Result<Self> {
        let r = RegParams { p, q, alpha, beta, epsilon };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if let QNorm::Finite(q) = self.q {
            if !(q >= 2.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!("q must be >= 2, got {q}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if self.q.is_inf() && self.epsilon != 0.0 {
            return Err(Error::InvalidParameter("q = inf requires epsilon = 0".into()));
        }
        Ok(())
    }

    pub fn lp(&self) -> Result<LpThresholdParams> {
        LpThresholdParams::new(self.p, self.alpha)
    }
}

/// Loop lengths and stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// `L`, thresholding steps on `u` per outer iteration.
    pub inner_u_iters: usize,
    /// `M`, thresholding steps on `v` per outer iteration.
    pub inner_v_iters: usize,
    pub max_outer: usize,
    /// Stop once `‖Δu‖₂ + ‖Δv‖₂` over one outer iteration drops below this.
    pub stop_tol: f64,
    /// Keep per-iteration support snapshots.
    pub record_trace: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_v: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            inner_u_iters: 20,
            inner_v_iters: 20,
            max_outer: 5000,
            stop_tol: 1e-10,
            record_trace: true,
            initial_u: None,
            initial_v: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inner_u_iters == 0 || self.inner_v_iters == 0 {
            return Err(Error::InvalidParameter("inner loop lengths must be >= 1".into()));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidParameter("max_outer must be >= 1".into()));
        }
        if !(self.stop_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stop_tol must be > 0, got {}",
                self.stop_tol
            )));
        }
        Ok(())
    }
}

/// Sparse part `u`, noise part `v`, and the support partition of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `Γ₁`: indices with `u_λ ≠ 0`.
    pub support_u: Vec<usize>,
    /// `Γ₀`: indices with `u_λ = 0`.
    pub zero_set: Vec<usize>,
}

impl SolutionPair {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        let (support_u, zero_set) = (0..u.len()).partition(|&i| u[i] != 0.0);
        SolutionPair { u, v, support_u, zero_set }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxOuterReached,
}

/// Per-outer-iteration diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    /// `J` after each outer iteration.
    pub j_values: Vec<f64>,
    pub u_diffs: Vec<f64>,
    pub v_diffs: Vec<f64>,
    pub support_sizes: Vec<usize>,
    /// `Γ₁` after each outer iteration; empty unless `record_trace`.
    pub support_history: Vec<Vec<usize>>,
    /// First outer iteration (1-based) from which every inner `u` iterate
    /// carries the final support.
    pub support_fixed_at: Option<usize>,
    /// Inner `u` iterates with a nonzero entry below `γ_α`.
    pub gap_violations: usize,
    pub iterations: usize,
    pub status: SolveStatus,
    pub fixed_point_residuals: Option<FixedPointReport>,
}

impl SolveTrace {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// One JSON object per outer iteration: `{n, J, du, dv, support_size}`.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            n: usize,
            #[serde(rename = "J")]
            j: f64,
            du: f64,
            dv: f64,
            support_size: usize,
        }
        for k in 0..self.j_values.len() {
            let row = Row {
                n: k + 1,
                j: self.j_values[k],
                du: self.u_diffs[k],
                dv: self.v_diffs[k],
                support_size: self.support_sizes[k],
            };
            serde_json::to_writer(&mut w, &row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Maximum violations of the fixed-point conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Stationarity defect on `Γ₁` (plus any gap violation).
    pub gamma1_residual: f64,
    /// Excess of `|[T*(y − T(u+v))]_λ|` over the zero threshold on `Γ₀`.
    pub gamma0_violation: f64,
    /// Optimality defect of `v`.
    pub v_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl FixedPointReport {
    pub fn max_residual(&self) -> f64 {
        self.gamma1_residual.max(self.gamma0_violation).max(self.v_residual)
    }
}

fn check_dims(problem: &MeasurementProblem, u: &[f64], v: &[f64]) -> Result<()> {
    let n = problem.cols();
    for len in [u.len(), v.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(())
}

fn lp_penalty(u: &[f64], p: f64) -> f64 {
    if p == 0.0 {
        u.iter().filter(|&&x| x != 0.0).count() as f64
    } else if p == 1.0 {
        u.iter().map(|x| x.abs()).sum()
    } else {
        u.iter().filter(|&&x| x != 0.0).map(|x| x.abs().powf(p)).sum()
    }
}

fn lq_penalty(v: &[f64], q: QNorm) -> f64 {
    match q {
        QNorm::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        QNorm::Finite(q) if q == 2.0 => v.iter().map(|x| x * x).sum(),
        QNorm::Finite(q) => v.iter().map(|x| x.abs().powf(q)).sum(),
    }
}

fn misfit(op: &DenseOperator, y: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let x: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let mut tx = vec![0.0; op.rows()];
    op.apply_into(&x, &mut tx);
    tx.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn penalties(u: &[f64], v: &[f64], params: &RegParams) -> f64 {
    let eps_term = if params.epsilon > 0.0 {
        params.epsilon * v.iter().map(|x| x * x).sum::<f64>()
    } else {
        0.0
    };
    params.alpha * lp_penalty(u, params.p) + params.beta * lq_penalty(v, params.q) + eps_term
}

/// `J(u,v) = ‖T(u+v) − y‖² + α‖u‖_p^p + β‖v‖_q^q + ε‖v‖²`.
///
/// `‖u‖_0^0` counts nonzeros and `‖v‖_∞^∞` is read as `‖v‖_∞`.
pub fn eval_functional(u: &[f64], v: &[f64], problem: &MeasurementProblem, params: &RegParams) -> Result<f64> {
    check_dims(problem, u, v)?;
    Ok(misfit(&problem.op, &problem.y, u, v) + penalties(u, v, params))
}

fn surrogate_gap(op: &DenseOperator, x: &[f64], a: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
    let mut td = vec![0.0; op.rows()];
    op.apply_into(&d, &mut td);
    d.iter().map(|x| x * x).sum::<f64>() - td.iter().map(|x| x * x).sum::<f64>()
}

/// `J(u,v) + ‖u − a‖² − ‖T(u − a)‖²`.
pub fn eval_surrogate_u(
    u: &[f64],
    v: &[f64],
    a: &[f64],
    problem: &MeasurementProblem,
    params: &RegParams,
) -> Result<f64> {
    check_dims(problem, u, a)?;
    Ok(eval_functional(u, v, problem, params)? + surrogate_gap(&problem.op, u, a))
}

/// `J(u,v) + ‖v − a‖² − ‖T(v − a)‖²`.
pub fn eval_surrogate_v(
    u: &[f64],
    v: &[f64],
    a: &[f64],
    problem: &MeasurementProblem,
    params: &RegParams,
) -> Result<f64> {
    check_dims(problem, v, a)?;
    Ok(eval_functional(u, v, problem, params)? + surrogate_gap(&problem.op, v, a))
}

/// Scratch buffers and precomputed operator constants for one solve.
struct Stepper<'a> {
    op: &'a DenseOperator,
    y: &'a [f64],
    lp: LpThresholdParams,
    lq: Option<LqShrinkParams>,
    beta: f64,
    base: Vec<f64>,
    tx: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(problem: &'a MeasurementProblem, params: &RegParams) -> Result<Self> {
        params.validate()?;
        let lq = match params.q {
            QNorm::Finite(q) => Some(LqShrinkParams::new(q, params.beta, params.epsilon)?),
            QNorm::Inf => None,
        };
        Ok(Stepper {
            op: &problem.op,
            y: &problem.y,
            lp: params.lp()?,
            lq,
            beta: params.beta,
            base: vec![0.0; problem.rows()],
            tx: vec![0.0; problem.rows()],
            grad: vec![0.0; problem.cols()],
        })
    }

    /// `base = y − T w` for the frozen block `w`.
    fn freeze(&mut self, w: &[f64]) {
        self.op.apply_into(w, &mut self.tx);
        for ((b, y), t) in self.base.iter_mut().zip(self.y).zip(&self.tx) {
            *b = y - t;
        }
    }

    /// `x ← x + T*(base − T x)`; returns false on non-finite values.
    fn landweber(&mut self, x: &mut [f64]) -> bool {
        self.op.apply_into(x, &mut self.tx);
        for (t, b) in self.tx.iter_mut().zip(&self.base) {
            *t = b - *t;
        }
        self.op.apply_adjoint_into(&self.tx, &mut self.grad);
        let mut finite = true;
        for (xi, g) in x.iter_mut().zip(&self.grad) {
            *xi += g;
            finite &= xi.is_finite();
        }
        finite
    }

    fn step_u(&mut self, u: &mut [f64]) -> bool {
        if !self.landweber(u) {
            return false;
        }
        u.iter_mut().for_each(|x| *x = self.lp.threshold(*x));
        true
    }

    fn step_v(&mut self, v: &mut [f64]) -> bool {
        if !self.landweber(v) {
            return false;
        }
        match &self.lq {
            Some(lq) => v.iter_mut().for_each(|x| *x = lq.shrink(*x)),
            None => threshold_linf_in_place(v, self.beta),
        }
        true
    }
}

/// One thresholding step on `u` with `v` held fixed:
/// `H_α^p(u + T*(y − Tv − Tu))` componentwise.
pub fn inner_u_step(u: &[f64], v: &[f64], problem: &MeasurementProblem, params: &RegParams) -> Result<Vec<f64>> {
    check_dims(problem, u, v)?;
    let mut s = Stepper::new(problem, params)?;
    s.freeze(v);
    let mut out = u.to_vec();
    if !s.step_u(&mut out) {
        return Err(Error::NumericalFailure { iteration: 0 });
    }
    Ok(out)
}

/// One step on `v` with `u` held fixed: componentwise `ℓ_q` shrinkage of
/// `v + T*(y − Tu − Tv)`, or the vector `ℓ_∞` map when `q = ∞`.
pub fn inner_v_step(u: &[f64], v: &[f64], problem: &MeasurementProblem, params: &RegParams) -> Result<Vec<f64>> {
    check_dims(problem, u, v)?;
    let mut s = Stepper::new(problem, params)?;
    s.freeze(u);
    let mut out = v.to_vec();
    if !s.step_v(&mut out) {
        return Err(Error::NumericalFailure { iteration: 0 });
    }
    Ok(out)
}

/// Which block an observed iterate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    U,
    V,
}

/// Snapshot handed to an observer after every inner step.
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a> {
    /// Outer iteration, 1-based.
    pub outer: usize,
    /// Inner step within the block, 1-based.
    pub inner: usize,
    pub block: Block,
    pub u: &'a [f64],
    pub v: &'a [f64],
}

fn ensure_normalized(problem: &MeasurementProblem) -> Result<()> {
    let norm = problem.op.norm_estimate();
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

fn support_changed(prev: &[bool], u: &[f64]) -> bool {
    prev.iter().zip(u).any(|(&s, &x)| s != (x != 0.0))
}

/// Runs the alternating scheme from `u = v = 0` (or the configured start).
pub fn solve(
    problem: &MeasurementProblem,
    params: &RegParams,
    config: &SolveConfig,
) -> Result<(SolutionPair, SolveTrace)> {
    solve_observed(problem, params, config, |_| {})
}

/// [`solve`] with a callback invoked after every inner step.
pub fn solve_observed(
    problem: &MeasurementProblem,
    params: &RegParams,
    config: &SolveConfig,
    mut observe: impl FnMut(Iterate<'_>),
) -> Result<(SolutionPair, SolveTrace)> {
    config.validate()?;
    ensure_normalized(problem)?;
    let n = problem.cols();
    let mut u = config.initial_u.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut v = config.initial_v.clone().unwrap_or_else(|| vec![0.0; n]);
    check_dims(problem, &u, &v)?;
    let mut s = Stepper::new(problem, params)?;
    let gap = if params.p < 1.0 { s.lp.gamma_alpha } else { 0.0 };

    let mut trace = SolveTrace {
        j_values: Vec::new(),
        u_diffs: Vec::new(),
        v_diffs: Vec::new(),
        support_sizes: Vec::new(),
        support_history: Vec::new(),
        support_fixed_at: None,
        gap_violations: 0,
        iterations: 0,
        status: SolveStatus::MaxOuterReached,
        fixed_point_residuals: None,
    };
    let mut support: Vec<bool> = u.iter().map(|&x| x != 0.0).collect();
    let mut last_change = 0;
    let mut u_prev = u.clone();
    let mut v_prev = v.clone();

    for outer in 1..=config.max_outer {
        u_prev.copy_from_slice(&u);
        v_prev.copy_from_slice(&v);

        s.freeze(&v);
        for inner in 1..=config.inner_u_iters {
            if !s.step_u(&mut u) {
                return Err(Error::NumericalFailure { iteration: outer });
            }
            if support_changed(&support, &u) {
                last_change = outer;
                support.iter_mut().zip(&u).for_each(|(s, &x)| *s = x != 0.0);
            }
            if u.iter().any(|&x| x != 0.0 && x.abs() < gap) {
                trace.gap_violations += 1;
            }
            observe(Iterate { outer, inner, block: Block::U, u: &u, v: &v });
        }

        s.freeze(&u);
        for inner in 1..=config.inner_v_iters {
            if !s.step_v(&mut v) {
                return Err(Error::NumericalFailure { iteration: outer });
            }
            observe(Iterate { outer, inner, block: Block::V, u: &u, v: &v });
        }

        let j = misfit(s.op, s.y, &u, &v) + penalties(&u, &v, params);
        if !j.is_finite() {
            return Err(Error::NumericalFailure { iteration: outer });
        }
        let du = dist2(&u, &u_prev);
        let dv = dist2(&v, &v_prev);
        trace.j_values.push(j);
        trace.u_diffs.push(du);
        trace.v_diffs.push(dv);
        let size = support.iter().filter(|&&b| b).count();
        trace.support_sizes.push(size);
        if config.record_trace {
            trace
                .support_history
                .push((0..n).filter(|&i| support[i]).collect());
        }
        trace.iterations = outer;
        if du + dv < config.stop_tol {
            trace.status = SolveStatus::Converged;
            break;
        }
    }

    if last_change < trace.iterations {
        trace.support_fixed_at = Some(last_change + 1);
    }
    let pair = SolutionPair::new(u, v);
    trace.fixed_point_residuals = Some(check_fixed_point(&pair, problem, params, 1e-6)?);
    Ok((pair, trace))
}

/// Evaluates the fixed-point (stationarity) conditions at `pair`.
///
/// With `r = T*(y − T(u + v))`:
///
/// * `0 < p < 1`: `r_λ = (αp/2) sgn(u_λ)|u_λ|^{p−1}` and `|u_λ| ≥ γ_α` on
///   `Γ₁`, `|r_λ| ≤ τ_α` on `Γ₀`;
/// * `p = 1`: `r_λ = (α/2) sgn(u_λ)` on `Γ₁`, `|r_λ| ≤ α/2` on `Γ₀`;
/// * `p = 0`: `r_λ = 0` and `|u_λ| ≥ √α` on `Γ₁`, `|r_λ| ≤ √α` on `Γ₀`.
///
/// For finite `q` the `v` residual is the gradient
/// `−2r + βq sgn(v)|v|^{q−1} + 2εv`; for `q = ∞` it is the sup-distance of
/// `v` from its own `ℓ_∞` thresholding step.
pub fn check_fixed_point(
    pair: &SolutionPair,
    problem: &MeasurementProblem,
    params: &RegParams,
    tol: f64,
) -> Result<FixedPointReport> {
    params.validate()?;
    let (u, v) = (&pair.u, &pair.v);
    check_dims(problem, u, v)?;
    let lp = params.lp()?;
    let x: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let tx = problem.op.apply(&x)?;
    let res: Vec<f64> = problem.y.iter().zip(&tx).map(|(a, b)| a - b).collect();
    let r = problem.op.apply_adjoint(&res)?;

    let p = params.p;
    let mut g1: f64 = 0.0;
    let mut g0: f64 = 0.0;
    for (&ui, &ri) in u.iter().zip(&r) {
        if ui == 0.0 {
            g0 = g0.max(ri.abs() - lp.tau_alpha);
            continue;
        }
        let target = if p == 0.0 {
            0.0
        } else if p == 1.0 {
            0.5 * params.alpha * ui.signum()
        } else {
            0.5 * params.alpha * p * ui.signum() * ui.abs().powf(p - 1.0)
        };
        g1 = g1.max((ri - target).abs());
        if p < 1.0 {
            g1 = g1.max(lp.gamma_alpha * (1.0 - 1e-12) - ui.abs());
        }
    }

    let vres = match params.q {
        QNorm::Finite(q) => v
            .iter()
            .zip(&r)
            .map(|(&vi, &ri)| {
                (-2.0 * ri + params.beta * q * vi.signum() * vi.abs().powf(q - 1.0)
                    + 2.0 * params.epsilon * vi)
                    .abs()
            })
            .fold(0.0, f64::max),
        QNorm::Inf => {
            let mut z: Vec<f64> = v.iter().zip(&r).map(|(a, b)| a + b).collect();
            threshold_linf_in_place(&mut z, params.beta);
            z.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        }
    };

    let mut report = FixedPointReport {
        gamma1_residual: g1.max(0.0),
        gamma0_violation: g0.max(0.0),
        v_residual: vres,
        tol,
        passed: false,
    };
    report.passed = report.max_residual() <= tol;
    Ok(report)
}

/// Result of the single-penalty iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonoResult {
    pub u: Vec<f64>,
    /// `J_p(u) = ‖Tu − y‖² + α‖u‖_p^p` after each iteration.
    pub j_values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Iterative thresholding `u ← H_α^p(u + T*(y − Tu))` from `u = 0`.
pub fn mono_solve(
    problem: &MeasurementProblem,
    alpha: f64,
    p: f64,
    max_iters: usize,
    stop_tol: f64,
) -> Result<MonoResult> {
    ensure_normalized(problem)?;
    if max_iters == 0 || !(stop_tol > 0.0) {
        return Err(Error::InvalidParameter("max_iters >= 1 and stop_tol > 0 required".into()));
    }
    let lp = LpThresholdParams::new(p, alpha)?;
    let n = problem.cols();
    let op = &problem.op;
    let mut u = vec![0.0; n];
    let mut prev = vec![0.0; n];
    let mut tx = vec![0.0; problem.rows()];
    let mut grad = vec![0.0; n];
    let mut out = MonoResult { u: Vec::new(), j_values: Vec::new(), iterations: 0, converged: false };

    for it in 1..=max_iters {
        prev.copy_from_slice(&u);
        op.apply_into(&u, &mut tx);
        for (t, y) in tx.iter_mut().zip(&problem.y) {
            *t = y - *t;
        }
        op.apply_adjoint_into(&tx, &mut grad);
        for (ui, g) in u.iter_mut().zip(&grad) {
            let z = *ui + g;
            if !z.is_finite() {
                return Err(Error::NumericalFailure { iteration: it });
            }
            *ui = lp.threshold(z);
        }
        op.apply_into(&u, &mut tx);
        let fit: f64 = tx.iter().zip(&problem.y).map(|(a, b)| (a - b) * (a - b)).sum();
        out.j_values.push(fit + alpha * lp_penalty(&u, p));
        out.iterations = it;
        if dist2(&u, &prev) < stop_tol {
            out.converged = true;
            break;
        }
    }
    out.u = u;
    Ok(out)
}

/// The planar example: `T = I`, `y = (0.3, 1.35)`.
pub fn demo_problem_2d() -> MeasurementProblem {
    MeasurementProblem::new(DenseOperator::identity(2), vec![0.3, 1.35], None, None)
        .expect("valid demo problem")
}

/// `p = 1`, `q = ∞`, `α = 0.4`, `β = 0.5`.
pub fn demo_params_2d() -> RegParams {
    RegParams { p: 1.0, q: QNorm::Inf, alpha: 0.4, beta: 0.5, epsilon: 0.0 }
}

/// Loop settings for the planar example. The iteration contracts by a factor
/// two per outer step, so the stopping tolerance is loose enough to stop after
/// a dozen or so iterations.
pub fn demo_config_2d() -> SolveConfig {
    SolveConfig { stop_tol: 1e-4, max_outer: 1000, ..SolveConfig::default() }
}
