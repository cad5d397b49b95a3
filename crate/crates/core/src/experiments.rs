//! Compressed-sensing experiment harness: seeded problem generation,
//! `(α, β)` grid sweeps, feasibility filtering, the AE/SD quality metrics,
//! and the comparison against single-penalty thresholding.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist2, normalize_problem, DenseOperator, MeasurementProblem, DEFAULT_TARGET_NORM};
use crate::solver::{mono_solve, solve, QNorm, RegParams, SolutionPair, SolveConfig, SolveStatus};

/// Residual bound of the feasibility rule, in normalized-problem units.
pub const FEASIBILITY_RESIDUAL: f64 = 0.1;

/// Recipe for one random measurement problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub sparsity: usize,
    /// Nonzeros of `u†` are drawn with magnitude in `[min_magnitude, amplitude]`.
    pub amplitude: f64,
    #[serde(default)]
    pub min_magnitude: f64,
    /// `‖v†‖₂`.
    pub noise_norm: f64,
    pub seed: u64,
    pub target_norm: f64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            m: 100,
            n: 256,
            sparsity: 7,
            amplitude: 3.0,
            min_magnitude: 0.0,
            noise_norm: 0.7,
            seed: 0,
            target_norm: DEFAULT_TARGET_NORM,
        }
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("m and N must be positive".into()));
        }
        if self.sparsity == 0 || self.sparsity > self.n {
            return Err(Error::InvalidParameter(format!(
                "sparsity must lie in [1, N = {}], got {}",
                self.n, self.sparsity
            )));
        }
        if !(self.amplitude > 0.0) || !(0.0..=self.amplitude).contains(&self.min_magnitude) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= min_magnitude <= amplitude, amplitude > 0; got {} and {}",
                self.min_magnitude, self.amplitude
            )));
        }
        if !(self.noise_norm > 0.0 && self.noise_norm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise_norm must be > 0, got {}",
                self.noise_norm
            )));
        }
        Ok(())
    }
}

/// Gaussian `T`, sparse `u†`, uniform noise `v†` with `‖v†‖₂ = η`; the data
/// `y = T(u† + v†)` is formed first and then rescaled jointly with `T`.
pub fn generate_problem(spec: &ProblemSpec) -> Result<MeasurementProblem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (m, n) = (spec.m, spec.n);

    let entries: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let op = DenseOperator::new(m, n, entries)?;

    let mut support = index::sample(&mut rng, n, spec.sparsity).into_vec();
    support.sort_unstable();
    let mut u = vec![0.0; n];
    for &i in &support {
        u[i] = if spec.min_magnitude > 0.0 {
            let mag = rng.gen_range(spec.min_magnitude..=spec.amplitude);
            if rng.gen_bool(0.5) { mag } else { -mag }
        } else {
            rng.gen_range(-spec.amplitude..=spec.amplitude)
        };
    }

    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x *= spec.noise_norm / nv);

    let x: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
    let y = op.apply(&x)?;
    let raw = MeasurementProblem::new(op, y, Some(u), Some(v))?;
    normalize_problem(&raw, spec.target_norm)
}

fn support_threshold(u: &[f64]) -> f64 {
    1e-8 * u.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

/// Entries with `|u_λ| > 1e−8 · max(1, ‖u‖_∞)`.
pub fn support_of(u: &[f64]) -> Vec<usize> {
    let eps = support_threshold(u);
    (0..u.len()).filter(|&i| u[i].abs() > eps).collect()
}

fn check_same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: a.len() });
    }
    Ok(())
}

/// Approximation error `‖u − u†‖₂`.
pub fn metric_ae(u: &[f64], u_true: &[f64]) -> Result<f64> {
    check_same_len(u, u_true)?;
    Ok(dist2(u, u_true))
}

/// Size of the symmetric difference of the supports.
pub fn metric_sd(u: &[f64], u_true: &[f64]) -> Result<usize> {
    check_same_len(u, u_true)?;
    let (eu, et) = (support_threshold(u), support_threshold(u_true));
    Ok(u.iter()
        .zip(u_true)
        .filter(|(a, b)| (a.abs() > eu) != (b.abs() > et))
        .count())
}

/// Geometric grids `α_i = α₀ k^i`, `β_j = β₀ k^j`, `i, j = 0..=count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alpha0: f64,
    pub beta0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { alpha0: 0.0009, beta0: 0.0005, ratio: 1.25, count: 30 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.beta0 > 0.0 && self.ratio > 1.0) {
            return Err(Error::InvalidParameter(
                "grid needs alpha0 > 0, beta0 > 0, ratio > 1".into(),
            ));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        (0..=self.count).map(|i| self.alpha0 * self.ratio.powi(i as i32)).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..=self.count).map(|j| self.beta0 * self.ratio.powi(j as i32)).collect()
    }
}

/// Loop settings used by the sweeps: `L = M = 20`, cold starts, and a fixed
/// budget of 40 outer iterations per cell.
pub fn experiment_solve_config() -> SolveConfig {
    SolveConfig {
        inner_u_iters: 20,
        inner_v_iters: 20,
        max_outer: 40,
        stop_tol: 1e-8,
        record_trace: false,
        initial_u: None,
        initial_v: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "message")]
pub enum CellStatus {
    Converged,
    MaxOuterReached,
    Failed(String),
}

/// One `(α, β)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub p: f64,
    pub q: QNorm,
    pub alpha: f64,
    pub beta: f64,
    pub solution: SolutionPair,
    pub ae: f64,
    pub sd: usize,
    pub feasible: bool,
    /// `‖T(u + v) − y‖₂`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub j_final: f64,
    pub status: CellStatus,
}

impl GridResult {
    pub fn failed(&self) -> bool {
        matches!(self.status, CellStatus::Failed(_))
    }

    /// Re-evaluates feasibility under a different residual bound.
    pub fn feasible_under(&self, truth_support: usize, residual_threshold: f64) -> bool {
        !self.failed()
            && support_of(&self.solution.u).len() <= truth_support
            && self.residual_norm < residual_threshold
    }
}

fn residual_norm(problem: &MeasurementProblem, u: &[f64], v: &[f64]) -> Result<f64> {
    let x: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let tx = problem.op.apply(&x)?;
    Ok(dist2(&tx, &problem.y))
}

fn truth_u(problem: &MeasurementProblem) -> Result<&[f64]> {
    problem
        .truth_u
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("problem has no ground truth".into()))
}

fn run_cell(
    problem: &MeasurementProblem,
    truth: &[f64],
    truth_support: usize,
    params: RegParams,
    config: &SolveConfig,
    threshold: f64,
) -> GridResult {
    let n = problem.cols();
    let outcome = solve(problem, &params, config).and_then(|(pair, trace)| {
        let residual = residual_norm(problem, &pair.u, &pair.v)?;
        Ok((pair, trace, residual))
    });
    match outcome {
        Ok((pair, trace, residual)) => {
            let ae = dist2(&pair.u, truth);
            let sd = metric_sd(&pair.u, truth).unwrap_or(usize::MAX);
            let feasible = support_of(&pair.u).len() <= truth_support && residual < threshold;
            GridResult {
                p: params.p,
                q: params.q,
                alpha: params.alpha,
                beta: params.beta,
                ae,
                sd,
                feasible,
                residual_norm: residual,
                iterations: trace.iterations,
                j_final: trace.j_values.last().copied().unwrap_or(f64::NAN),
                status: match trace.status {
                    SolveStatus::Converged => CellStatus::Converged,
                    SolveStatus::MaxOuterReached => CellStatus::MaxOuterReached,
                },
                solution: pair,
            }
        }
        Err(e) => GridResult {
            p: params.p,
            q: params.q,
            alpha: params.alpha,
            beta: params.beta,
            solution: SolutionPair::new(vec![0.0; n], vec![0.0; n]),
            ae: f64::INFINITY,
            sd: usize::MAX,
            feasible: false,
            residual_norm: f64::INFINITY,
            iterations: 0,
            j_final: f64::NAN,
            status: CellStatus::Failed(e.to_string()),
        },
    }
}

/// Solves every `(α_i, β_j)` cell from a cold start, `i`-major order.
pub fn grid_search(
    problem: &MeasurementProblem,
    p: f64,
    q: QNorm,
    grid: &GridSpec,
    config: &SolveConfig,
) -> Result<Vec<GridResult>> {
    grid_search_with_threshold(problem, p, q, grid, config, FEASIBILITY_RESIDUAL)
}

/// [`grid_search`] with an explicit feasibility residual bound.
///
/// Cells run in parallel on the current rayon pool; each cell is sequential,
/// so results do not depend on the thread count.
pub fn grid_search_with_threshold(
    problem: &MeasurementProblem,
    p: f64,
    q: QNorm,
    grid: &GridSpec,
    config: &SolveConfig,
    residual_threshold: f64,
) -> Result<Vec<GridResult>> {
    grid.validate()?;
    config.validate()?;
    let truth = truth_u(problem)?;
    let truth_support = support_of(truth).len();
    let mut cfg = config.clone();
    cfg.record_trace = false;
    let cells: Vec<RegParams> = grid
        .alphas()
        .into_iter()
        .flat_map(|alpha| {
            grid.betas().into_iter().map(move |beta| RegParams { p, q, alpha, beta, epsilon: 0.0 })
        })
        .collect();
    cells[0].validate()?;
    Ok(cells
        .into_par_iter()
        .map(|params| run_cell(problem, truth, truth_support, params, &cfg, residual_threshold))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Ae,
    Sd,
}

fn rank(criterion: Criterion, a: (f64, usize, f64, f64), b: (f64, usize, f64, f64)) -> Ordering {
    let primary = match criterion {
        Criterion::Ae => a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)),
        Criterion::Sd => a.1.cmp(&b.1).then(a.0.total_cmp(&b.0)),
    };
    primary.then(a.2.total_cmp(&b.2)).then(a.3.total_cmp(&b.3))
}

fn key(r: &GridResult) -> (f64, usize, f64, f64) {
    (r.ae, r.sd, r.alpha, r.beta)
}

/// Cell minimizing the criterion; ties go to smaller SD, then smaller AE,
/// then lexicographically smaller `(α, β)`. Failed cells are skipped.
pub fn best_result(results: &[GridResult], criterion: Criterion) -> Result<&GridResult> {
    results
        .iter()
        .filter(|r| !r.failed())
        .min_by(|a, b| rank(criterion, key(a), key(b)))
        .ok_or(Error::Empty("grid results"))
}

/// The `top_k` best `(α, β)` pairs, best first.
pub fn best_parameter_regions(
    results: &[GridResult],
    criterion: Criterion,
    top_k: usize,
) -> Result<Vec<(f64, f64)>> {
    if top_k > results.len() {
        return Err(Error::InvalidParameter(format!(
            "top_k = {top_k} exceeds {} results",
            results.len()
        )));
    }
    let mut sorted: Vec<&GridResult> = results.iter().filter(|r| !r.failed()).collect();
    sorted.sort_by(|a, b| rank(criterion, key(a), key(b)));
    Ok(sorted.into_iter().take(top_k).map(|r| (r.alpha, r.beta)).collect())
}

/// Single-penalty baseline settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonoConfig {
    pub max_iters: usize,
    pub stop_tol: f64,
}

impl Default for MonoConfig {
    fn default() -> Self {
        MonoConfig { max_iters: 4000, stop_tol: 1e-8 }
    }
}

/// Best AE and best SD of one method on one problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestPair {
    pub ae: f64,
    pub sd: usize,
    pub ae_params: (f64, f64),
    pub sd_params: (f64, f64),
}

/// Multi-penalty statistics for one `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStats {
    pub p: f64,
    pub q: QNorm,
    pub mean_ae: f64,
    pub mean_sd: f64,
    /// Fraction of problems where the multi-penalty best AE is `≤` the mono one.
    pub prob_ae_better_or_equal: f64,
    pub prob_sd_better_or_equal: f64,
    pub per_problem: Vec<BestPair>,
    pub feasible_cells: Vec<usize>,
}

/// Mono-penalty statistics for one `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonoStats {
    pub p: f64,
    pub mean_ae: f64,
    pub mean_sd: f64,
    pub per_problem: Vec<BestPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub problems: usize,
    pub multi: Vec<MultiStats>,
    pub mono: Vec<MonoStats>,
}

fn best_pair(results: &[GridResult]) -> Result<BestPair> {
    let a = best_result(results, Criterion::Ae)?;
    let s = best_result(results, Criterion::Sd)?;
    Ok(BestPair { ae: a.ae, sd: s.sd, ae_params: (a.alpha, a.beta), sd_params: (s.alpha, s.beta) })
}

/// Best AE/SD over the `α` grid for single-penalty thresholding.
///
/// The `β` slot of the reported parameter pairs is NaN.
pub fn mono_sweep(
    problem: &MeasurementProblem,
    p: f64,
    alphas: &[f64],
    config: &MonoConfig,
) -> Result<BestPair> {
    let truth = truth_u(problem)?;
    let rows: Vec<(f64, usize, f64)> = alphas
        .par_iter()
        .filter_map(|&alpha| {
            let res = mono_solve(problem, alpha, p, config.max_iters, config.stop_tol).ok()?;
            Some((dist2(&res.u, truth), metric_sd(&res.u, truth).ok()?, alpha))
        })
        .collect();
    let pick = |c: Criterion| {
        rows.iter()
            .min_by(|a, b| rank(c, (a.0, a.1, a.2, 0.0), (b.0, b.1, b.2, 0.0)))
            .copied()
            .ok_or(Error::Empty("mono sweep"))
    };
    let a = pick(Criterion::Ae)?;
    let s = pick(Criterion::Sd)?;
    Ok(BestPair { ae: a.0, sd: s.1, ae_params: (a.2, f64::NAN), sd_params: (s.2, f64::NAN) })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 { f64::NAN } else { s / n as f64 }
}

/// Per `(p, q)` best multi-penalty AE/SD against the per-`p` best
/// single-penalty AE/SD on the same problems.
///
/// An empty `q_values` yields a mono-only report.
pub fn compare_multi_mono(
    problems: &[MeasurementProblem],
    p_values: &[f64],
    q_values: &[QNorm],
    grid: &GridSpec,
    mono_alphas: &[f64],
    config: &SolveConfig,
    mono_config: &MonoConfig,
) -> Result<ComparisonStats> {
    if problems.is_empty() {
        return Err(Error::Empty("problem list"));
    }
    let mut mono = Vec::with_capacity(p_values.len());
    let mut multi = Vec::new();
    for &p in p_values {
        let mono_best = problems
            .iter()
            .map(|prob| mono_sweep(prob, p, mono_alphas, mono_config))
            .collect::<Result<Vec<_>>>()?;
        for &q in q_values {
            let mut per_problem = Vec::with_capacity(problems.len());
            let mut feasible_cells = Vec::with_capacity(problems.len());
            for prob in problems {
                let results = grid_search(prob, p, q, grid, config)?;
                feasible_cells.push(results.iter().filter(|r| r.feasible).count());
                per_problem.push(best_pair(&results)?);
            }
            let k = problems.len() as f64;
            let ae_wins = per_problem.iter().zip(&mono_best).filter(|(a, b)| a.ae <= b.ae).count();
            let sd_wins = per_problem.iter().zip(&mono_best).filter(|(a, b)| a.sd <= b.sd).count();
            multi.push(MultiStats {
                p,
                q,
                mean_ae: mean(per_problem.iter().map(|b| b.ae)),
                mean_sd: mean(per_problem.iter().map(|b| b.sd as f64)),
                prob_ae_better_or_equal: ae_wins as f64 / k,
                prob_sd_better_or_equal: sd_wins as f64 / k,
                per_problem,
                feasible_cells,
            });
        }
        mono.push(MonoStats {
            p,
            mean_ae: mean(mono_best.iter().map(|b| b.ae)),
            mean_sd: mean(mono_best.iter().map(|b| b.sd as f64)),
            per_problem: mono_best,
        });
    }
    Ok(ComparisonStats { problems: problems.len(), multi, mono })
}

#[derive(Serialize)]
struct CsvRow {
    problem_id: usize,
    p: f64,
    q: String,
    alpha: f64,
    beta: f64,
    ae: f64,
    sd: i64,
    feasible: bool,
    residual: f64,
    iters: usize,
    #[serde(rename = "J_final")]
    j_final: f64,
}

/// Writes a CSV header and one row per cell. Failed cells carry `sd = -1`.
pub fn write_results_csv(w: impl Write, rows: &[(usize, &GridResult)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for &(problem_id, r) in rows {
        out.serialize(CsvRow {
            problem_id,
            p: r.p,
            q: r.q.to_string(),
            alpha: r.alpha,
            beta: r.beta,
            ae: r.ae,
            sd: if r.sd == usize::MAX { -1 } else { r.sd as i64 },
            feasible: r.feasible,
            residual: r.residual_norm,
            iters: r.iterations,
            j_final: r.j_final,
        })?;
    }
    if rows.is_empty() {
        out.write_record([
            "problem_id", "p", "q", "alpha", "beta", "ae", "sd", "feasible", "residual", "iters",
            "J_final",
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One JSON-encoded [`GridResult`] per line, solution vectors included.
pub fn write_results_jsonl(mut w: impl Write, results: &[GridResult]) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_results_jsonl(r: impl BufRead) -> Result<Vec<GridResult>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Provenance record written next to sweep outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub spec: Option<ProblemSpec>,
    pub grid: GridSpec,
    pub config: SolveConfig,
    pub code_version: String,
    pub seeds: Vec<u64>,
    pub feasibility_residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolutionPair;

    fn cell(alpha: f64, beta: f64, ae: f64, sd: usize) -> GridResult {
        GridResult {
            p: 0.5,
            q: QNorm::Finite(2.0),
            alpha,
            beta,
            solution: SolutionPair::new(vec![0.0], vec![0.0]),
            ae,
            sd,
            feasible: true,
            residual_norm: 0.0,
            iterations: 1,
            j_final: 0.0,
            status: CellStatus::Converged,
        }
    }

    #[test]
    fn metrics_basic_cases() {
        let truth = [0.0, 1.0, -2.0, 0.0];
        assert_eq!(metric_ae(&truth, &truth).unwrap(), 0.0);
        assert_eq!(metric_sd(&truth, &truth).unwrap(), 0);
        assert_eq!(metric_sd(&[0.0, 1.0, -2.0, 1.0], &truth).unwrap(), 1);
        assert_eq!(metric_sd(&[0.0; 4], &truth).unwrap(), 2);
        assert!(metric_ae(&[0.0; 3], &truth).is_err());
        assert!(metric_sd(&[0.0; 3], &truth).is_err());
    }

    #[test]
    fn best_result_tie_breaks() {
        let single = vec![cell(1.0, 1.0, 0.3, 2)];
        assert_eq!(best_result(&single, Criterion::Ae).unwrap(), &single[0]);
        let two = vec![cell(1.0, 1.0, 0.5, 0), cell(2.0, 1.0, 0.4, 3)];
        assert_eq!(best_result(&two, Criterion::Ae).unwrap().ae, 0.4);
        assert_eq!(best_result(&two, Criterion::Sd).unwrap().sd, 0);
        let tie = vec![cell(1.0, 1.0, 0.5, 2), cell(2.0, 1.0, 0.5, 1)];
        assert_eq!(best_result(&tie, Criterion::Ae).unwrap().sd, 1);
        let full_tie = vec![cell(2.0, 1.0, 0.5, 1), cell(1.0, 3.0, 0.5, 1), cell(1.0, 2.0, 0.5, 1)];
        let b = best_result(&full_tie, Criterion::Sd).unwrap();
        assert_eq!((b.alpha, b.beta), (1.0, 2.0));
        assert!(best_result(&[], Criterion::Ae).is_err());
    }

    #[test]
    fn top_k_regions() {
        let rs = vec![cell(1.0, 1.0, 0.3, 2), cell(2.0, 1.0, 0.1, 2), cell(3.0, 1.0, 0.2, 2)];
        let best = best_result(&rs, Criterion::Ae).unwrap();
        assert_eq!(best_parameter_regions(&rs, Criterion::Ae, 1).unwrap(), vec![(best.alpha, best.beta)]);
        assert_eq!(
            best_parameter_regions(&rs, Criterion::Ae, 3).unwrap(),
            vec![(2.0, 1.0), (3.0, 1.0), (1.0, 1.0)]
        );
        assert!(best_parameter_regions(&rs, Criterion::Ae, 4).is_err());
    }

    #[test]
    fn grid_values() {
        let g = GridSpec::default();
        let a = g.alphas();
        assert_eq!(a.len(), 31);
        assert_eq!(a[0], 0.0009);
        assert!((a[30] - 0.0009 * 1.25f64.powi(30)).abs() < 1e-15);
        assert_eq!(GridSpec { count: 0, ..g }.betas(), vec![0.0005]);
    }

    #[test]
    fn problem_spec_validation() {
        assert!(ProblemSpec { sparsity: 0, ..ProblemSpec::default() }.validate().is_err());
        assert!(ProblemSpec { sparsity: 300, ..ProblemSpec::default() }.validate().is_err());
        assert!(ProblemSpec { noise_norm: 0.0, ..ProblemSpec::default() }.validate().is_err());
        assert!(ProblemSpec::default().validate().is_ok());
    }

    #[test]
    fn csv_header_matches_contract() {
        let r = cell(1.0, 2.0, 0.5, 1);
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &[(3, &r)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "problem_id,p,q,alpha,beta,ae,sd,feasible,residual,iters,J_final"
        );
        assert!(lines.next().unwrap().starts_with("3,0.5,2,1.0,2.0,0.5,1,true"));
    }

    #[test]
    fn jsonl_round_trip() {
        let rs = vec![cell(1.0, 2.0, 0.5, 1), GridResult { q: QNorm::Inf, ..cell(3.0, 4.0, 0.1, 0) }];
        let mut buf = Vec::new();
        write_results_jsonl(&mut buf, &rs).unwrap();
        assert_eq!(read_results_jsonl(buf.as_slice()).unwrap(), rs);
    }
}
