//! Dense linear operators and measurement problems.
//!
//! The solver assumes `‖T‖ ≤ 1`; [`normalize_problem`] rescales `T` and `y`
//! jointly so that the power-iteration estimate of `σ_max(T)` hits a target
//! strictly below one.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power-iteration tolerance used when an operator is constructed.
pub const NORM_TOL: f64 = 1e-10;
/// Power-iteration budget used when an operator is constructed.
pub const NORM_MAX_ITERS: usize = 10_000;
/// Default target for [`normalize_problem`].
pub const DEFAULT_TARGET_NORM: f64 = 0.99;

/// Row-major dense real matrix together with a cached spectral-norm estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    norm_estimate: f64,
}

impl DenseOperator {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "operator shape must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!(
                "operator entry ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        let mut op = DenseOperator {
            rows,
            cols,
            data,
            norm_estimate: 0.0,
        };
        op.norm_estimate = estimate_operator_norm(&op, NORM_TOL, NORM_MAX_ITERS)?;
        Ok(op)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(m, n, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::new(n, n, data).expect("identity is a valid operator")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Cached estimate of `σ_max` computed at construction.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Returns a copy with every entry multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.data.iter().map(|a| a * s).collect(),
        )
    }

    /// `T x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `T* r`, the transpose action.
    pub fn apply_adjoint(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        self.apply_adjoint_into(r, &mut out);
        Ok(out)
    }

    /// Unchecked `out = T x`. Zero entries of `x` are skipped, which leaves
    /// the result bit-identical to the dense sum.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        let nnz = x.iter().filter(|&&v| v != 0.0).count();
        if nnz * 4 < self.cols {
            let idx: Vec<usize> = (0..self.cols).filter(|&j| x[j] != 0.0).collect();
            for (i, o) in out.iter_mut().enumerate() {
                let row = self.row(i);
                *o = idx.iter().fold(0.0, |acc, &j| acc + row[j] * x[j]);
            }
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = dot(self.row(i), x);
            }
        }
    }

    /// Unchecked `out = T* r`.
    pub(crate) fn apply_adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(r.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * ri;
            }
        }
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// Power iteration on `T*T` from the normalized all-ones vector.
///
/// Returns 0 for the zero operator. Stops once successive estimates of
/// `σ_max` agree to relative tolerance `tol`.
pub fn estimate_operator_norm(op: &DenseOperator, tol: f64, max_iters: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    if op.data.iter().all(|&a| a == 0.0) {
        return Ok(0.0);
    }
    let n = op.cols;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut tx = vec![0.0; op.rows];
    op.apply_into(&x, &mut tx);
    if norm2(&tx) == 0.0 {
        // all-ones start lies in the kernel; fall back to the heaviest column
        let best = (0..n)
            .max_by(|&a, &b| {
                let ca: f64 = (0..op.rows).map(|i| op.get(i, a).powi(2)).sum();
                let cb: f64 = (0..op.rows).map(|i| op.get(i, b).powi(2)).sum();
                ca.total_cmp(&cb).then(b.cmp(&a))
            })
            .unwrap_or(0);
        x.iter_mut().for_each(|v| *v = 0.0);
        x[best] = 1.0;
        op.apply_into(&x, &mut tx);
    }
    let mut sigma = norm2(&tx);
    for _ in 0..max_iters {
        op.apply_adjoint_into(&tx, &mut x);
        let nz = norm2(&x);
        if nz == 0.0 || !nz.is_finite() {
            return Ok(sigma);
        }
        x.iter_mut().for_each(|v| *v /= nz);
        op.apply_into(&x, &mut tx);
        let next = norm2(&tx);
        if (next - sigma).abs() <= tol * next {
            return Ok(next);
        }
        sigma = next;
    }
    Err(Error::NormNotConverged {
        iterations: max_iters,
    })
}

/// Linear measurement `y = T(u† + v†)` with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProblem {
    pub op: DenseOperator,
    pub y: Vec<f64>,
    pub truth_u: Option<Vec<f64>>,
    pub truth_v: Option<Vec<f64>>,
    /// Factor already applied to `T` and `y`; 1 when never rescaled.
    pub scale_factor: f64,
}

impl MeasurementProblem {
    pub fn new(
        op: DenseOperator,
        y: Vec<f64>,
        truth_u: Option<Vec<f64>>,
        truth_v: Option<Vec<f64>>,
    ) -> Result<Self> {
        let p = MeasurementProblem {
            op,
            y,
            truth_u,
            truth_v,
            scale_factor: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        check_len(self.op.rows(), self.y.len())?;
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("measurement vector".into()));
        }
        for t in [&self.truth_u, &self.truth_v].into_iter().flatten() {
            check_len(self.op.cols(), t.len())?;
        }
        if !(self.scale_factor > 0.0 && self.scale_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale_factor must be positive, got {}",
                self.scale_factor
            )));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.op.rows()
    }

    pub fn cols(&self) -> usize {
        self.op.cols()
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(w, &ProblemFile::from(self))?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let r = BufReader::new(File::open(path)?);
        let file: ProblemFile = serde_json::from_reader(r)?;
        file.try_into()
    }
}

/// Rescales `T` and `y` by `target_norm / σ_max(T)`.
///
/// Operators already at or below the target are returned unchanged.
pub fn normalize_problem(problem: &MeasurementProblem, target_norm: f64) -> Result<MeasurementProblem> {
    if !(target_norm > 0.0 && target_norm < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target_norm must lie in (0, 1), got {target_norm}"
        )));
    }
    let sigma = problem.op.norm_estimate();
    if sigma == 0.0 {
        return Err(Error::ZeroOperator);
    }
    // slack keeps a second pass from rescaling by round-off
    if sigma <= target_norm * (1.0 + 1e-9) {
        return Ok(problem.clone());
    }
    let s = target_norm / sigma;
    Ok(MeasurementProblem {
        op: problem.op.scaled(s)?,
        y: problem.y.iter().map(|v| v * s).collect(),
        truth_u: problem.truth_u.clone(),
        truth_v: problem.truth_v.clone(),
        scale_factor: problem.scale_factor * s,
    })
}

/// On-disk JSON container for a [`MeasurementProblem`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_v: Option<Vec<f64>>,
    pub scale_factor: f64,
}

impl From<&MeasurementProblem> for ProblemFile {
    fn from(p: &MeasurementProblem) -> Self {
        ProblemFile {
            m: p.rows(),
            n: p.cols(),
            t: p.op.to_rows(),
            y: p.y.clone(),
            truth_u: p.truth_u.clone(),
            truth_v: p.truth_v.clone(),
            scale_factor: p.scale_factor,
        }
    }
}

impl TryFrom<ProblemFile> for MeasurementProblem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        if f.t.len() != f.m {
            return Err(Error::DimensionMismatch {
                expected: f.m,
                found: f.t.len(),
            });
        }
        let op = DenseOperator::from_rows(&f.t)?;
        check_len(f.n, op.cols())?;
        let p = MeasurementProblem {
            op,
            y: f.y,
            truth_u: f.truth_u,
            truth_v: f.truth_v,
            scale_factor: f.scale_factor,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Writes one matrix row per CSV line.
pub fn write_matrix_csv(path: impl AsRef<Path>, op: &DenseOperator) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..op.rows() {
        w.write_record(op.row(i).iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseOperator> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty("matrix CSV"));
    }
    DenseOperator::from_rows(&rows)
}

/// Writes one value per line.
pub fn write_vector_csv(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for x in v {
        w.write_record([format!("{x:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a vector stored either one value per line or as a single row.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        for s in rec?.iter().filter(|s| !s.is_empty()) {
            out.push(s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?);
        }
    }
    Ok(out)
}
