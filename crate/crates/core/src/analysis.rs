//! PCA projection of solution point clouds for cluster inspection.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::GridResult;
use crate::linalg::{dot, norm2};

const PCA_TOL: f64 = 1e-12;
const PCA_MAX_SWEEPS: usize = 10_000;
const GUARD_VECTORS: usize = 2;
const START_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    U,
    V,
}

impl std::str::FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" | "U" => Ok(Component::U),
            "v" | "V" => Ok(Component::V),
            _ => Err(Error::Parse(format!("component must be u or v, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointLabel {
    pub alpha: f64,
    pub beta: f64,
    pub feasible: bool,
}

/// Points of common dimension with per-point labels. May be empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    labels: Vec<PointLabel>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<PointLabel>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: labels.len() });
        }
        if let Some(first) = points.first() {
            let n = first.len();
            if n == 0 {
                return Err(Error::InvalidParameter("points must have dimension >= 1".into()));
            }
            for p in &points {
                if p.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: p.len() });
                }
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("point cloud".into()));
                }
            }
        }
        Ok(PointCloud { points, labels })
    }

    /// Unlabelled cloud; labels are NaN/feasible.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let labels = vec![PointLabel { alpha: f64::NAN, beta: f64::NAN, feasible: true }; points.len()];
        Self::new(points, labels)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[PointLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }
}

/// The `u` (or `v`) vectors of the feasible, non-failed cells.
pub fn feasible_cloud(results: &[GridResult], which: Component) -> PointCloud {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for r in results.iter().filter(|r| r.feasible && !r.failed()) {
        points.push(match which {
            Component::U => r.solution.u.clone(),
            Component::V => r.solution.v.clone(),
        });
        labels.push(PointLabel { alpha: r.alpha, beta: r.beta, feasible: true });
    }
    PointCloud { points, labels }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    pub mean: Vec<f64>,
    pub axes: Vec<Vec<f64>>,
    pub coords: Vec<Vec<f64>>,
    /// Covariance eigenvalues (divisor `n − 1`), descending.
    pub explained_variance: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

impl PcaProjection {
    /// Coordinates of an arbitrary point in the fitted frame.
    pub fn project(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.mean.len() {
            return Err(Error::DimensionMismatch { expected: self.mean.len(), found: point.len() });
        }
        let centered: Vec<f64> = point.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        Ok(self.axes.iter().map(|ax| dot(ax, &centered)).collect())
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi; eigenvalues descending,
/// eigenvectors as columns of the returned row-major matrix.
fn jacobi_eigen(mut a: Vec<f64>, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * k + j].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r * k + p], a[r * k + q]);
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p * k + r], a[q * k + r]);
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
                for r in 0..k {
                    let (vrp, vrq) = (v[r * k + p], v[r * k + q]);
                    v[r * k + p] = c * vrp - s * vrq;
                    v[r * k + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[j * k + j].total_cmp(&a[i * k + i]));
    let vals = order.iter().map(|&i| a[i * k + i]).collect();
    let mut vecs = vec![0.0; k * k];
    for (col, &i) in order.iter().enumerate() {
        for r in 0..k {
            vecs[r * k + col] = v[r * k + i];
        }
    }
    (vals, vecs)
}

/// Modified Gram–Schmidt in place; columns that collapse are replaced by the
/// first canonical vector that is independent of the ones already kept.
fn orthonormalize(block: &mut [Vec<f64>]) {
    let n = block.first().map_or(0, Vec::len);
    let mut next_canonical = 0;
    for j in 0..block.len() {
        let (done, rest) = block.split_at_mut(j);
        let col = &mut rest[0];
        let orig = norm2(col);
        for _ in 0..2 {
            for prev in done.iter() {
                let c = dot(prev, col);
                col.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
            }
        }
        let mut len = norm2(col);
        while !(len > 1e-10 * orig.max(f64::MIN_POSITIVE)) || len == 0.0 {
            if next_canonical >= n {
                break;
            }
            col.iter_mut().for_each(|x| *x = 0.0);
            col[next_canonical] = 1.0;
            next_canonical += 1;
            for _ in 0..2 {
                for prev in done.iter() {
                    let c = dot(prev, col);
                    col.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
                }
            }
            len = norm2(col);
            if len > 1e-6 {
                break;
            }
        }
        col.iter_mut().for_each(|x| *x /= len);
    }
}

fn fix_sign(axis: &mut [f64]) {
    let mut best = 0;
    for i in 1..axis.len() {
        if axis[i].abs() > axis[best].abs() {
            best = i;
        }
    }
    if axis[best] < 0.0 {
        axis.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Top-`dims` principal axes by orthogonal iteration with Rayleigh–Ritz.
///
/// Axes whose variance is negligible (rank-deficient clouds, including the
/// all-identical case) are replaced by canonical basis directions completed
/// against the earlier axes, so the output always has `dims` orthonormal axes.
pub fn pca_project(cloud: &PointCloud, dims: usize) -> Result<PcaProjection> {
    let n_pts = cloud.len();
    let n = cloud.dim().ok_or(Error::Empty("point cloud"))?;
    if dims == 0 || dims > n {
        return Err(Error::InvalidParameter(format!("dims must lie in [1, {n}], got {dims}")));
    }
    if n_pts < dims + 1 {
        return Err(Error::InvalidParameter(format!(
            "PCA into {dims} dimensions needs at least {} points, got {n_pts}",
            dims + 1
        )));
    }

    let mut mean = vec![0.0; n];
    for p in cloud.points() {
        mean.iter_mut().zip(p).for_each(|(m, x)| *m += x);
    }
    mean.iter_mut().for_each(|m| *m /= n_pts as f64);
    let centered: Vec<Vec<f64>> = cloud
        .points()
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(a, b)| a - b).collect())
        .collect();

    let denom = (n_pts - 1) as f64;
    let apply_cov = |x: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for c in &centered {
            let s = dot(c, x) / denom;
            out.iter_mut().zip(c).for_each(|(o, ci)| *o += s * ci);
        }
        out
    };
    let total_var: f64 = centered.iter().map(|c| dot(c, c)).sum::<f64>() / denom;

    let k = (dims + GUARD_VECTORS).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut block: Vec<Vec<f64>> =
        (0..k).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    orthonormalize(&mut block);

    let mut ritz = vec![0.0; k];
    let mut sweeps = 0;
    let mut converged = total_var == 0.0;
    while !converged && sweeps < PCA_MAX_SWEEPS {
        sweeps += 1;
        let mut z: Vec<Vec<f64>> = block.iter().map(|b| apply_cov(b)).collect();
        orthonormalize(&mut z);
        let cz: Vec<Vec<f64>> = z.iter().map(|b| apply_cov(b)).collect();
        let mut h = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                h[i * k + j] = 0.5 * (dot(&z[i], &cz[j]) + dot(&z[j], &cz[i]));
            }
        }
        let (vals, vecs) = jacobi_eigen(h, k);
        block = (0..k)
            .map(|col| {
                let mut out = vec![0.0; n];
                for (r, zr) in z.iter().enumerate() {
                    let w = vecs[r * k + col];
                    out.iter_mut().zip(zr).for_each(|(o, x)| *o += w * x);
                }
                out
            })
            .collect();
        let lam1 = vals[0].max(f64::MIN_POSITIVE);
        converged = (0..dims).all(|i| {
            let cb = apply_cov(&block[i]);
            let res: f64 = cb
                .iter()
                .zip(&block[i])
                .map(|(c, b)| (c - vals[i] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            res <= PCA_TOL * lam1.max(total_var) || (vals[i] - ritz[i]).abs() <= PCA_TOL * lam1 * 1e-3
        });
        ritz = vals;
    }

    let negligible = 1e-12 * total_var.max(f64::MIN_POSITIVE);
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(dims);
    let mut variances = Vec::with_capacity(dims);
    for i in 0..dims {
        if total_var > 0.0 && ritz[i] > negligible {
            axes.push(block[i].clone());
            variances.push(ritz[i]);
        } else {
            axes.push(vec![0.0; n]);
            variances.push(0.0);
        }
    }
    if variances.iter().any(|&v| v == 0.0) {
        orthonormalize(&mut axes);
    }
    for ax in axes.iter_mut() {
        fix_sign(ax);
    }
    let coords = centered
        .iter()
        .map(|c| axes.iter().map(|ax| dot(ax, c)).collect())
        .collect();
    Ok(PcaProjection { mean, axes, coords, explained_variance: variances, sweeps, converged })
}

#[derive(Serialize)]
struct CoordRow {
    alpha: Option<f64>,
    beta: Option<f64>,
    coord1: f64,
    coord2: f64,
    is_truth: bool,
}

/// Plot-ready CSV: one row per cloud point, then an optional ground-truth row
/// with empty `alpha`/`beta`. One-dimensional projections get `coord2 = 0`.
pub fn write_projection_csv(
    w: impl Write,
    cloud: &PointCloud,
    projection: &PcaProjection,
    truth: Option<&[f64]>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let pick = |c: &[f64], i: usize| c.get(i).copied().unwrap_or(0.0);
    for (label, c) in cloud.labels().iter().zip(&projection.coords) {
        out.serialize(CoordRow {
            alpha: Some(label.alpha),
            beta: Some(label.beta),
            coord1: pick(c, 0),
            coord2: pick(c, 1),
            is_truth: false,
        })?;
    }
    if let Some(t) = truth {
        let c = projection.project(t)?;
        out.serialize(CoordRow { alpha: None, beta: None, coord1: pick(&c, 0), coord2: pick(&c, 1), is_truth: true })?;
    }
    if cloud.is_empty() && truth.is_none() {
        out.write_record(["alpha", "beta", "coord1", "coord2", "is_truth"])?;
    }
    out.flush()?;
    Ok(())
}
