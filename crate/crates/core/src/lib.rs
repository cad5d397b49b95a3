//! Separation of a sparse signal from bounded additive noise by minimizing
//! the multi-penalty functional
//!
//! ```text
//! J(u, v) = ‖T(u + v) − y‖² + α‖u‖_p^p + β‖v‖_q^q + ε‖v‖²
//! ```
//!
//! with an alternating iterative-thresholding scheme, plus the tooling
//! needed to run compressed-sensing parameter studies on top of it.
//!
//! Module map:
//!
//! * [`linalg`] – dense operators, power-iteration norm estimate, rescaling.
//! * [`prox`] – scalar and vector thresholding operators.
//! * [`solver`] – the alternating solver, functional evaluation, diagnostics,
//!   and the single-penalty baseline.
//! * [`experiments`] – problem generation, grid sweeps, metrics, comparisons.
//! * [`analysis`] – PCA projection of solution clouds.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod prox;
pub mod solver;

pub use analysis::{feasible_cloud, pca_project, Component, PcaProjection, PointCloud, PointLabel};
pub use error::{Error, Result};
pub use experiments::{
    best_parameter_regions, best_result, compare_multi_mono, generate_problem, grid_search,
    metric_ae, metric_sd, ComparisonStats, Criterion, GridResult, GridSpec, ProblemSpec,
};
pub use linalg::{estimate_operator_norm, normalize_problem, DenseOperator, MeasurementProblem};
pub use prox::{
    shrink_lq, threshold_half_closed_form, threshold_linf, threshold_lp, LpThresholdParams,
    LqShrinkParams,
};
pub use solver::{
    check_fixed_point, eval_functional, mono_solve, solve, FixedPointReport, MonoResult, QNorm,
    RegParams, SolutionPair, SolveConfig, SolveStatus, SolveTrace,
};
