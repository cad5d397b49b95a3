//! `unmix` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
//! 3 solver stopped at its iteration cap.

mod args;
mod manifest;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;
use unmix_core::analysis::write_projection_csv;
use unmix_core::experiments::{
    grid_search_with_threshold, read_results_jsonl, support_of, write_results_csv,
    write_results_jsonl, MonoConfig, SweepManifest,
};
use unmix_core::solver::{demo_config_2d, demo_params_2d, demo_problem_2d};
use unmix_core::{
    best_result, compare_multi_mono, feasible_cloud, generate_problem, normalize_problem,
    pca_project, Component, Criterion, Error, GridSpec, MeasurementProblem, PointCloud,
    PointLabel, ProblemSpec, RegParams, SolveConfig, SolveStatus,
};

use args::{Cli, Command, CompareArgs, GenerateArgs, GridArgs, LoopArgs, PcaArgs, SolveArgs, SpecArgs, SweepArgs};
use manifest::{ManifestBuilder, RunManifest};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    ExitCode::from(run(cli, &argv[1..]))
}

fn run(cli: Cli, argv: &[String]) -> u8 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return EXIT_USAGE;
        }
        // a second build (replay) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out_dir = cli.out_dir.clone();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, &out_dir, argv),
        Command::Solve(a) => cmd_solve(a, &out_dir, argv),
        Command::Sweep(a) => cmd_sweep(a, &out_dir, argv),
        Command::Compare(a) => cmd_compare(a, &out_dir, argv),
        Command::Pca(a) => cmd_pca(a, &out_dir, argv),
        Command::Replay(a) => cmd_replay(&a.manifest),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::NumericalFailure { .. }
                | Error::NonFinite(_)
                | Error::NormNotConverged { .. }
                | Error::ZeroOperator
                | Error::NotNormalized { .. } => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn output_path(out_dir: &Path, explicit: Option<PathBuf>, default_name: &str) -> std::io::Result<PathBuf> {
    let path = explicit.unwrap_or_else(|| out_dir.join(default_name));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(path)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn problem_spec(spec: &SpecArgs, seed: u64) -> ProblemSpec {
    ProblemSpec {
        m: spec.m,
        n: spec.n,
        sparsity: spec.sparsity,
        amplitude: spec.amplitude,
        min_magnitude: spec.min_magnitude,
        noise_norm: spec.noise,
        seed,
        target_norm: spec.target_norm,
    }
}

/// Loads a problem and rescales it if its operator norm exceeds the target.
fn load_problem(path: &Path, target: f64) -> Result<MeasurementProblem, Failure> {
    let raw = MeasurementProblem::load_json(path)?;
    let p = normalize_problem(&raw, target)?;
    if p.scale_factor != raw.scale_factor {
        eprintln!("note: rescaled {} by {:.6e}", path.display(), p.scale_factor / raw.scale_factor);
    }
    Ok(p)
}

fn grid_spec(g: &GridArgs) -> GridSpec {
    if g.grid_default {
        GridSpec::default()
    } else {
        GridSpec { alpha0: g.alpha0, beta0: g.beta0, ratio: g.ratio, count: g.count }
    }
}

fn loop_config(l: &LoopArgs) -> SolveConfig {
    SolveConfig {
        inner_u_iters: l.inner_u,
        inner_v_iters: l.inner_v,
        max_outer: l.max_outer,
        stop_tol: l.stop_tol,
        record_trace: false,
        initial_u: None,
        initial_v: None,
    }
}

fn cmd_generate(a: GenerateArgs, out_dir: &Path, argv: &[String]) -> CmdResult {
    if a.count == 0 {
        return Err(Failure::Usage("--count must be >= 1".into()));
    }
    if a.count > 1 && a.output.is_some() {
        return Err(Failure::Usage("--output needs --count 1; use --out-dir for batches".into()));
    }
    let mb = ManifestBuilder::start("generate", argv);
    let seeds: Vec<u64> = (0..a.count as u64).map(|k| a.seed + k).collect();
    let mut outputs = Vec::new();
    for &seed in &seeds {
        let spec = problem_spec(&a.spec, seed);
        let problem = generate_problem(&spec)?;
        let path = if a.count == 1 {
            output_path(out_dir, a.output.clone(), &format!("problem_{seed}.json"))?
        } else {
            output_path(out_dir, None, &format!("problem_{seed}.json"))?
        };
        problem.save_json(&path)?;
        let truth = problem.truth_u.as_deref().unwrap_or(&[]);
        println!(
            "seed {seed}: {}x{} operator, scale {:.6e}, #supp(u) = {}, wrote {}",
            problem.rows(),
            problem.cols(),
            problem.scale_factor,
            support_of(truth).len(),
            path.display()
        );
        outputs.push(path);
    }
    let m = mb.finish(json!({ "spec": problem_spec(&a.spec, a.seed) }), seeds, outputs.clone());
    m.write(&RunManifest::path_for(&outputs[0]))?;
    Ok(0)
}

fn cmd_solve(a: SolveArgs, out_dir: &Path, argv: &[String]) -> CmdResult {
    let mb = ManifestBuilder::start("solve", argv);
    let (problem, defaults, mut config, name) = if a.demo_2d {
        (demo_problem_2d(), Some(demo_params_2d()), demo_config_2d(), "demo2d")
    } else {
        let path = a.problem.as_ref().expect("clap enforces --problem");
        (load_problem(path, 0.99)?, None, SolveConfig::default(), "run")
    };
    let pick = |v: Option<f64>, d: Option<f64>, flag: &str| {
        v.or(d).ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
    };
    let params = RegParams {
        p: pick(a.reg.p, defaults.map(|d| d.p), "p")?,
        q: a.reg.q.or(defaults.map(|d| d.q)).ok_or_else(|| Failure::Usage("--q is required".into()))?,
        alpha: pick(a.alpha, defaults.map(|d| d.alpha), "alpha")?,
        beta: pick(a.beta, defaults.map(|d| d.beta), "beta")?,
        epsilon: a.epsilon,
    };
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    config.inner_u_iters = a.inner_u;
    config.inner_v_iters = a.inner_v;
    if let Some(m) = a.max_outer {
        config.max_outer = m;
    }
    if let Some(t) = a.stop_tol {
        config.stop_tol = t;
    }
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let (pair, trace) = unmix_core::solve(&problem, &params, &config)?;
    let prefix = output_path(out_dir, a.output, name)?;
    let sol_path = with_suffix(&prefix, ".solution.json");
    let trace_path = with_suffix(&prefix, ".trace.jsonl");
    let j_final = trace.j_values.last().copied();
    let solution = json!({
        "params": params,
        "status": trace.status,
        "iterations": trace.iterations,
        "J_final": j_final,
        "support_fixed_at": trace.support_fixed_at,
        "fixed_point": trace.fixed_point_residuals,
        "u": pair.u,
        "v": pair.v,
        "support_u": pair.support_u,
        "zero_set": pair.zero_set,
    });
    serde_json::to_writer_pretty(BufWriter::new(File::create(&sol_path)?), &solution).map_err(Error::from)?;
    trace.write_jsonl(BufWriter::new(File::create(&trace_path)?))?;

    println!(
        "{:?} after {} outer iterations, J = {:.10e}, #supp(u) = {}",
        trace.status,
        trace.iterations,
        j_final.unwrap_or(f64::NAN),
        pair.support_u.len()
    );
    if a.demo_2d || pair.u.len() <= 8 {
        println!("u = {:?}\nv = {:?}", pair.u, pair.v);
    }
    let m = mb.finish(
        json!({ "params": params, "config": config, "problem": a.problem, "demo_2d": a.demo_2d }),
        Vec::new(),
        vec![sol_path.clone(), trace_path],
    );
    m.write(&RunManifest::path_for(&sol_path))?;
    Ok(match trace.status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxOuterReached => EXIT_NOT_CONVERGED,
    })
}

fn cmd_sweep(a: SweepArgs, out_dir: &Path, argv: &[String]) -> CmdResult {
    let mb = ManifestBuilder::start("sweep", argv);
    let (problem, spec, seeds) = match &a.problem {
        Some(path) => (load_problem(path, a.spec.target_norm)?, None, Vec::new()),
        None => {
            let spec = problem_spec(&a.spec, a.seed);
            (generate_problem(&spec)?, Some(spec), vec![a.seed])
        }
    };
    if problem.truth_u.is_none() {
        return Err(Failure::Usage("sweep needs a problem with ground truth".into()));
    }
    let grid = grid_spec(&a.grid);
    let config = loop_config(&a.loops);
    let results = grid_search_with_threshold(&problem, a.p, a.q, &grid, &config, a.loops.residual_threshold)?;

    let default_name = format!("sweep_p{}_q{}.csv", a.p, a.q);
    let csv_path = output_path(out_dir, a.output, &default_name)?;
    let problem_id = seeds.first().copied().unwrap_or(0) as usize;
    let rows: Vec<_> = results.iter().map(|r| (problem_id, r)).collect();
    write_results_csv(BufWriter::new(File::create(&csv_path)?), &rows)?;
    let mut outputs = vec![csv_path.clone()];
    if a.save_solutions {
        let jsonl = csv_path.with_extension("jsonl");
        write_results_jsonl(BufWriter::new(File::create(&jsonl)?), &results)?;
        outputs.push(jsonl);
    }

    let failed = results.iter().filter(|r| r.failed()).count();
    let feasible = results.iter().filter(|r| r.feasible).count();
    println!("{} cells, {feasible} feasible, {failed} failed, wrote {}", results.len(), csv_path.display());
    if let (Ok(ae), Ok(sd)) = (best_result(&results, Criterion::Ae), best_result(&results, Criterion::Sd)) {
        println!("best AE {:.6} at (alpha, beta) = ({:.6e}, {:.6e})", ae.ae, ae.alpha, ae.beta);
        println!("best SD {} at (alpha, beta) = ({:.6e}, {:.6e})", sd.sd, sd.alpha, sd.beta);
    }
    let sweep = SweepManifest {
        spec,
        grid,
        config,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seeds: seeds.clone(),
        feasibility_residual: a.loops.residual_threshold,
    };
    let params = json!({ "sweep": sweep, "p": a.p, "q": a.q, "problem": a.problem });
    mb.finish(params, seeds, outputs).write(&RunManifest::path_for(&csv_path))?;
    Ok(if failed > 0 { EXIT_NUMERICAL } else { 0 })
}

fn cmd_compare(a: CompareArgs, out_dir: &Path, argv: &[String]) -> CmdResult {
    if a.problems == 0 {
        return Err(Failure::Usage("--problems must be >= 1".into()));
    }
    let mb = ManifestBuilder::start("compare", argv);
    let seeds: Vec<u64> = (0..a.problems as u64).map(|k| a.seed + k).collect();
    let problems = seeds
        .iter()
        .map(|&s| generate_problem(&problem_spec(&a.spec, s)))
        .collect::<unmix_core::Result<Vec<_>>>()?;
    let grid = grid_spec(&a.grid);
    let config = loop_config(&a.loops);
    let mono = MonoConfig { max_iters: a.mono_max_iters, stop_tol: a.mono_stop_tol };
    let stats = compare_multi_mono(&problems, &a.p, &a.q, &grid, &grid.alphas(), &config, &mono)?;

    let path = output_path(out_dir, a.output, "compare.json")?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &stats).map_err(Error::from)?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "{:<6} {:>4} {:>5} {:>10} {:>8} {:>9} {:>9}", "method", "p", "q", "mean_AE", "mean_SD", "P(AE<=)", "P(SD<=)")?;
    for s in &stats.multi {
        writeln!(
            out,
            "{:<6} {:>4} {:>5} {:>10.5} {:>8.3} {:>9.2} {:>9.2}",
            "multi", s.p, s.q.to_string(), s.mean_ae, s.mean_sd, s.prob_ae_better_or_equal, s.prob_sd_better_or_equal
        )?;
    }
    for s in &stats.mono {
        writeln!(out, "{:<6} {:>4} {:>5} {:>10.5} {:>8.3} {:>9} {:>9}", "mono", s.p, "-", s.mean_ae, s.mean_sd, "-", "-")?;
    }
    writeln!(out, "wrote {}", path.display())?;

    let params = json!({
        "spec": problem_spec(&a.spec, a.seed),
        "p": a.p,
        "q": a.q,
        "grid": grid,
        "config": config,
        "mono": mono,
        "feasibility_residual": a.loops.residual_threshold,
    });
    mb.finish(params, seeds, vec![path.clone()]).write(&RunManifest::path_for(&path))?;
    Ok(0)
}

fn cmd_pca(a: PcaArgs, out_dir: &Path, argv: &[String]) -> CmdResult {
    let mb = ManifestBuilder::start("pca", argv);
    let results = read_results_jsonl(BufReader::new(File::open(&a.results)?))?;
    let cloud = if a.feasible_only {
        feasible_cloud(&results, a.component)
    } else {
        let kept: Vec<_> = results.iter().filter(|r| !r.failed()).collect();
        let points = kept
            .iter()
            .map(|r| match a.component {
                Component::U => r.solution.u.clone(),
                Component::V => r.solution.v.clone(),
            })
            .collect();
        let labels = kept
            .iter()
            .map(|r| PointLabel { alpha: r.alpha, beta: r.beta, feasible: r.feasible })
            .collect();
        PointCloud::new(points, labels)?
    };
    let truth = match &a.truth {
        Some(path) => {
            let p = MeasurementProblem::load_json(path)?;
            let t = match a.component {
                Component::U => p.truth_u,
                Component::V => p.truth_v,
            };
            Some(t.ok_or_else(|| Failure::Usage(format!("{} has no ground truth", path.display())))?)
        }
        None => None,
    };

    let name = match a.component {
        Component::U => "pca_u.csv",
        Component::V => "pca_v.csv",
    };
    let path = output_path(out_dir, a.output, name)?;
    let w = BufWriter::new(File::create(&path)?);
    let mut explained = Vec::new();
    if cloud.len() < a.dims + 1 {
        eprintln!(
            "warning: {} points in the cloud, PCA into {} dimensions needs {}; writing header only",
            cloud.len(),
            a.dims,
            a.dims + 1
        );
        let mut out = w;
        writeln!(out, "alpha,beta,coord1,coord2,is_truth")?;
    } else {
        let projection = pca_project(&cloud, a.dims)?;
        write_projection_csv(w, &cloud, &projection, truth.as_deref())?;
        explained = projection.explained_variance.clone();
        println!("{} points, explained variance {:?}", cloud.len(), explained);
    }
    println!("wrote {}", path.display());
    let params = json!({
        "results": a.results,
        "component": a.component,
        "feasible_only": a.feasible_only,
        "truth": a.truth,
        "dims": a.dims,
        "points": cloud.len(),
        "explained_variance": explained,
    });
    mb.finish(params, Vec::new(), vec![path.clone()]).write(&RunManifest::path_for(&path))?;
    Ok(0)
}

fn cmd_replay(path: &Path) -> CmdResult {
    let m = RunManifest::read(path)?;
    if m.command == "replay" {
        return Err(Failure::Usage("refusing to replay a replay".into()));
    }
    let mut argv = vec!["unmix".to_string()];
    argv.extend(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::Usage(e.to_string()))?;
    eprintln!("replaying: {}", m.argv.join(" "));
    Ok(run(cli, &m.argv))
}
