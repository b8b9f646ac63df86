//! Command-line front end: algebra checks, PDE verification sweeps, potential
//! evaluation, algebra reconstruction, and parallel transport, all emitting
//! deterministic JSON reports.
//!
//! Exit codes: 0 = all checks pass, 1 = a mathematical check failed,
//! 2 = input error.

mod report;

use clap::{Args, Parser, Subcommand};
use hesspar::algebra::{invariance_residual, spectral};
use hesspar::geometry::{
    isomorphism_residual, metric_preservation_residual, parallel_transport,
    reconstruct_from_sample, recover_unit, residual_first_from_sample, residual_third_from_sample,
    sample_tensors, VerificationConfig,
};
use hesspar::io::{matrix_to_rows, vector_to_vec, AlgebraSpecDoc, IoError, PotentialSpecDoc};
use hesspar::numdiff::StencilConfig;
use hesspar::sampling::{seeded_rng, unit_sphere_sample};
use nalgebra::DVector;
use rand::Rng;
use report::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hesspar",
    about = "Metrised Jordan algebras and Hessian potentials: checks, verification sweeps, reconstruction, transport"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra spec: commutativity, Jordan identity,
    /// integrability, invariance of the form, unit element.
    AlgebraCheck(AlgebraCheckArgs),
    /// Sweep a potential field: parallel-third and parallel-first residuals,
    /// unit/center/ν recovery.
    Verify(VerifyArgs),
    /// Evaluate a potential and its first two derivatives at a point.
    Eval(EvalArgs),
    /// Reconstruct the metrised algebra of a potential at a point and write
    /// it as an algebra spec document.
    Reconstruct(ReconstructArgs),
    /// Parallel-transport a frame along a polyline and check that it is an
    /// isomorphism of the reconstructed endpoint algebras.
    Transport(TransportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// RNG seed recorded in the report; all sampling is derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of samples (sweep points or residual samples).
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Pass threshold for the normalized parallel-third residual.
    #[arg(long, default_value_t = 1e-6)]
    tol_third: f64,
    /// Pass threshold for the normalized parallel-first residual.
    #[arg(long, default_value_t = 1e-6)]
    tol_first: f64,
    /// Base step for finite-difference fallbacks.
    #[arg(long, default_value_t = 1e-2)]
    fd_step: f64,
    /// Richardson extrapolation levels for finite-difference fallbacks.
    #[arg(long, default_value_t = 2)]
    fd_levels: usize,
    /// Write the JSON report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlgebraCheckArgs {
    /// Path to the algebra spec JSON document.
    spec: PathBuf,
    /// Residual tolerance for the pass verdict.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the potential spec JSON document.
    spec: PathBuf,
    /// Anchor for sampling, comma-separated coordinates. Defaults to the
    /// barrier's unit point or the series origin.
    #[arg(long, allow_hyphen_values = true)]
    anchor: Option<String>,
    /// JSON file with explicit points (array of coordinate arrays); overrides
    /// sampling.
    #[arg(long)]
    points: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Path to the potential spec JSON document.
    spec: PathBuf,
    /// Evaluation point, comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Path to the potential spec JSON document.
    spec: PathBuf,
    /// Reconstruction point, comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Reconstruction refuses when the parallel-third residual exceeds this.
    #[arg(long, default_value_t = 1e-4)]
    gate: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TransportArgs {
    /// Path to the potential spec JSON document.
    spec: PathBuf,
    /// Polyline as semicolon-separated points of comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    path: String,
    /// Integrator substeps per segment.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Pass threshold for the isomorphism residual.
    #[arg(long, default_value_t = 1e-5)]
    tol_iso: f64,
    /// Pass threshold for metric preservation.
    #[arg(long, default_value_t = 1e-6)]
    tol_metric: f64,
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Input(String),
    Math(String),
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(CliError::Math(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::AlgebraCheck(args) => cmd_algebra_check(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Transport(args) => cmd_transport(args),
    }
}

fn manifest(command: &str, inputs: Vec<String>, common: &CommonArgs) -> Manifest {
    Manifest {
        command: command.to_string(),
        inputs,
        seed: common.seed,
        samples: common.samples,
        tolerances: Tolerances {
            third: common.tol_third,
            first: common.tol_first,
        },
        fd_step: common.fd_step,
        fd_levels: common.fd_levels,
        output: common.out.as_ref().map(|p| p.display().to_string()),
    }
}

fn verification_config(common: &CommonArgs) -> VerificationConfig {
    VerificationConfig {
        tol_third: common.tol_third,
        tol_first: common.tol_first,
        stencil: StencilConfig {
            base_step: common.fd_step,
            richardson_levels: common.fd_levels,
            ..StencilConfig::default()
        },
        ..VerificationConfig::default()
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("invalid json in {}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<DVector<f64>, CliError> {
    let coords = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::input(format!("invalid point '{s}': {e}")))?;
    if coords.is_empty() {
        return Err(CliError::input("point must have at least one coordinate"));
    }
    Ok(DVector::from_vec(coords))
}

fn parse_path(s: &str) -> Result<Vec<DVector<f64>>, CliError> {
    let points = s
        .split(';')
        .map(parse_point)
        .collect::<Result<Vec<_>, _>>()?;
    if points.len() < 2 {
        return Err(CliError::input("path needs at least two points"));
    }
    Ok(points)
}

fn emit<T: serde::Serialize>(report: &T, out: &Option<PathBuf>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    match out {
        Some(path) => {
            std::fs::write(path, json.as_bytes())
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            println!("report written to {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_algebra_check(args: AlgebraCheckArgs) -> Result<bool, CliError> {
    let doc: AlgebraSpecDoc = serde_json::from_value(read_json(&args.spec)?)
        .map_err(|e| CliError::input(format!("invalid algebra spec: {e}")))?;
    let (algebra, form) = doc.build()?;
    if !form.is_nondegenerate() {
        return Err(CliError::input("degenerate form"));
    }

    let n = algebra.dim();
    let c = algebra.structure();
    let mut commutativity = 0.0f64;
    for g in 0..n {
        for a in 0..n {
            for b in 0..a {
                commutativity = commutativity.max((c[(g, a, b)] - c[(g, b, a)]).abs());
            }
        }
    }
    let (jordan, integrability) = if n <= 8 {
        (
            algebra.jordan_residual_exhaustive(),
            algebra.integrability_residual_exhaustive(),
        )
    } else {
        (
            algebra.jordan_residual(args.common.samples.max(64), args.common.seed),
            algebra.integrability_residual(args.common.samples.max(64), args.common.seed),
        )
    };
    let invariance = invariance_residual(
        &algebra,
        &form,
        args.common.samples.max(64),
        args.common.seed,
    )
    .max(hesspar::algebra::invariance_residual_exhaustive(
        &algebra, &form,
    ));
    let unit = algebra.find_unit();
    let unit_residual = unit
        .as_ref()
        .map(|e| (algebra.left_mult(e) - nalgebra::DMatrix::<f64>::identity(n, n)).norm());
    let pass = commutativity <= args.tol
        && jordan <= args.tol
        && integrability <= args.tol
        && invariance <= args.tol;

    let report = AlgebraCheckReport {
        manifest: manifest(
            "algebra-check",
            vec![args.spec.display().to_string()],
            &args.common,
        ),
        dim: n,
        commutativity_residual: commutativity,
        jordan_residual: jordan,
        integrability_residual: integrability,
        invariance_residual: invariance,
        unit: unit.as_ref().map(vector_to_vec),
        unit_residual,
        form_positive_definite: form.is_positive_definite(),
        tolerance: args.tol,
        pass,
    };
    emit(&report, &args.common.out)?;
    Ok(pass)
}

/// Default anchor: barrier center + factor units; origin otherwise.
fn default_anchor(spec: &PotentialSpecDoc, dim: usize) -> Result<DVector<f64>, CliError> {
    match spec {
        PotentialSpecDoc::Barrier(doc) => {
            let bspec = doc.to_spec()?;
            let mut anchor = bspec.center().clone();
            let mut off = 0;
            for (m, _) in bspec.factors() {
                let e = m
                    .algebra()
                    .find_unit()
                    .ok_or_else(|| CliError::input("barrier factor has no unit"))?;
                let mut view = anchor.rows_mut(off, m.dim());
                view += &e;
                off += m.dim();
            }
            Ok(anchor)
        }
        _ => Ok(DVector::zeros(dim)),
    }
}

/// Radius 0.3·(estimated distance to the domain boundary) around the anchor.
fn sampling_radius(spec: &PotentialSpecDoc, anchor: &DVector<f64>) -> Result<f64, CliError> {
    match spec {
        PotentialSpecDoc::Barrier(doc) => {
            let bspec = doc.to_spec()?;
            let delta = anchor - bspec.center();
            let mut min_eig = f64::INFINITY;
            let mut off = 0;
            for (m, _) in bspec.factors() {
                let dj = DVector::from_column_slice(delta.rows(off, m.dim()).as_slice());
                let dec = spectral(m.algebra(), &dj)
                    .map_err(|e| CliError::input(format!("anchor outside cone: {e}")))?;
                min_eig = min_eig.min(dec.min_eigenvalue());
                off += m.dim();
            }
            if min_eig <= 0.0 {
                return Err(CliError::Math("anchor lies outside the cone".into()));
            }
            // eigenvalues move by at most √2·‖Δx‖ under a coordinate step
            Ok(0.3 * min_eig / std::f64::consts::SQRT_2)
        }
        PotentialSpecDoc::Series(doc) => {
            let m = doc.to_metrised()?;
            let rho_anchor = spectral_radius(&m.algebra().left_mult(anchor));
            if rho_anchor >= 1.0 {
                return Err(CliError::Math(
                    "anchor outside the series convergence region".into(),
                ));
            }
            let mut bound = 0.0f64;
            for k in 0..m.dim() {
                let e = basis_vector(m.dim(), k);
                bound = bound.max(m.algebra().left_mult(&e).norm());
            }
            Ok(0.3 * (1.0 - rho_anchor) / bound.max(1e-12))
        }
        PotentialSpecDoc::Quadratic(_) => Ok(1.0),
    }
}

fn basis_vector(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn spectral_radius(l: &nalgebra::DMatrix<f64>) -> f64 {
    l.clone()
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |a, z| a.max(z.norm()))
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, CliError> {
    let value = read_json(&args.spec)?;
    let spec = PotentialSpecDoc::parse(&value)?;
    let field = spec.build()?;
    let cfg = verification_config(&args.common);

    let mut inputs = vec![args.spec.display().to_string()];
    let points: Vec<DVector<f64>> = if let Some(points_path) = &args.points {
        inputs.push(points_path.display().to_string());
        let raw: Vec<Vec<f64>> = serde_json::from_value(read_json(points_path)?)
            .map_err(|e| CliError::input(format!("invalid points file: {e}")))?;
        raw.into_iter().map(DVector::from_vec).collect()
    } else {
        let anchor = match &args.anchor {
            Some(s) => parse_point(s)?,
            None => default_anchor(&spec, field.dim())?,
        };
        if anchor.len() != field.dim() {
            return Err(CliError::input(format!(
                "anchor has {} coordinates, field has dimension {}",
                anchor.len(),
                field.dim()
            )));
        }
        let radius = sampling_radius(&spec, &anchor)?;
        let mut rng = seeded_rng(args.common.seed);
        (0..args.common.samples)
            .map(|_| {
                let u = unit_sphere_sample(&mut rng, field.dim());
                let t: f64 = rng.random();
                &anchor + u * (t * radius)
            })
            .collect()
    };

    let mut records = Vec::new();
    let mut skipped = 0usize;
    for x in &points {
        if x.len() != field.dim() || !field.contains(x) {
            skipped += 1;
            continue;
        }
        let sample = match sample_tensors(field.as_ref(), x, &cfg) {
            Ok(s) => s,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let r3 = residual_third_from_sample(&sample);
        let r1 = residual_first_from_sample(&sample);
        let unit = recover_unit(&sample);
        let first_ok = r1.normalized <= cfg.tol_first;
        records.push(PointRecord {
            point: vector_to_vec(x),
            residual_third: r3.into(),
            residual_first: r1.into(),
            unit: vector_to_vec(&unit),
            center: first_ok.then(|| vector_to_vec(&(x - &unit))),
            nu: first_ok.then(|| sample.gradient.dot(&unit)),
            source_tags: sample
                .sources
                .iter()
                .map(|s| s.as_str().to_string())
                .collect(),
        });
    }

    if records.is_empty() {
        return Err(CliError::Math(
            "no sampled point landed inside the domain".into(),
        ));
    }
    let max_third = records
        .iter()
        .fold(0.0f64, |a, r| a.max(r.residual_third.normalized));
    let max_first = records
        .iter()
        .fold(0.0f64, |a, r| a.max(r.residual_first.normalized));
    let mean =
        |f: fn(&PointRecord) -> f64| records.iter().map(f).sum::<f64>() / records.len() as f64;
    let pass_third = max_third <= cfg.tol_third;
    let pass_first = max_first <= cfg.tol_first;
    let pass = pass_third && pass_first;
    let summary = VerifySummary {
        evaluated: records.len(),
        skipped,
        max_third,
        mean_third: mean(|r| r.residual_third.normalized),
        max_first,
        mean_first: mean(|r| r.residual_first.normalized),
        tol_third: cfg.tol_third,
        tol_first: cfg.tol_first,
        pass_third,
        pass_first,
        pass,
    };

    let report = VerifyReport {
        manifest: manifest("verify", inputs, &args.common),
        provenance: field.provenance().as_str().to_string(),
        points: records,
        summary,
    };
    emit(&report, &args.common.out)?;
    Ok(pass)
}

fn cmd_eval(args: EvalArgs) -> Result<bool, CliError> {
    let value = read_json(&args.spec)?;
    let spec = PotentialSpecDoc::parse(&value)?;
    let field = spec.build()?;
    let x = parse_point(&args.point)?;
    if x.len() != field.dim() {
        return Err(CliError::input(format!(
            "point has {} coordinates, field has dimension {}",
            x.len(),
            field.dim()
        )));
    }
    if !field.contains(&x) {
        return Err(CliError::Math("point lies outside the domain".into()));
    }
    let cfg = verification_config(&args.common);
    let sample =
        sample_tensors(field.as_ref(), &x, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let v = field.value(&x).map_err(|e| CliError::Math(e.to_string()))?;
    let report = EvalReport {
        manifest: manifest("eval", vec![args.spec.display().to_string()], &args.common),
        provenance: field.provenance().as_str().to_string(),
        point: vector_to_vec(&x),
        value: v,
        gradient: vector_to_vec(&sample.gradient),
        hessian: matrix_to_rows(&sample.g),
        source_tags: sample
            .sources
            .iter()
            .map(|s| s.as_str().to_string())
            .collect(),
    };
    emit(&report, &args.common.out)?;
    Ok(true)
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<bool, CliError> {
    let value = read_json(&args.spec)?;
    let spec = PotentialSpecDoc::parse(&value)?;
    let field = spec.build()?;
    let x = parse_point(&args.point)?;
    if x.len() != field.dim() {
        return Err(CliError::input(format!(
            "point has {} coordinates, field has dimension {}",
            x.len(),
            field.dim()
        )));
    }
    let mut cfg = verification_config(&args.common);
    cfg.reconstruct_gate = args.gate;
    let sample =
        sample_tensors(field.as_ref(), &x, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let r3 = residual_third_from_sample(&sample);
    let metrised =
        reconstruct_from_sample(&sample, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let unit = metrised.algebra().find_unit();
    match &unit {
        Some(e) => println!("unit element: {:?}", vector_to_vec(e)),
        None => println!("reconstructed algebra has no unit element"),
    }
    let report = ReconstructReport {
        manifest: manifest(
            "reconstruct",
            vec![args.spec.display().to_string()],
            &args.common,
        ),
        point: vector_to_vec(&x),
        residual_third: r3.into(),
        algebra: AlgebraSpecDoc::from_metrised(&metrised),
        unit: unit.as_ref().map(vector_to_vec),
        pass: true,
    };
    emit(&report, &args.common.out)?;
    Ok(true)
}

fn cmd_transport(args: TransportArgs) -> Result<bool, CliError> {
    let value = read_json(&args.spec)?;
    let spec = PotentialSpecDoc::parse(&value)?;
    let field = spec.build()?;
    let path = parse_path(&args.path)?;
    for p in &path {
        if p.len() != field.dim() {
            return Err(CliError::input("path point dimension mismatch"));
        }
    }
    let cfg = verification_config(&args.common);
    let j = parallel_transport(field.as_ref(), &path, args.steps, &cfg)
        .map_err(|e| CliError::Math(e.to_string()))?;
    let start = path.first().unwrap();
    let end = path.last().unwrap();
    let s_start =
        sample_tensors(field.as_ref(), start, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let s_end =
        sample_tensors(field.as_ref(), end, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let m_start =
        reconstruct_from_sample(&s_start, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let m_end = reconstruct_from_sample(&s_end, &cfg).map_err(|e| CliError::Math(e.to_string()))?;
    let iso = isomorphism_residual(
        &j,
        &m_start,
        &m_end,
        args.common.samples.max(32),
        args.common.seed,
    );
    let metric = metric_preservation_residual(&j, &s_start.g, &s_end.g);
    let pass = iso <= args.tol_iso && metric <= args.tol_metric;
    let report = TransportReport {
        manifest: manifest(
            "transport",
            vec![args.spec.display().to_string()],
            &args.common,
        ),
        steps_per_segment: args.steps,
        transport_matrix: matrix_to_rows(&j),
        metric_preservation_residual: metric,
        isomorphism_residual: iso,
        tol_isomorphism: args.tol_iso,
        tol_metric: args.tol_metric,
        pass,
    };
    emit(&report, &args.common.out)?;
    Ok(pass)
}
