//! Command-line front end: `eval`, `geodesic` and `verify`.
//!
//! Exit codes: 0 on success, 1 on a numerical failure or a failed check, 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::geodesics::solve_chord;
use crate::quasimap::mu_map;
use crate::scalars::{scalar_bundle, ScalarBundle};
use crate::space::{FinslerVector, GParameter, MetricContext, QuasiVector};
use crate::tensors::{cartan_tensor, metric_tensor};
use crate::verify::{run_verify, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "finsleroid", version, about = "Finsleroid metric, geodesics and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalars, metric tensor and Cartan contractions at one vector.
    Eval(EvalArgs),
    /// Samples the closed-form geodesic between two quasi-euclidean points.
    Geodesic(GeodesicArgs),
    /// Runs the seeded verification suite and prints a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Finsleroid parameter, -2 < g < 2.
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
    /// Dimension N >= 2; inferred from the vectors when omitted.
    #[arg(long)]
    pub dim: Option<usize>,
    /// `identity`, `diag:v1,...,v(N-1)` or `file:PATH`.
    #[arg(long, default_value = "identity")]
    pub metric: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comma-separated components R^1,...,R^N.
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
    #[arg(long, value_enum, default_value_t = EvalFormat::Text)]
    pub format: EvalFormat,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comma-separated start point in quasi-euclidean coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub t1: String,
    /// Comma-separated end point in quasi-euclidean coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub t2: String,
    /// Number of intervals; `samples + 1` points are written.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Also write the original coordinates `R = mu(t)`.
    #[arg(long)]
    pub pullback: bool,
    #[arg(long, value_enum, default_value_t = GeodesicFormat::Json)]
    pub format: GeodesicFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// `identity`, `diag:v1,...,v(N-1)` or `file:PATH`.
    #[arg(long, default_value = "identity")]
    pub metric: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Tolerance for checks without a pinned tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeodesicFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl From<GeometryError> for CliFailure {
    fn from(err: GeometryError) -> Self {
        let code = if err.is_usage() { 2 } else { 1 };
        CliFailure { code, message: err.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliFailure {
    CliFailure { code: 2, message: message.into() }
}

pub fn parse_components(text: &str) -> std::result::Result<Vec<f64>, CliFailure> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| usage(format!("bad component {t:?}: {e}"))))
        .collect()
}

/// Parses `identity`, `diag:...` or `file:PATH`; `dim` is the full dimension `N`.
pub fn parse_metric(spec: &str, dim: usize) -> std::result::Result<MetricContext, CliFailure> {
    let ctx = if spec == "identity" {
        MetricContext::identity(dim)?
    } else if let Some(list) = spec.strip_prefix("diag:") {
        MetricContext::diagonal(&parse_components(list)?)?
    } else if let Some(path) = spec.strip_prefix("file:") {
        MetricContext::from_file(path)?
    } else {
        return Err(usage(format!("unknown metric {spec:?}; expected identity, diag:... or file:PATH")));
    };
    if ctx.dim() != dim {
        return Err(usage(format!("metric has dimension {}, expected {dim}", ctx.dim())));
    }
    Ok(ctx)
}

fn space(args: &SpaceArgs, found: usize) -> std::result::Result<(GParameter, MetricContext), CliFailure> {
    let dim = args.dim.unwrap_or(found);
    if dim != found {
        return Err(GeometryError::DimensionMismatch { expected: dim, found }.into());
    }
    let p = GParameter::new(args.g)?;
    Ok((p, parse_metric(&args.metric, dim)?))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Serialize)]
pub struct CartanSummary {
    /// `C_p`.
    pub c_lower: Vec<f64>,
    /// `C^p`.
    pub c_upper: Vec<f64>,
    /// `C_p C^p`.
    pub c_square: f64,
}

#[derive(Debug, Serialize)]
pub struct EvalOutput {
    pub g: f64,
    pub dim: usize,
    pub vector: Vec<f64>,
    pub q: f64,
    pub z: f64,
    pub b: f64,
    pub a: f64,
    pub l: f64,
    pub phi: f64,
    pub j: f64,
    pub k: f64,
    pub g_lower: Vec<Vec<f64>>,
    pub det: f64,
    /// `J^(2N) det r_ab`.
    pub det_closed_form: f64,
    /// `None` on the axis or in the base plane.
    pub cartan: Option<CartanSummary>,
    pub cartan_note: Option<String>,
}

pub fn evaluate(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<EvalOutput> {
    let ScalarBundle { q, z, b, a, l, phi, j, k, .. } = scalar_bundle(p, ctx, r)?;
    let g = metric_tensor(p, ctx, r)?;
    let (cartan, cartan_note) = match cartan_tensor(p, ctx, r) {
        Ok(c) => (
            Some(CartanSummary {
                c_lower: c.vec_lower.iter().copied().collect(),
                c_upper: c.vec_upper.iter().copied().collect(),
                c_square: c.trace_square(),
            }),
            None,
        ),
        Err(err @ GeometryError::OnAxis { .. }) => (None, Some(err.to_string())),
        Err(err) => return Err(err),
    };
    Ok(EvalOutput {
        g: p.g(),
        dim: ctx.dim(),
        vector: r.as_vector().iter().copied().collect(),
        q,
        z,
        b,
        a,
        l,
        phi,
        j,
        k,
        det: g.determinant(),
        det_closed_form: j.powi(2 * ctx.dim() as i32) * ctx.det_r(),
        g_lower: rows(&g),
        cartan,
        cartan_note,
    })
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ")
}

pub fn eval_text(out: &EvalOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "g = {}", out.g);
    let _ = writeln!(s, "dim = {}", out.dim);
    let _ = writeln!(s, "vector = {}", list(&out.vector));
    for (name, v) in [
        ("q", out.q),
        ("z", out.z),
        ("b", out.b),
        ("a", out.a),
        ("l", out.l),
        ("phi", out.phi),
        ("j", out.j),
        ("k", out.k),
        ("det", out.det),
        ("det_closed_form", out.det_closed_form),
    ] {
        let _ = writeln!(s, "{name} = {v:.16e}");
    }
    for (i, row) in out.g_lower.iter().enumerate() {
        let _ = writeln!(s, "g_lower[{i}] = {}", list(row));
    }
    match (&out.cartan, &out.cartan_note) {
        (Some(c), _) => {
            let _ = writeln!(s, "c_lower = {}", list(&c.c_lower));
            let _ = writeln!(s, "c_upper = {}", list(&c.c_upper));
            let _ = writeln!(s, "c_square = {:.16e}", c.c_square);
        }
        (None, Some(note)) => {
            let _ = writeln!(s, "cartan = unavailable ({note})");
        }
        (None, None) => {}
    }
    s
}

#[derive(Debug, Serialize)]
pub struct ChordConstants {
    pub a: f64,
    pub b: f64,
    pub delta_s: f64,
    pub alpha: f64,
}

#[derive(Debug, Serialize)]
pub struct GeodesicSample {
    pub s: f64,
    pub t: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct GeodesicOutput {
    pub g: f64,
    pub dim: usize,
    pub chord: ChordConstants,
    pub points: Vec<GeodesicSample>,
}

pub fn sample_geodesic(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
    samples: usize,
    pullback: bool,
) -> Result<GeodesicOutput> {
    let chord = solve_chord(p, ctx, t1, t2)?;
    let mut points = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let s = chord.delta_s * i as f64 / samples as f64;
        // pin the endpoints to the inputs exactly
        let t = match i {
            0 => t1.clone(),
            _ if i == samples => t2.clone(),
            _ => chord.point(s).t,
        };
        let r = if pullback { Some(mu_map(p, ctx, &t)?.as_vector().iter().copied().collect()) } else { None };
        points.push(GeodesicSample { s, t: t.as_vector().iter().copied().collect(), r });
    }
    Ok(GeodesicOutput {
        g: p.g(),
        dim: ctx.dim(),
        chord: ChordConstants { a: chord.a, b: chord.b, delta_s: chord.delta_s, alpha: chord.alpha },
        points,
    })
}

/// CSV with one row per point; chord constants repeat on every row.
pub fn geodesic_csv(out: &GeodesicOutput) -> std::result::Result<String, CliFailure> {
    let fail = |e: csv::Error| CliFailure { code: 1, message: e.to_string() };
    let mut w = csv::Writer::from_writer(Vec::new());
    let n = out.dim;
    let pullback = out.points.first().is_some_and(|pt| pt.r.is_some());
    let mut header = vec!["s".to_string()];
    header.extend((1..=n).map(|i| format!("t{i}")));
    if pullback {
        header.extend((1..=n).map(|i| format!("r{i}")));
    }
    header.extend(["a", "b", "delta_s", "alpha"].map(String::from));
    w.write_record(&header).map_err(fail)?;
    let num = |x: f64| format!("{x:.16e}");
    let c = &out.chord;
    for pt in &out.points {
        let mut row = vec![num(pt.s)];
        row.extend(pt.t.iter().map(|x| num(*x)));
        if let Some(r) = &pt.r {
            row.extend(r.iter().map(|x| num(*x)));
        }
        row.extend([c.a, c.b, c.delta_s, c.alpha].map(num));
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliFailure { code: 1, message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

fn to_json<T: Serialize>(value: &T) -> std::result::Result<String, CliFailure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliFailure { code: 1, message: e.to_string() })
}

/// Output of a command: text for stdout, optional text for stderr, and the exit code.
#[derive(Debug)]
pub struct CliOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn execute(cli: Cli) -> std::result::Result<CliOutput, CliFailure> {
    match cli.command {
        Command::Eval(args) => {
            let comps = parse_components(&args.vector)?;
            let (p, ctx) = space(&args.space, comps.len())?;
            let r = FinslerVector::new(comps)?;
            let out = evaluate(&p, &ctx, &r)?;
            let stdout = match args.format {
                EvalFormat::Text => eval_text(&out),
                EvalFormat::Json => to_json(&out)?,
            };
            Ok(CliOutput { stdout, stderr: String::new(), code: 0 })
        }
        Command::Geodesic(args) => {
            if args.samples == 0 {
                return Err(usage("--samples must be at least 1"));
            }
            let (c1, c2) = (parse_components(&args.t1)?, parse_components(&args.t2)?);
            if c1.len() != c2.len() {
                return Err(GeometryError::DimensionMismatch { expected: c1.len(), found: c2.len() }.into());
            }
            let (p, ctx) = space(&args.space, c1.len())?;
            let (t1, t2) = (QuasiVector::new(c1)?, QuasiVector::new(c2)?);
            let out = sample_geodesic(&p, &ctx, &t1, &t2, args.samples, args.pullback)?;
            let stdout = match args.format {
                GeodesicFormat::Json => to_json(&out)?,
                GeodesicFormat::Csv => geodesic_csv(&out)?,
            };
            Ok(CliOutput { stdout, stderr: String::new(), code: 0 })
        }
        Command::Verify(args) => {
            if args.trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            if !(args.tol > 0.0) {
                return Err(usage("--tol must be positive"));
            }
            let ctx = parse_metric(&args.metric, args.dim)?;
            let config = VerifyConfig { g: args.g, ctx, seed: args.seed, trials: args.trials, tol: args.tol };
            let report = run_verify(&config)?;
            let mut stderr = String::new();
            for w in &report.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            if !report.passed {
                let _ = writeln!(stderr, "failed checks: {}", report.failed.join(", "));
            }
            let code = if report.passed { 0 } else { 1 };
            Ok(CliOutput { stdout: to_json(&report)?, stderr, code })
        }
    }
}

/// Parses arguments, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            let _ = std::io::stderr().write_all(out.stderr.as_bytes());
            out.code
        }
        Err(fail) => {
            let _ = writeln!(std::io::stderr(), "error: {}", fail.message);
            fail.code
        }
    }
}
