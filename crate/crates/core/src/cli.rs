//! Command-line front end: argument parsing, point-cloud I/O, reports and exit codes.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage or parse
//! error (including unreadable input), 3 domain error, 4 solver
//! non-convergence, 5 invariant failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::chebyshev::{
    annulus_reduction, certificate_residuals, min_enclosing_ball, min_enclosing_ball_with,
    support_identity_residual, verify_certificate, ChebyshevResult, SolverOptions, DEFAULT_TOL,
};
use crate::error::Error;
use crate::generators::{FamilyId, FamilySpec};
use crate::geometry::{diameter, distance, PointSet};
use crate::jung::{jung_constant, report_from, ExtremalityReport, DEFAULT_CLASSIFY_TOL};
use crate::mnc::{mnc_profile, profiles, ProfileMode, ProfileOptions, ProfileRow};
use crate::simplex::{
    extract_exact, extract_greedy, extremality_witness, verify_simplex, ExtractMode,
    ExtractionOutcome, WitnessReport,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Caps the size of the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "EXTREMAL_KIT_THREADS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const OUTPUT: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const DOMAIN: i32 = 3;
    pub const NON_CONVERGENCE: i32 = 4;
    pub const INVARIANT: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: Error },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{failed} invariant check(s) failed")]
    Invariants { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => exit::PARSE,
            CliError::Write { .. } => exit::OUTPUT,
            CliError::Input { source, .. } | CliError::Core(source) => match source {
                Error::Parse { .. } => exit::PARSE,
                Error::NonConvergence { .. } => exit::NON_CONVERGENCE,
                _ => exit::DOMAIN,
            },
            CliError::Invariants { .. } => exit::INVARIANT,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "extremal-kit",
    version,
    about = "Chebyshev radius, Jung-bound extremality, long-edge simplices and covering profiles of point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Diameter, Chebyshev ball and Jung-bound classification.
    Analyze(AnalyzeArgs),
    /// Find a p-simplex whose edges all reach a threshold.
    Extract(ExtractArgs),
    /// Covering-radius and partition-diameter profiles (plot data).
    Profile(ProfileArgs),
    /// Write a generator family as a point-cloud CSV.
    Generate(GenerateArgs),
    /// Run the invariant suite on a point cloud, a family or a saved analyze report.
    Verify(VerifyArgs),
}

/// Where the points come from: a file, or a generator family.
#[derive(Args, Debug, Clone, Default)]
pub struct SourceArgs {
    /// Point-cloud CSV (one point per row, optional `dim=<d>` header).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Generator family id, e.g. orthonormal, example2, regular-simplex.
    #[arg(long, value_name = "ID")]
    pub family: Option<String>,
    /// JSON family spec: {"family": ..., "m": ..., "params": {...}}.
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Truncation size for --family (overrides the spec file).
    #[arg(long)]
    pub m: Option<usize>,
    /// Family parameter, repeatable (gamma, s, edge, n, dim, seed).
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Seed for random families (same as --param seed=N).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file, written atomically; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Mode {
    #[default]
    Greedy,
    Exact,
}

impl From<Mode> for ExtractMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Greedy => ExtractMode::Greedy,
            Mode::Exact => ExtractMode::Exact,
        }
    }
}

impl From<Mode> for ProfileMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Greedy => ProfileMode::Greedy,
            Mode::Exact => ProfileMode::Exact,
        }
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Relative tolerance of the extremality classification.
    #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
    pub tol: f64,
    /// Certificate tolerance of the enclosing-ball solver.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub solver_tol: f64,
    /// Active-set pivot budget of the solver.
    #[arg(long)]
    pub max_pivots: Option<usize>,
    /// ε values for the simplex witness (threshold √2 − ε at diameter √2).
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Vec<f64>,
    /// Simplex dimensions for the witness.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Simplex dimension (p + 1 vertices).
    #[arg(long)]
    pub p: usize,
    /// Absolute edge threshold in the input's units.
    #[arg(long, conflicts_with = "eps")]
    pub threshold: Option<f64>,
    /// Threshold √2 − ε after scaling the input to diameter √2 (default 0.01).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    /// Extra witness grid over ε.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Vec<f64>,
    /// Extra witness grid over p.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Part counts k.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k_grid: Vec<usize>,
    /// Truncation sizes for a family source (defaults to --m).
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    /// Rescale each set to Chebyshev radius 1 before profiling.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Write the check results as JSON.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the extremality classification.
    #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
    pub tol: f64,
    /// Annulus widths for the radius-preservation checks, as fractions of r.
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.5, 0.2, 0.05, 0.01])]
    pub annulus_grid: Vec<f64>,
    /// Largest k for the covering/partition sandwich checks.
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("parameter {k}: {v:?} is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses the arguments, runs the command and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::PARSE
            } else {
                exit::OK
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match run(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    // Fails only if a pool already exists, in which case it is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Profile(a) => cmd_profile(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

// ---------------------------------------------------------------------------
// Point-cloud CSV

/// Formats `x` as a plain decimal with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 && x.is_sign_negative() {
            "-0".into()
        } else if x == 0.0 {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i64 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    if point <= 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!(
            "{sign}{digits}{}",
            "0".repeat(point as usize - digits.len())
        )
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{sign}{int}.{frac}")
    }
}

/// Parses a point cloud: comma-separated decimal coordinates, one point per
/// row, an optional `dim=<d>` first row; `#` comments and blank lines are skipped.
pub fn parse_point_cloud(text: &str) -> crate::Result<PointSet> {
    let mut declared: Option<usize> = None;
    let mut dim: Option<(usize, usize)> = None;
    let mut coords = Vec::new();
    let mut last_line = 0;
    let mut seen_row = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last_line = line;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let first = !seen_row;
        seen_row = true;
        if first {
            if let Some(d) = body.strip_prefix("dim=") {
                let d: usize =
                    d.trim()
                        .parse()
                        .ok()
                        .filter(|&d| d > 0)
                        .ok_or_else(|| Error::Parse {
                            line,
                            message: format!("bad dimension header {body:?}"),
                        })?;
                declared = Some(d);
                continue;
            }
        }
        let rec: Vec<&str> = body.split(',').map(str::trim).collect();
        let width = rec.len();
        match (declared, dim) {
            (_, Some((d, first))) if d != width => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "expected {d} coordinates (as on line {first}), found {width}"
                    ),
                })
            }
            (Some(d), None) if d != width => {
                return Err(Error::Parse {
                    line,
                    message: format!("header declares dim={d}, found {width} coordinates"),
                })
            }
            (_, None) => dim = Some((width, line)),
            _ => {}
        }
        for (col, &field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {}: {field:?} is not a number", col + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column {}: coordinate must be finite", col + 1),
                });
            }
            coords.push(v);
        }
    }
    match dim {
        Some((d, _)) => PointSet::from_flat(coords, d),
        None => Err(Error::Parse {
            line: last_line,
            message: "no points".into(),
        }),
    }
}

/// Serializes points as CSV with a `dim=<d>` header and 17-digit coordinates.
pub fn write_point_cloud(points: &PointSet) -> String {
    let mut out = format!("dim={}\n", points.dim());
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|&x| format_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `content` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let wrap = |source: std::io::Error| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(content.as_bytes()).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

// ---------------------------------------------------------------------------
// Sources

enum Source {
    File(PathBuf),
    Family(FamilySpec),
}

impl Source {
    fn describe(&self) -> Value {
        match self {
            Source::File(p) => json!({ "input": p.display().to_string() }),
            Source::Family(s) => json!({ "family": s }),
        }
    }

    fn label(&self) -> String {
        match self {
            Source::File(_) => "input".into(),
            Source::Family(s) => s.family.to_string(),
        }
    }
}

impl SourceArgs {
    fn family_spec(&self, need_m: bool) -> CliResult<Option<FamilySpec>> {
        let mut spec =
            match (&self.family, &self.spec) {
                (Some(id), None) => {
                    let family: FamilyId = id.parse()?;
                    FamilySpec::new(family, 0)
                }
                (None, Some(path)) => serde_json::from_str::<FamilySpec>(&read_text(path)?)
                    .map_err(|e| CliError::Input {
                        path: path.clone(),
                        source: Error::Parse {
                            line: e.line(),
                            message: e.to_string(),
                        },
                    })?,
                (None, None) => return Ok(None),
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "give either --family or --spec, not both".into(),
                    ))
                }
            };
        if let Some(m) = self.m {
            spec.m = m;
        }
        for (k, v) in &self.params {
            spec.params.insert(k.clone(), *v);
        }
        if let Some(seed) = self.seed {
            spec.params.insert("seed".into(), seed as f64);
        }
        if need_m && spec.m == 0 {
            return Err(CliError::Usage(format!("family {} needs --m", spec.family)));
        }
        Ok(Some(spec))
    }

    fn resolve_source(&self, need_m: bool) -> CliResult<Source> {
        let file = self.input.as_ref();
        let fam = self.family.is_some() || self.spec.is_some();
        match (file, fam) {
            (Some(_), true) => Err(CliError::Usage(
                "give exactly one input source: --input, --family or --spec".into(),
            )),
            (None, false) => Err(CliError::Usage(
                "an input source is required: --input, --family or --spec".into(),
            )),
            (Some(p), false) => Ok(Source::File(p.clone())),
            (None, true) => Ok(Source::Family(
                self.family_spec(need_m)?.expect("family source present"),
            )),
        }
    }

    fn load(&self) -> CliResult<(Source, PointSet)> {
        let source = self.resolve_source(true)?;
        let points = match &source {
            Source::File(p) => {
                parse_point_cloud(&read_text(p)?).map_err(|source| CliError::Input {
                    path: p.clone(),
                    source,
                })?
            }
            Source::Family(spec) => spec.build()?,
        };
        Ok((source, points))
    }
}

fn residuals_json(points: &PointSet, cheb: &ChebyshevResult) -> CliResult<Value> {
    let r = certificate_residuals(points, cheb)?;
    Ok(json!({
        "weight_sum": r.weight_sum,
        "hull": r.hull,
        "sphere": r.sphere,
        "enclosure": r.enclosure,
        "malformed": r.malformed,
        "support_identity": support_identity_residual(points, cheb),
    }))
}

fn witness(
    points: &PointSet,
    eps_grid: &[f64],
    p_grid: &[usize],
    mode: Mode,
) -> CliResult<Option<WitnessReport>> {
    match (eps_grid.is_empty(), p_grid.is_empty()) {
        (true, true) => Ok(None),
        (false, false) => Ok(Some(extremality_witness(
            points,
            eps_grid,
            p_grid,
            mode.into(),
        )?)),
        _ => Err(CliError::Usage(
            "--eps-grid and --p-grid must be given together".into(),
        )),
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(k);
        out.push(',');
        out.push_str(v);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Commands

fn analyze_points(
    points: &PointSet,
    opts: &SolverOptions,
    tol: f64,
) -> CliResult<(ExtremalityReport, ChebyshevResult)> {
    let distinct = points.distinct_count();
    if distinct < 2 {
        return Err(Error::Domain("extremality needs at least two distinct points".into()).into());
    }
    let cheb = min_enclosing_ball_with(points, opts)?;
    let report = report_from(diameter(points), &cheb, points.dim(), distinct, tol)?;
    Ok((report, cheb))
}

fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<()> {
    let (source, points) = a.source.load()?;
    let opts = SolverOptions {
        max_pivots: a.max_pivots,
        ..SolverOptions::with_tol(a.solver_tol)
    };
    let (mut report, cheb) = analyze_points(&points, &opts, a.tol)?;
    let wit = witness(&points, &a.eps_grid, &a.p_grid, a.mode)?;
    report.witness_lower_bound = wit.as_ref().and_then(|w| w.witness_lower_bound);

    eprintln!(
        "{} points in R^{}: diameter {}, radius {}, ratio {} ({}; Jung bound {} in dimension {})",
        points.len(),
        points.dim(),
        report.diameter,
        report.radius,
        report.ratio,
        report.classification.as_str(),
        report.finite_dim_bound,
        report.affine_dim,
    );

    let content = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let support: Vec<Value> = cheb
                .support
                .iter()
                .map(|&(i, w)| json!({ "index": i, "weight": w }))
                .collect();
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "analyze",
                "source": source.describe(),
                "m": points.len(),
                "dim": points.dim(),
                "report": report,
                "center": cheb.center,
                "support": support,
                "certificate_residuals": residuals_json(&points, &cheb)?,
            });
            if let Some(w) = wit {
                v["witness"] = serde_json::to_value(w).expect("serializable");
            }
            to_pretty(&v)
        }
        Format::Csv => key_value_csv(&[
            ("schema_version", SCHEMA_VERSION.to_string()),
            ("m", points.len().to_string()),
            ("dim", points.dim().to_string()),
            ("diameter", format_f64(report.diameter)),
            ("radius", format_f64(report.radius)),
            ("ratio", format_f64(report.ratio)),
            ("affine_dim", report.affine_dim.to_string()),
            ("finite_dim_bound", format_f64(report.finite_dim_bound)),
            ("hilbert_bound", format_f64(report.hilbert_bound)),
            ("classification", report.classification.as_str().into()),
            ("near_hilbert_bound", report.near_hilbert_bound.to_string()),
            (
                "witness_lower_bound",
                report
                    .witness_lower_bound
                    .map(format_f64)
                    .unwrap_or_default(),
            ),
            ("certificate_residual", format_f64(cheb.residual)),
        ]),
    };
    emit(a.output.out.as_deref(), &content)
}

fn cmd_extract(a: &ExtractArgs) -> CliResult<()> {
    let (source, points) = a.source.load()?;
    let m = points.len();
    if a.p == 0 || a.p >= m {
        return Err(Error::Domain(format!(
            "p must lie in 1..={}, got {}",
            m.saturating_sub(1),
            a.p
        ))
        .into());
    }
    let (threshold, scale, outcome, mut lower) = match a.threshold {
        Some(t) => {
            let outcome = match a.mode {
                Mode::Greedy => extract_greedy(&points, t, a.p)?,
                Mode::Exact => extract_exact(&points, t, a.p)?,
            };
            (t, 1.0, outcome, None)
        }
        None => {
            let eps = a.eps.unwrap_or(0.01);
            let w = extremality_witness(&points, &[eps], &[a.p], a.mode.into())?;
            let cell = w.cells.into_iter().next().expect("one witness cell");
            (cell.threshold, w.scale, cell.outcome, cell.bound)
        }
    };
    let wit = witness(&points, &a.eps_grid, &a.p_grid, a.mode)?;
    if let Some(b) = wit.as_ref().and_then(|w| w.witness_lower_bound) {
        lower = Some(lower.map_or(b, |x: f64| x.max(b)));
    }

    match &outcome {
        ExtractionOutcome::Found(c) => eprintln!(
            "{}-simplex found at threshold {}: vertices {:?}, min edge {}",
            a.p, threshold, c.vertex_indices, c.min_edge
        ),
        ExtractionOutcome::NotFound { mode, best_size } => eprintln!(
            "no {}-simplex at threshold {} ({}; largest set found has {} points)",
            a.p,
            threshold,
            match mode {
                crate::simplex::FailureMode::GreedyExhausted => "greedy exhausted",
                crate::simplex::FailureMode::ProvenNonexistent => "proven nonexistent",
            },
            best_size
        ),
    }

    let content = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "extract",
                "source": source.describe(),
                "m": m,
                "p": a.p,
                "mode": match a.mode { Mode::Greedy => "greedy", Mode::Exact => "exact" },
                "threshold": threshold,
                "scale": scale,
                "outcome": outcome,
                "witness_lower_bound": lower,
            });
            if let Some(w) = wit {
                v["witness"] = serde_json::to_value(w).expect("serializable");
            }
            to_pretty(&v)
        }
        Format::Csv => {
            let (status, vertices, min_edge, best) = match &outcome {
                ExtractionOutcome::Found(c) => (
                    "found".to_string(),
                    c.vertex_indices
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    format_f64(c.min_edge),
                    String::new(),
                ),
                ExtractionOutcome::NotFound { mode, best_size } => (
                    serde_json::to_value(mode)
                        .expect("serializable")
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    String::new(),
                    String::new(),
                    best_size.to_string(),
                ),
            };
            key_value_csv(&[
                ("schema_version", SCHEMA_VERSION.to_string()),
                ("p", a.p.to_string()),
                ("threshold", format_f64(threshold)),
                ("scale", format_f64(scale)),
                ("status", status),
                ("vertices", vertices),
                ("min_edge", min_edge),
                ("best_size", best),
                (
                    "witness_lower_bound",
                    lower.map(format_f64).unwrap_or_default(),
                ),
            ])
        }
    };
    emit(a.output.out.as_deref(), &content)
}

fn cmd_profile(a: &ProfileArgs) -> CliResult<()> {
    if a.k_grid.is_empty() || a.k_grid.contains(&0) {
        return Err(Error::Domain("--k-grid needs positive entries".into()).into());
    }
    let opts = ProfileOptions {
        mode: a.mode.into(),
        unit_radius: a.normalize,
        ..Default::default()
    };
    let source = a.source.resolve_source(a.m_grid.is_empty())?;
    let rows: Vec<ProfileRow> = match &source {
        Source::Family(spec) => {
            let m_grid = if a.m_grid.is_empty() {
                vec![spec.m]
            } else {
                a.m_grid.clone()
            };
            if m_grid.contains(&0) {
                return Err(Error::Domain("--m-grid needs positive entries".into()).into());
            }
            mnc_profile(spec, &m_grid, &a.k_grid, &opts)?.2
        }
        Source::File(path) => {
            if !a.m_grid.is_empty() {
                return Err(CliError::Usage(
                    "--m-grid applies to family sources only".into(),
                ));
            }
            let mut points =
                parse_point_cloud(&read_text(path)?).map_err(|source| CliError::Input {
                    path: path.clone(),
                    source,
                })?;
            if a.normalize && points.distinct_count() > 1 {
                let r = min_enclosing_ball(&points, DEFAULT_TOL)?.radius;
                points = points.scaled(1.0 / r)?;
            }
            let (c, p) = profiles(&points, &a.k_grid, &opts)?;
            c.entries
                .iter()
                .zip(&p.entries)
                .map(|(ce, pe)| ProfileRow {
                    family: source.label(),
                    m: c.m,
                    k: ce.k,
                    mode: if ce.mode == pe.mode {
                        ce.mode
                    } else {
                        ProfileMode::Greedy
                    },
                    rho: ce.rho,
                    delta: pe.delta,
                })
                .collect()
        }
    };
    if opts.mode == ProfileMode::Exact {
        for r in rows.iter().filter(|r| r.mode == ProfileMode::Greedy) {
            eprintln!(
                "note: m={} k={} exceeds the exact-mode caps; greedy value reported",
                r.m, r.k
            );
        }
    }

    let content = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("family,m,k,mode,rho,delta\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.family,
                    r.m,
                    r.k,
                    r.mode.as_str(),
                    format_f64(r.rho),
                    format_f64(r.delta)
                ));
            }
            out
        }
        Format::Json => to_pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "profile",
            "source": source.describe(),
            "normalized": a.normalize,
            "rows": rows,
        })),
    };
    emit(a.output.out.as_deref(), &content)
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    if a.source.input.is_some() {
        return Err(CliError::Usage(
            "generate takes --family or --spec, not --input".into(),
        ));
    }
    let (_, points) = a.source.load()?;
    emit(a.out.as_deref(), &write_point_cloud(&points))
}

/// One line of the verify output.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, residual: f64) -> Self {
        Check {
            name: name.into(),
            passed,
            residual,
        }
    }
}

fn report_checks(report: &ExtremalityReport, tol: f64) -> Vec<Check> {
    let violations = report.violations(tol);
    ExtremalityReport::INVARIANTS
        .iter()
        .map(|&name| match violations.iter().find(|(n, _)| *n == name) {
            Some(&(_, r)) => Check::new(name, false, r),
            None => Check::new(name, true, 0.0),
        })
        .collect()
}

/// The invariant suite for a point set.
pub fn point_checks(
    points: &PointSet,
    tol: f64,
    annulus_grid: &[f64],
    k_max: usize,
) -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let distinct = points.distinct_count();
    if distinct < 2 {
        return Err(Error::Domain(
            "verification needs at least two distinct points".into(),
        ));
    }
    let cheb = min_enclosing_ball(points, DEFAULT_TOL)?;
    let r = cheb.radius;
    let res = certificate_residuals(points, &cheb)?;
    checks.push(Check::new(
        "certificate",
        verify_certificate(points, &cheb, DEFAULT_TOL),
        res.max().max(res.weight_sum),
    ));
    let sid = support_identity_residual(points, &cheb) / (r * r);
    checks.push(Check::new("support-identity", sid <= 1e-6, sid));

    let report = report_from(diameter(points), &cheb, points.dim(), distinct, tol)?;
    checks.extend(report_checks(&report, tol));

    for &f in annulus_grid {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Domain(format!(
                "annulus grid entries must lie in (0, 1), got {f}"
            )));
        }
        let reduced = annulus_reduction(points, &cheb, f * r)?;
        let sub = min_enclosing_ball(&reduced, DEFAULT_TOL)?;
        let dr = (sub.radius - r).abs();
        let dc = distance(&sub.center, &cheb.center);
        let scale = r.max(1.0);
        checks.push(Check::new(
            format!("annulus-radius[{f}]"),
            dr <= 1e-7 * scale,
            dr,
        ));
        checks.push(Check::new(
            format!("annulus-center[{f}]"),
            dc <= 1e-6 * scale,
            dc,
        ));
    }

    let p = (points.len() - 1).min(3);
    let outcome = extract_greedy(points, 0.5 * report.diameter, p)?;
    let sound = outcome
        .certificate()
        .is_none_or(|c| verify_simplex(points, c));
    checks.push(Check::new(
        "simplex-certificate",
        sound,
        if sound { 0.0 } else { 1.0 },
    ));

    let k_grid: Vec<usize> = (1..=k_max.min(points.len())).collect();
    if !k_grid.is_empty() {
        let (cover, part) = profiles(points, &k_grid, &ProfileOptions::default())?;
        let q = points.dim().min(points.len() - 1).max(1);
        let jung = jung_constant(q)?;
        let mut prev: Option<(f64, f64)> = None;
        for (c, d) in cover.entries.iter().zip(&part.entries) {
            let (rho, delta) = (c.rho, d.delta);
            let gap = (rho - delta).max(delta - 2.0 * rho - 1e-9).max(0.0);
            checks.push(Check::new(format!("sandwich[k={}]", c.k), gap == 0.0, gap));
            let excess = (rho - jung * delta - 1e-9).max(0.0);
            checks.push(Check::new(
                format!("jung-per-part[k={}]", c.k),
                excess == 0.0,
                excess,
            ));
            if let Some((pr, pd)) = prev {
                let rise = (rho - pr).max(delta - pd).max(0.0);
                checks.push(Check::new(
                    format!("profile-monotone[k={}]", c.k),
                    rise <= 1e-9,
                    rise,
                ));
            }
            prev = Some((rho, delta));
        }
    }
    Ok(checks)
}

fn report_from_json(text: &str, path: &Path) -> CliResult<ExtremalityReport> {
    let bad = |line: usize, message: String| CliError::Input {
        path: path.to_path_buf(),
        source: Error::Parse { line, message },
    };
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.line(), e.to_string()))?;
    if let Some(s) = v.get("schema_version") {
        if s.as_u64() != Some(SCHEMA_VERSION as u64) {
            return Err(bad(0, format!("unsupported schema_version {s}")));
        }
    }
    let inner = v.get("report").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| bad(0, format!("not an analyze report: {e}")))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let source = a.source.resolve_source(true)?;
    let checks = match &source {
        Source::File(path) => {
            let text = read_text(path)?;
            if text.trim_start().starts_with('{') {
                report_checks(&report_from_json(&text, path)?, a.tol)
            } else {
                let points = parse_point_cloud(&text).map_err(|source| CliError::Input {
                    path: path.clone(),
                    source,
                })?;
                point_checks(&points, a.tol, &a.annulus_grid, a.k_max)?
            }
        }
        Source::Family(spec) => point_checks(&spec.build()?, a.tol, &a.annulus_grid, a.k_max)?,
    };
    for c in &checks {
        println!(
            "{} {} residual={:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if let Some(out) = &a.out {
        write_atomic(
            out,
            &to_pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "verify",
                "source": source.describe(),
                "checks": checks,
                "failed": failed,
            })),
        )?;
    }
    if failed > 0 {
        Err(CliError::Invariants { failed })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_decimal_round_trips() {
        for x in [
            1.0,
            -0.5,
            1.0 / 3.0,
            std::f64::consts::FRAC_1_SQRT_2,
            1e-300,
            -2.5e-8,
            6.02e23,
            f64::MAX,
            f64::MIN_POSITIVE,
            123456.789,
        ] {
            let s = format_f64(x);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(0.5), "0.50000000000000000");
        assert_eq!(format_f64(-12.0), "-12.000000000000000");
    }

    #[test]
    fn parses_point_clouds() {
        let p = parse_point_cloud("dim=2\n0, 0\n\n# note\n2,0\n").unwrap();
        assert_eq!(p.to_rows(), vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        let p = parse_point_cloud("1,2,3\n").unwrap();
        assert_eq!(p.dim(), 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("0,0\n1,x\n", 2),
            ("0,0\n1,2,3\n", 2),
            ("dim=3\n0,0\n", 2),
            ("dim=zero\n", 1),
            ("0,0\n\n\n1,inf\n", 4),
        ];
        for (text, line) in cases {
            match parse_point_cloud(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_point_cloud(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_point_cloud("dim=2\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn point_cloud_writer_round_trips() {
        let pts = crate::generators::random_sphere(7, 5, 3).unwrap();
        let back = parse_point_cloud(&write_point_cloud(&pts)).unwrap();
        assert_eq!(back.as_flat(), pts.as_flat());
    }

    #[test]
    fn exit_codes_follow_error_kinds() {
        let parse = CliError::Core(Error::Parse {
            line: 1,
            message: String::new(),
        });
        assert_eq!(parse.exit_code(), exit::PARSE);
        assert_eq!(
            CliError::Core(Error::Domain(String::new())).exit_code(),
            exit::DOMAIN
        );
        let nc = CliError::Core(Error::NonConvergence {
            iterations: 1,
            residual: 1.0,
            best_center: vec![],
            best_radius: 0.0,
        });
        assert_eq!(nc.exit_code(), exit::NON_CONVERGENCE);
        assert_eq!(
            CliError::Invariants { failed: 1 }.exit_code(),
            exit::INVARIANT
        );
    }

    #[test]
    fn orthonormal_passes_the_suite() {
        let pts = crate::generators::orthonormal_family(16).unwrap();
        let checks = point_checks(&pts, DEFAULT_CLASSIFY_TOL, &[0.5, 0.1], 3).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
