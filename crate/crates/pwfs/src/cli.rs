//! Command-line wiring: JSON run configs, the `solve`/`sweep`/`audit`/
//! `fsmap-check` subcommands, and reproducible output files.
//!
//! Precedence is flags over config fields over defaults. Every output file
//! embeds a `format_version` and the resolved config echo; outputs are
//! byte-identical for identical config and seed.
//!
//! Exit codes: `0` success, `1` invalid configuration or input, `2`
//! non-convergence, audit violations, or numerical failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    bound_audit_suite, fs_map_check, perturbation_suite, sweep, to_json_lines, write_csv,
    AuditRecord, BoundAudit, FsMapConfig, SweepAxis, SweepSpec,
};
use crate::eigensolver::{fixed_point_by_index, fixed_point_by_target, FixedPointResult, Strategy};
use crate::fs::FsParams;
use crate::planewave::{kappa, potential_from_json, regularity_norm, CutoffConvention, Problem};
use crate::{Error, Result};

/// Version stamp embedded in every output file.
pub const FORMAT_VERSION: u32 = 1;

/// Test hook: when this environment variable is non-empty, every audited
/// bound's right-hand side is multiplied by zero before the verdict — a
/// negative control proving violations actually flip the exit code.
pub const CORRUPT_ENV: &str = "PWFS_AUDIT_CORRUPT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// A single JSON document describing one run. Unknown fields are rejected
/// so typos surface as errors naming the field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    /// Potential: `{"file": path}`, a family `{"family": "Vt", "t": …}`,
    /// or an inline table `{"L": …, "coeffs": {…}}`.
    pub potential: serde_json::Value,
    /// Period; optional when the potential document already carries it.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub r: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub strategy: Strategy,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Reference (audit) cutoff.
    #[serde(rename = "N_e", default = "default_n_e")]
    pub n_e: u32,
    /// Weight exponent of the coarse-space error norm.
    #[serde(default)]
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub convention: CutoffConvention,
    /// Sweep axis (sweep only; `--axis` overrides).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    /// Sweep grid (sweep only; `--grid` overrides).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<u32>>,
    /// Worker threads for sweeps (`--jobs` overrides).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Randomized-audit trial count (audit and fsmap-check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}
fn default_alpha() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    crate::eigensolver::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    crate::eigensolver::DEFAULT_MAX_ITER
}
fn default_n_e() -> u32 {
    1000
}
fn default_seed() -> u64 {
    7
}

/// Load and parse a config file; parse failures name the offending field.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
    if config.format_version != FORMAT_VERSION {
        return Err(Error::Config(format!(
            "config {}: format_version {} is not supported (expected {FORMAT_VERSION})",
            path.display(),
            config.format_version
        )));
    }
    Ok(config)
}

/// A fully validated run: the problem, its parameters, and the `t` label
/// when the potential is from the `V_t` family (NaN otherwise).
#[derive(Debug)]
pub struct ResolvedRun {
    pub config: RunConfig,
    pub problem: Problem,
    pub params: FsParams,
    pub t_label: f64,
}

/// Resolve the potential document, reconcile the period, validate the
/// discretization parameters.
pub fn resolve(config: RunConfig, config_dir: Option<&Path>) -> Result<ResolvedRun> {
    let doc: serde_json::Value = match config.potential.get("file") {
        Some(file) => {
            let raw = file.as_str().ok_or_else(|| {
                Error::Config("potential field \"file\" must be a path string".into())
            })?;
            let mut path = PathBuf::from(raw);
            if path.is_relative() {
                if let Some(dir) = config_dir {
                    let joined = dir.join(&path);
                    if joined.exists() {
                        path = joined;
                    }
                }
            }
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Config(format!("cannot read potential file {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("potential file {}: {e}", path.display())))?
        }
        None => config.potential.clone(),
    };

    let mut obj = doc
        .as_object()
        .cloned()
        .ok_or_else(|| Error::Config("potential document must be a JSON object".into()))?;
    // Reconcile the period: the config-level "L" fills a missing document
    // "L" but must not silently contradict an explicit one.
    if let Some(l_cfg) = config.l {
        match obj.get("L").and_then(|v| v.as_f64()) {
            Some(l_doc) if l_doc != l_cfg => {
                return Err(Error::Config(format!(
                    "field \"L\" disagrees between config ({l_cfg}) and potential document ({l_doc})"
                )));
            }
            Some(_) => {}
            None => {
                obj.insert("L".into(), json!(l_cfg));
            }
        }
    }
    let t_label = match (obj.get("family"), obj.get("t")) {
        (Some(_), Some(t)) => t.as_f64().unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    let (l, potential) = potential_from_json(&serde_json::Value::Object(obj).to_string())?;

    let params = FsParams::new(config.m, config.n, config.k, config.r, config.alpha)?;
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(Error::Config(format!("field \"tol\" must be positive, got {}", config.tol)));
    }
    if config.max_iter == 0 {
        return Err(Error::Config("field \"max_iter\" must be at least 1".into()));
    }
    if config.n_e < config.n {
        return Err(Error::Config(format!(
            "field \"N_e\" = {} must be at least N = {}",
            config.n_e, config.n
        )));
    }
    if let Strategy::ByIndex(i) = config.strategy {
        if i < 1 {
            return Err(Error::Config("strategy \"by_index\" is 1-based; index 0 is invalid".into()));
        }
    }
    let problem = Problem::new(potential, l, config.convention)?;
    Ok(ResolvedRun { config, problem, params, t_label })
}

/// Parse `--grid`: either an inclusive range `a:b:step` or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "grid range must be \"a:b:step\", got {text:?}"
            )));
        }
        let nums: Vec<u32> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("grid component {p:?} is not an integer")))
            })
            .collect::<Result<_>>()?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if step == 0 {
            return Err(Error::Config("grid step must be nonzero".into()));
        }
        if b < a {
            return Err(Error::Config(format!("grid range {a}:{b} is descending")));
        }
        Ok((a..=b).step_by(step as usize).collect())
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("grid value {p:?} is not an integer")))
            })
            .collect()
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pwfs",
    version,
    about = "Planewave eigensolver for periodic 1D Schrödinger operators with a coarse-space Schur reduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one fixed-point solve and write the eigenpair as JSON.
    Solve(SolveArgs),
    /// Sweep K, N or M and write per-point error records as CSV.
    Sweep(SweepArgs),
    /// Run the full audit battery: inequality bounds on the configured
    /// problem plus randomized isospectrality and perturbation checks.
    Audit(AuditArgs),
    /// Verify reduction isospectrality on random Hermitian matrices.
    FsmapCheck(FsmapArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output path (overrides the config's "out").
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Swept parameter: K, N or M (overrides the config's "axis").
    #[arg(long)]
    pub axis: Option<String>,
    /// Grid: "a:b:step" (inclusive) or a comma list (overrides "grid").
    #[arg(long)]
    pub grid: Option<String>,
    /// Worker threads (overrides the config's "jobs").
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output CSV path (overrides the config's "out").
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// RNG seed for the randomized audits (overrides the config's "seed").
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path for the JSON-lines report (overrides "out").
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FsmapArgs {
    /// Optional run configuration (JSON) supplying seed/trials/out.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of random matrices.
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path for the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Write the machine-readable payload: to the given path, else to stdout.
/// Stdout stays pure data (summaries go to stderr) and a closed pipe — the
/// reader stopped early, e.g. `pwfs audit … | head` — is not an error.
fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    let content = content.strip_suffix('\n').unwrap_or(content);
    match out {
        Some(path) => {
            std::fs::write(path, format!("{content}\n"))?;
            Ok(())
        }
        None => {
            use std::io::Write;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match writeln!(lock, "{content}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    format_version: u32,
    config: &'a RunConfig,
    lambda_sigma: f64,
    converged: bool,
    scf_count: usize,
    iterates: &'a [f64],
    /// Coarse eigenvector coefficients as `[re, im]` pairs.
    phi_sigma: Vec<[f64; 2]>,
    /// Lifted (fine-space) coefficients as `[re, im]` pairs.
    lifted: Vec<[f64; 2]>,
}

fn run_solve(args: &SolveArgs) -> Result<i32> {
    let config = load_config(&args.config)?;
    let run = resolve(config, args.config.parent())?;
    let fp: FixedPointResult = match run.config.strategy {
        Strategy::ByIndex(i) => fixed_point_by_index(
            &run.problem,
            &run.params,
            i,
            None,
            run.config.tol,
            run.config.max_iter,
        )?,
        Strategy::ByTarget(t) => fixed_point_by_target(
            &run.problem,
            &run.params,
            t,
            None,
            run.config.tol,
            run.config.max_iter,
        )?,
    };
    let report = SolveReport {
        format_version: FORMAT_VERSION,
        config: &run.config,
        lambda_sigma: fp.lambda_sigma,
        converged: fp.converged,
        scf_count: fp.scf_count,
        iterates: &fp.iterates,
        phi_sigma: fp.phi_sigma.iter().map(|z| [z.re, z.im]).collect(),
        lifted: fp.lifted.fine.iter().map(|z| [z.re, z.im]).collect(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let out = args.out.as_deref().or(run.config.out.as_deref());
    write_output(out, &json)?;
    eprintln!(
        "solve: strategy {} on M = {}, N = {}, K = {}",
        fp.strategy, run.params.m, run.params.n, run.params.k
    );
    eprintln!("lambda_sigma = {:.16e}", fp.lambda_sigma);
    eprintln!("scf_count = {}", fp.scf_count);
    eprintln!("converged = {}", fp.converged);
    if let Some(path) = out {
        eprintln!("result written to {}", path.display());
    }
    Ok(if fp.converged { EXIT_OK } else { EXIT_FAILURE })
}

fn run_sweep(args: &SweepArgs) -> Result<i32> {
    let config = load_config(&args.config)?;
    let run = resolve(config, args.config.parent())?;
    let axis = match &args.axis {
        Some(s) => s.parse::<SweepAxis>()?,
        None => run
            .config
            .axis
            .ok_or_else(|| Error::Config("sweep requires --axis or config field \"axis\"".into()))?,
    };
    let grid = match &args.grid {
        Some(s) => parse_grid(s)?,
        None => run
            .config
            .grid
            .clone()
            .ok_or_else(|| Error::Config("sweep requires --grid or config field \"grid\"".into()))?,
    };
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let mut spec = SweepSpec::new(run.params, axis, grid, run.config.strategy, run.config.n_e);
    spec.tol = run.config.tol;
    spec.max_iter = run.config.max_iter;
    spec.s = run.config.s;
    spec.t_label = run.t_label;
    spec.jobs = args.jobs.or(run.config.jobs).unwrap_or(1);
    let records = sweep(&run.problem, &spec)?;

    let mut csv = Vec::new();
    write_csv(&records, &mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    let out = args.out.as_deref().or(run.config.out.as_deref());
    write_output(out, &csv)?;
    if let Some(path) = out {
        // The CSV schema has no room for headers beyond the column row, so
        // the config echo — plus the axis/grid actually run, which flags
        // may have overridden — lives in a sidecar next to the data.
        let meta = json!({
            "format_version": FORMAT_VERSION,
            "config": &run.config,
            "axis": spec.axis,
            "grid": spec.grid,
        });
        let meta_path = PathBuf::from(format!("{}.meta.json", path.display()));
        std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("meta serializes"))?;
        eprintln!("sweep: {} records written to {}", records.len(), path.display());
    }
    let converged = records.iter().filter(|r| r.converged).count();
    eprintln!("sweep: {}/{} points converged", converged, records.len());
    Ok(EXIT_OK)
}

fn corrupt_if_requested(records: &mut Vec<AuditRecord>) {
    let corrupt = std::env::var(CORRUPT_ENV).map(|v| !v.is_empty()).unwrap_or(false);
    if !corrupt {
        return;
    }
    eprintln!("audit: {CORRUPT_ENV} is set — corrupting every bound's rhs to 0 (negative control)");
    for rec in records.iter_mut() {
        if let AuditRecord::Bound(b) = rec {
            *b = BoundAudit::new(&b.name, b.lhs, b.rhs * 0.0, b.inputs.clone());
        }
    }
}

fn run_audit(args: &AuditArgs) -> Result<i32> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let run = resolve(config, args.config.parent())?;
    let seed = run.config.seed;

    // Inequality audits on the configured problem over a λ-grid inside the
    // coercivity domain (falling back below ρ_M/2 when κ_M ≤ 0, where the
    // contraction-dependent audits will be skipped with reasons).
    let norm = regularity_norm(
        run.problem.potential(),
        run.problem.period(),
        run.params.r,
        2 * run.config.n_e,
    )?;
    let coarse = run.problem.basis(run.params.m)?;
    let kappa_m = kappa(&coarse, run.params.r, norm);
    let hi = if kappa_m > 0.0 { 0.45 * kappa_m } else { 0.45 * coarse.rho() };
    let grid: Vec<f64> = (0..5).map(|i| hi * i as f64 / 4.0).collect();
    let mut records =
        bound_audit_suite(&run.problem, &run.params, &grid, run.config.n_e, Some(norm))?;

    // Randomized perturbation audits (derived seed keeps streams disjoint).
    records.extend(perturbation_suite(200, 20, seed.wrapping_add(1))?);

    // Randomized isospectrality check, folded in as one summary record.
    let fsmap_config =
        FsMapConfig { trials: run.config.trials.unwrap_or(100), seed, ..FsMapConfig::default() };
    let report = fs_map_check(&fsmap_config)?;
    let mut inputs = std::collections::BTreeMap::new();
    inputs.insert("trials".to_string(), json!(report.trials));
    inputs.insert("pairs_checked".to_string(), json!(report.pairs_checked));
    inputs.insert("pairs_skipped".to_string(), json!(report.pairs_skipped));
    inputs.insert("seed".to_string(), json!(seed));
    records.push(AuditRecord::Bound(BoundAudit::new(
        "fs_map_isospectrality",
        report.pairs_failed as f64,
        0.0,
        inputs,
    )));

    corrupt_if_requested(&mut records);
    let violations = records.iter().filter(|r| r.is_violation()).count();

    let meta = json!({ "format_version": FORMAT_VERSION, "config": &run.config, "seed": seed });
    let mut body = serde_json::to_string(&meta).expect("meta serializes");
    body.push('\n');
    body.push_str(&to_json_lines(&records));
    let out = args.out.as_deref().or(run.config.out.as_deref());
    write_output(out, &body)?;
    eprintln!("audit: {} records, {} violations (seed {seed})", records.len(), violations);
    Ok(if violations > 0 { EXIT_FAILURE } else { EXIT_OK })
}

fn run_fsmap(args: &FsmapArgs) -> Result<i32> {
    let config = match &args.config {
        Some(path) => Some(load_config(path)?),
        None => None,
    };
    let trials = args
        .trials
        .or(config.as_ref().and_then(|c| c.trials))
        .unwrap_or(100);
    let seed = args.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(default_seed());
    let fsmap_config = FsMapConfig { trials, seed, ..FsMapConfig::default() };
    let report = fs_map_check(&fsmap_config)?;
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "config": config,
        "report": report,
    });
    let out = args
        .out
        .as_deref()
        .or(config.as_ref().and_then(|c| c.out.as_deref()));
    write_output(out, &serde_json::to_string_pretty(&doc).expect("report serializes"))?;
    eprintln!(
        "fsmap-check: {} pairs checked, {} skipped, {} failed (pass rate {:.4})",
        report.pairs_checked, report.pairs_skipped, report.pairs_failed, report.pass_rate
    );
    Ok(if report.all_passed { EXIT_OK } else { EXIT_FAILURE })
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Audit(args) => run_audit(args),
        Command::FsmapCheck(args) => run_fsmap(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
