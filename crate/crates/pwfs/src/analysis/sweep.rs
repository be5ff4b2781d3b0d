//! Convergence sweeps over one discretization parameter, with CSV output.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::analysis::errors::{compute_errors, epsilon_bound, ErrorRecord};
use crate::eigensolver::{
    fixed_point_by_index, fixed_point_by_target, reference_solve, ReferencePair, Strategy,
};
use crate::fs::FsParams;
use crate::planewave::{regularity_norm, ModeSet, Problem};
use crate::{Error, Result};

/// Which member of `σ = (N, M, K)` a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    K,
    N,
    M,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" | "k" => Ok(SweepAxis::K),
            "N" | "n" => Ok(SweepAxis::N),
            "M" | "m" => Ok(SweepAxis::M),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}, expected K, N or M"))),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepAxis::K => write!(f, "K"),
            SweepAxis::N => write!(f, "N"),
            SweepAxis::M => write!(f, "M"),
        }
    }
}

/// Everything a sweep needs besides the problem itself.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Parameters held fixed (the swept one is overridden per point).
    pub base: FsParams,
    /// Swept parameter.
    pub axis: SweepAxis,
    /// Grid of values for the swept parameter, strictly ascending.
    pub grid: Vec<u32>,
    /// Eigenvalue selection strategy.
    pub strategy: Strategy,
    /// SCF tolerance.
    pub tol: f64,
    /// SCF sweep cap.
    pub max_iter: usize,
    /// Reference (audit) cutoff.
    pub n_e: u32,
    /// Weight exponent of the coarse-space error norm.
    pub s: f64,
    /// Potential-family label for the CSV `t` column (NaN when the
    /// potential is not from the family).
    pub t_label: f64,
    /// `‖V‖_r`, if already known; computed once at cutoff `2·n_e` otherwise.
    pub norm_v_r: Option<f64>,
    /// Worker threads (0 or 1 → sequential).
    pub jobs: usize,
}

impl SweepSpec {
    pub fn new(base: FsParams, axis: SweepAxis, grid: Vec<u32>, strategy: Strategy, n_e: u32) -> Self {
        SweepSpec {
            base,
            axis,
            grid,
            strategy,
            tol: crate::eigensolver::DEFAULT_TOL,
            max_iter: crate::eigensolver::DEFAULT_MAX_ITER,
            n_e,
            s: 0.0,
            t_label: f64::NAN,
            norm_v_r: None,
            jobs: 1,
        }
    }
}

fn params_at(spec: &SweepSpec, value: u32) -> Result<FsParams> {
    let b = spec.base;
    match spec.axis {
        SweepAxis::K => FsParams::new(b.m, b.n, value, b.r, b.alpha),
        SweepAxis::N => FsParams::new(b.m, value, b.k, b.r, b.alpha),
        SweepAxis::M => FsParams::new(value, b.n, b.k, b.r, b.alpha),
    }
}

fn solve_point(
    problem: &Problem,
    spec: &SweepSpec,
    refs: &[ReferencePair],
    norm_v_r: f64,
    value: u32,
) -> ErrorRecord {
    let fallback_i = match spec.strategy {
        Strategy::ByIndex(i) => i,
        Strategy::ByTarget(_) => 0,
    };
    let params = match params_at(spec, value) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("sweep: {} = {value}: {e}", spec.axis);
            let mut p = spec.base;
            match spec.axis {
                SweepAxis::K => p.k = value,
                SweepAxis::N => p.n = value,
                SweepAxis::M => p.m = value,
            }
            let mut rec = ErrorRecord::failed(p, spec.t_label, fallback_i, spec.strategy, f64::NAN);
            rec.epsilon_bound = epsilon_bound(&p, problem.period(), norm_v_r);
            return rec;
        }
    };
    let eps = epsilon_bound(&params, problem.period(), norm_v_r);
    let fp = match spec.strategy {
        Strategy::ByIndex(i) => {
            fixed_point_by_index(problem, &params, i, None, spec.tol, spec.max_iter)
        }
        Strategy::ByTarget(t) => {
            fixed_point_by_target(problem, &params, t, None, spec.tol, spec.max_iter)
        }
    };
    match fp.and_then(|fp| compute_errors(problem, &params, &fp, refs, spec.s, norm_v_r)) {
        Ok(mut rec) => {
            rec.t = spec.t_label;
            rec
        }
        Err(e) => {
            eprintln!("sweep: {} = {value}: {e}", spec.axis);
            ErrorRecord::failed(params, spec.t_label, fallback_i, spec.strategy, eps)
        }
    }
}

/// Run one sweep: a fixed-point solve and error record per grid point.
///
/// The reference eigenpairs and `‖V‖_r` are computed once and shared by all
/// points. Points run on `jobs` worker threads; the returned records are in
/// grid order regardless of scheduling. A failed point (invalid parameters,
/// domain exit, alignment failure) becomes a `converged = false` record
/// with NaN errors rather than aborting the sweep.
pub fn sweep(problem: &Problem, spec: &SweepSpec) -> Result<Vec<ErrorRecord>> {
    if spec.grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if !spec.grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config(format!(
            "sweep grid must be strictly ascending, got {:?}",
            spec.grid
        )));
    }

    let max_n = match spec.axis {
        SweepAxis::N => *spec.grid.last().expect("nonempty"),
        _ => spec.base.n,
    };
    if spec.n_e < 2 * max_n {
        eprintln!(
            "sweep: N_e = {} is below twice the largest fine cutoff N = {max_n}; \
             reference truncation may contaminate the smallest errors",
            spec.n_e
        );
    }

    let norm_v_r = match spec.norm_v_r {
        Some(v) => v,
        None => regularity_norm(problem.potential(), problem.period(), spec.base.r, 2 * spec.n_e)?,
    };
    let ref_count = match spec.strategy {
        Strategy::ByIndex(i) => (i + 5).max(12),
        Strategy::ByTarget(_) => 12,
    };
    let fine_dim = problem.basis(spec.n_e)?.dim();
    let refs = reference_solve(problem, spec.n_e, ref_count.min(fine_dim))?;

    let jobs = spec.jobs.max(1).min(spec.grid.len());
    let mut records: Vec<Option<ErrorRecord>> = vec![None; spec.grid.len()];
    if jobs == 1 {
        for (slot, &value) in records.iter_mut().zip(&spec.grid) {
            *slot = Some(solve_point(problem, spec, &refs, norm_v_r, value));
        }
    } else {
        let next = AtomicUsize::new(0);
        let out = Mutex::new(&mut records);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= spec.grid.len() {
                        break;
                    }
                    let rec = solve_point(problem, spec, &refs, norm_v_r, spec.grid[idx]);
                    out.lock().expect("collector lock")[idx] = Some(rec);
                });
            }
        });
    }
    Ok(records.into_iter().map(|r| r.expect("every grid point produced a record")).collect())
}

fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Write records as CSV with the fixed schema
/// `M,N,K,r,t,i,strategy,lambda_sigma,err_val,err_vec,scf_count,epsilon_bound,converged`.
/// Floats carry 17 significant digits with `.` as the decimal separator;
/// the `t` column is NaN for potentials outside the `V_t` family.
pub fn write_csv<W: Write>(records: &[ErrorRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "M,N,K,r,t,i,strategy,lambda_sigma,err_val,err_vec,scf_count,epsilon_bound,converged")?;
    for rec in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            rec.params.m,
            rec.params.n,
            rec.params.k,
            csv_float(rec.params.r),
            csv_float(rec.t),
            rec.i,
            rec.strategy,
            csv_float(rec.lambda_sigma),
            csv_float(rec.err_val),
            csv_float(rec.err_vec),
            rec.scf_count,
            csv_float(rec.epsilon_bound),
            rec.converged,
        )?;
    }
    Ok(())
}
