//! Log-log rate fitting for convergence experiments.

use crate::{Error, Result};

/// Result of a least-squares rate fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Decay rate: `err ≈ C·x^{−rate}` (positive for decaying data).
    pub rate: f64,
    /// Points that entered the fit.
    pub points_used: usize,
    /// Points dropped for being nonpositive or non-finite.
    pub points_excluded: usize,
}

/// Least-squares slope of `log err` against `log x`, sign-normalized so a
/// decaying error yields a positive rate.
///
/// Nonpositive or non-finite errors cannot be log-fitted; they are excluded
/// with a warning on stderr. Fewer than 3 valid points is an error.
pub fn fit_rate(xs: &[f64], errs: &[f64]) -> Result<RateFit> {
    if xs.len() != errs.len() {
        return Err(Error::Config(format!(
            "fit_rate needs equally many axis values and errors, got {} vs {}",
            xs.len(),
            errs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(errs)
        .filter(|&(&x, &e)| x > 0.0 && e > 0.0 && x.is_finite() && e.is_finite())
        .map(|(&x, &e)| (x.ln(), e.ln()))
        .collect();
    let points_excluded = xs.len() - pts.len();
    if points_excluded > 0 {
        eprintln!(
            "fit_rate: excluded {points_excluded} nonpositive or non-finite point(s) from the fit"
        );
    }
    if pts.len() < 3 {
        return Err(Error::InsufficientData { valid: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("fit_rate: all axis values coincide".into()));
    }
    Ok(RateFit { rate: -(sxy / sxx), points_used: pts.len(), points_excluded })
}

/// Restrict a fit to an index window.
pub fn fit_rate_window(xs: &[f64], errs: &[f64], window: std::ops::Range<usize>) -> Result<RateFit> {
    if window.end > xs.len() || window.end > errs.len() {
        return Err(Error::Config(format!(
            "fit window {window:?} exceeds data length {}",
            xs.len().min(errs.len())
        )));
    }
    fit_rate(&xs[window.clone()], &errs[window])
}

/// Drop the stagnation plateau before fitting: the floor is estimated as
/// the error at the largest axis value (grids are ascending), and points
/// within 3× of it are excluded. Returns the retained (x, err) pairs.
///
/// Convergence curves for this reduction are two-regime — decay in the
/// swept parameter until the other truncation dominates, then a flat
/// floor — and a straight-line fit across the knee corrupts the slope.
pub fn pre_knee(xs: &[f64], errs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let floor = errs.iter().rev().find(|e| e.is_finite() && **e > 0.0).copied();
    let keep: Vec<(f64, f64)> = match floor {
        Some(fl) => xs
            .iter()
            .zip(errs)
            .filter(|&(_, &e)| e.is_finite() && e > 3.0 * fl)
            .map(|(&x, &e)| (x, e))
            .collect(),
        None => Vec::new(),
    };
    keep.into_iter().unzip()
}
