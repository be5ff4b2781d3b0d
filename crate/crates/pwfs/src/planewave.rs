//! Planewave basis indexing, Fourier-space potentials, index windows,
//! the weighted regularity norm `‖V‖_r`, and the invertibility margin `κ_M`.
//!
//! Conventions used throughout the crate:
//! - Mode `k` is the planewave `e^{2πikx/L}`; the periodic Laplacian acts
//!   diagonally with symbol `ω_k² = (2πk/L)²`.
//! - A basis with cutoff `M` spans modes `|k| ≤ M−1` (`StrictlyBelow`, the
//!   default: Laplacian eigenvalues strictly below `ρ_M = (2πM/L)²`) or
//!   `|k| ≤ M` (`UpTo`). Both conventions are supported because published
//!   small-`M` experiments are reproducible under either; the convention is
//!   recorded in all output metadata.
//! - Modes are ordered by `|k|` ascending, positive sign first:
//!   `0, +1, −1, +2, −2, …`. A coarse basis is therefore always a prefix of
//!   any finer basis with the same convention, which makes embeddings and
//!   restrictions simple slices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{linalg, Error, Result};

/// Tolerance for validating Hermitian symmetry of user-supplied coefficients.
const COEFF_SYMMETRY_TOL: f64 = 1e-12;

/// Whether a cutoff `M` keeps modes `|k| ≤ M−1` or `|k| ≤ M`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffConvention {
    /// Modes with Laplacian eigenvalue strictly below `ρ_M`: `|k| ≤ M−1`.
    #[default]
    StrictlyBelow,
    /// Modes up to and including `|k| = M`.
    UpTo,
}

impl CutoffConvention {
    /// Largest retained `|k|` for cutoff `m`.
    fn kmax(self, m: u32) -> i64 {
        match self {
            CutoffConvention::StrictlyBelow => i64::from(m) - 1,
            CutoffConvention::UpTo => i64::from(m),
        }
    }
}

/// The canonical mode ordering for `|k| ≤ kmax`: `0, +1, −1, +2, −2, …`.
fn ordered_modes(kmax: i64) -> Vec<i64> {
    let mut modes = Vec::with_capacity((2 * kmax + 1).max(0) as usize);
    modes.push(0);
    for k in 1..=kmax {
        modes.push(k);
        modes.push(-k);
    }
    modes
}

/// Anything that spans a finite set of planewave modes: a full basis or a
/// window between two cutoffs. Blocks of operators are indexed by these.
pub trait ModeSet {
    /// Period length `L`.
    fn period(&self) -> f64;
    /// Cutoff convention of the underlying bases.
    fn convention(&self) -> CutoffConvention;
    /// Modes in canonical order.
    fn modes(&self) -> &[i64];

    /// Number of modes.
    fn dim(&self) -> usize {
        self.modes().len()
    }

    /// Laplacian symbol `ω_k² = (2πk/L)²` of mode `k`.
    fn omega2(&self, k: i64) -> f64 {
        let w = std::f64::consts::TAU * (k as f64) / self.period();
        w * w
    }
}

/// The planewave basis of `L²_per([0,L))` below a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanewaveBasis {
    l: f64,
    cutoff: u32,
    convention: CutoffConvention,
    modes: Vec<i64>,
}

impl PlanewaveBasis {
    /// Build a basis. `L` must be positive and finite; under `StrictlyBelow`
    /// the cutoff must be ≥ 1 (otherwise the basis would be empty).
    pub fn new(l: f64, cutoff: u32, convention: CutoffConvention) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("period L must be positive and finite, got {l}")));
        }
        if convention == CutoffConvention::StrictlyBelow && cutoff < 1 {
            return Err(Error::Config(
                "cutoff must be ≥ 1 under the strictly-below convention".into(),
            ));
        }
        let modes = ordered_modes(convention.kmax(cutoff));
        Ok(Self { l, cutoff, convention, modes })
    }

    /// Cutoff index `M`.
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `ρ_M = (2πM/L)²`, the Laplacian scale of the cutoff (independent of
    /// the convention; under `StrictlyBelow` all retained eigenvalues are
    /// strictly below it).
    pub fn rho(&self) -> f64 {
        let w = std::f64::consts::TAU * f64::from(self.cutoff) / self.l;
        w * w
    }

    /// Largest retained `|k|`.
    pub fn kmax(&self) -> i64 {
        self.convention.kmax(self.cutoff)
    }

    /// Position of mode `k` in the canonical ordering, if retained.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        if k.abs() > self.kmax() {
            return None;
        }
        Some(if k == 0 {
            0
        } else if k > 0 {
            (2 * k - 1) as usize
        } else {
            (-2 * k) as usize
        })
    }
}

impl ModeSet for PlanewaveBasis {
    fn period(&self) -> f64 {
        self.l
    }
    fn convention(&self) -> CutoffConvention {
        self.convention
    }
    fn modes(&self) -> &[i64] {
        &self.modes
    }
}

/// Diagonal of `−Δ` in the basis ordering: entry for mode `k` is `(2πk/L)²`.
pub fn laplacian_diagonal<S: ModeSet + ?Sized>(basis: &S) -> Vec<f64> {
    basis.modes().iter().map(|&k| basis.omega2(k)).collect()
}

/// The window `X_N ⊖ X_M` between two nested bases (`Ran P_M^N`): modes kept
/// by the fine basis but not the coarse one.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexWindow {
    lo: PlanewaveBasis,
    hi: PlanewaveBasis,
    modes: Vec<i64>,
}

impl IndexWindow {
    /// Build `X_hi ⊖ X_lo`. Bases must share `L` and convention, and
    /// `hi.cutoff ≥ lo.cutoff`. The window may be empty (`hi = lo`).
    pub fn new(lo: PlanewaveBasis, hi: PlanewaveBasis) -> Result<Self> {
        if lo.l != hi.l {
            return Err(Error::Config(format!(
                "window bases disagree on period: {} vs {}",
                lo.l, hi.l
            )));
        }
        if lo.convention != hi.convention {
            return Err(Error::Config("window bases disagree on cutoff convention".into()));
        }
        if hi.cutoff < lo.cutoff {
            return Err(Error::Config(format!(
                "window requires hi cutoff ≥ lo cutoff, got {} < {}",
                hi.cutoff, lo.cutoff
            )));
        }
        let modes = ordered_modes(hi.kmax())
            .split_off(lo.dim());
        Ok(Self { lo, hi, modes })
    }

    /// Coarse-side basis (excluded modes).
    pub fn lo(&self) -> &PlanewaveBasis {
        &self.lo
    }

    /// Fine-side basis (including modes).
    pub fn hi(&self) -> &PlanewaveBasis {
        &self.hi
    }

    /// Smallest Laplacian eigenvalue among window modes; `None` if empty.
    pub fn min_laplacian(&self) -> Option<f64> {
        self.modes.first().map(|&k| self.omega2(k))
    }
}

impl ModeSet for IndexWindow {
    fn period(&self) -> f64 {
        self.lo.l
    }
    fn convention(&self) -> CutoffConvention {
        self.lo.convention
    }
    fn modes(&self) -> &[i64] {
        &self.modes
    }
}

/// A real periodic potential given by its Fourier coefficients
/// `V(x) = Σ_n V̂_n e^{2πinx/L}` with `V̂_{−n} = conj(V̂_n)`.
///
/// Coefficients beyond `max_stored_freq` are implicitly zero. Construction
/// enforces the Hermitian symmetry: a missing mirror coefficient is filled
/// in, an inconsistent one (beyond 1e−12 relative) is rejected, and `V̂_0`
/// must be real.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPotential {
    coeffs: BTreeMap<i64, Complex64>,
    max_stored_freq: i64,
}

impl FourierPotential {
    /// The zero potential.
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), max_stored_freq: 0 }
    }

    /// Build from `(frequency, coefficient)` pairs. Exact zeros are dropped.
    pub fn new<I: IntoIterator<Item = (i64, Complex64)>>(coeffs: I) -> Result<Self> {
        let mut given: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, c) in coeffs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Config(format!("coefficient V̂_{n} is not finite")));
            }
            if given.insert(n, c).is_some() {
                return Err(Error::Config(format!("coefficient V̂_{n} given twice")));
            }
        }
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&n, &c) in &given {
            if n == 0 {
                let scale = c.re.abs().max(1.0);
                if c.im.abs() > COEFF_SYMMETRY_TOL * scale {
                    return Err(Error::Config(format!(
                        "V̂_0 must be real for a real potential, got imaginary part {}",
                        c.im
                    )));
                }
                if c.re != 0.0 {
                    out.insert(0, Complex64::new(c.re, 0.0));
                }
                continue;
            }
            match given.get(&-n) {
                Some(&mirror) => {
                    let err = (mirror - c.conj()).norm();
                    let scale = c.norm().max(1.0);
                    if err > COEFF_SYMMETRY_TOL * scale {
                        return Err(Error::Config(format!(
                            "coefficients V̂_{n} and V̂_{} violate Hermitian symmetry \
                             (|V̂_{} − conj(V̂_{n})| = {err:e})",
                            -n, -n
                        )));
                    }
                    if c != Complex64::new(0.0, 0.0) {
                        out.insert(n, c);
                    }
                }
                None => {
                    if c != Complex64::new(0.0, 0.0) {
                        out.insert(n, c);
                        out.insert(-n, c.conj());
                    }
                }
            }
        }
        let max_stored_freq = out.keys().map(|n| n.abs()).max().unwrap_or(0);
        Ok(Self { coeffs: out, max_stored_freq })
    }

    /// The `V_t` family used by the convergence experiments:
    /// `V̂_0 = −10`, `V̂_n = −5/|n|^t` for `0 < |n| ≤ max_freq`.
    ///
    /// `t` controls the smoothness: `t = 1` is a (log-singular) rough
    /// potential; `t = 0` is rougher still (non-decaying coefficients up to
    /// the stored truncation).
    pub fn vt(t: f64, max_freq: i64) -> Self {
        Self::vt_with_amplitudes(t, -10.0, -5.0, max_freq)
    }

    /// `V_t` family with configurable amplitude pair `(a0, an)`:
    /// `V̂_0 = a0`, `V̂_n = an/|n|^t`.
    pub fn vt_with_amplitudes(t: f64, a0: f64, an: f64, max_freq: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if a0 != 0.0 {
            coeffs.insert(0, Complex64::new(a0, 0.0));
        }
        for n in 1..=max_freq.max(0) {
            let c = an / (n as f64).powf(t);
            if c != 0.0 {
                coeffs.insert(n, Complex64::new(c, 0.0));
                coeffs.insert(-n, Complex64::new(c, 0.0));
            }
        }
        let max_stored_freq = coeffs.keys().map(|n| n.abs()).max().unwrap_or(0);
        Self { coeffs, max_stored_freq }
    }

    /// Coefficient `V̂_n` (zero beyond the stored range).
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest stored `|n|`.
    pub fn max_stored_freq(&self) -> i64 {
        self.max_stored_freq
    }

    /// Stored coefficients (canonically ordered by frequency).
    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    /// `true` when all coefficients are real (even potential); Hamiltonian
    /// blocks are then real symmetric and take the fast LAPACK path.
    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(|c| c.im == 0.0)
    }

    /// Scale the potential by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let coeffs: BTreeMap<i64, Complex64> =
            self.coeffs.iter().map(|(&n, &c)| (n, c * alpha)).filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect();
        let max_stored_freq = coeffs.keys().map(|n| n.abs()).max().unwrap_or(0);
        Self { coeffs, max_stored_freq }
    }

    /// Contiguous coefficient lookup table for `|d| ≤ dmax` (index `d + dmax`).
    /// Used by block assembly to avoid per-entry map lookups.
    fn lookup_table(&self, dmax: i64) -> Vec<Complex64> {
        (-dmax..=dmax).map(|d| self.coeff(d)).collect()
    }
}

/// Matrix of the multiplication operator `V` between two mode sets:
/// entry `(k, k') = V̂_{k−k'}`. Realizes every `P_A V P_B` block. Hermitian
/// whenever `rows` and `cols` span the same modes.
pub fn potential_block<R, C>(v: &FourierPotential, rows: &R, cols: &C) -> Result<DMatrix<Complex64>>
where
    R: ModeSet + ?Sized,
    C: ModeSet + ?Sized,
{
    if rows.period() != cols.period() {
        return Err(Error::Config(format!(
            "potential block operands disagree on period: {} vs {}",
            rows.period(),
            cols.period()
        )));
    }
    if rows.convention() != cols.convention() {
        return Err(Error::Config(
            "potential block operands disagree on cutoff convention".into(),
        ));
    }
    let rmodes = rows.modes();
    let cmodes = cols.modes();
    let rmax = rmodes.iter().map(|k| k.abs()).max().unwrap_or(0);
    let cmax = cmodes.iter().map(|k| k.abs()).max().unwrap_or(0);
    let dmax = rmax + cmax;
    let table = v.lookup_table(dmax);
    let mut out = DMatrix::zeros(rmodes.len(), cmodes.len());
    for (j, &kc) in cmodes.iter().enumerate() {
        for (i, &kr) in rmodes.iter().enumerate() {
            out[(i, j)] = table[(kr - kc + dmax) as usize];
        }
    }
    Ok(out)
}

/// The regularity norm `‖V‖_r = ‖(−Δ+1)^{(r−1)/2} V (−Δ+1)^{(r−1)/2}‖`,
/// evaluated as the spectral norm of the weighted coefficient matrix
/// `A_{k,k'} = (1+ω_k²)^{(r−1)/2} V̂_{k−k'} (1+ω_{k'}²)^{(r−1)/2}`
/// truncated at `|k|, |k'| ≤ audit_cutoff`.
///
/// The truncation is monotone nondecreasing in `audit_cutoff`, so the value
/// is a certified lower bound on the operator norm; see
/// [`regularity_norm_report`] for the doubling-based convergence check.
/// Rejects `r < 0`.
pub fn regularity_norm(v: &FourierPotential, l: f64, r: f64, audit_cutoff: u32) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Config(format!("regularity index r must be ≥ 0, got {r}")));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Config(format!("period L must be positive and finite, got {l}")));
    }
    let c = i64::from(audit_cutoff);
    let n = (2 * c + 1) as usize;
    let table = v.lookup_table(2 * c);
    let e = (r - 1.0) / 2.0;
    let weights: Vec<f64> = (-c..=c)
        .map(|k| {
            let w = std::f64::consts::TAU * (k as f64) / l;
            (1.0 + w * w).powf(e)
        })
        .collect();
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let d = (i as i64 - c) - (j as i64 - c);
            a[(i, j)] = table[(d + 2 * c) as usize] * (weights[i] * weights[j]);
        }
    }
    linalg::spectral_norm_hermitian(&a)
}

/// Result of the cutoff-doubling convergence check for `‖V‖_r`.
#[derive(Debug, Clone, Copy)]
pub struct RegularityNormReport {
    /// Norm truncated at `audit_cutoff`.
    pub value: f64,
    /// Norm truncated at `2·audit_cutoff`.
    pub value_doubled: f64,
    /// Relative change between the two truncations.
    pub relative_change: f64,
    /// Whether the doubling changed the value by less than `1e−3` relative.
    /// Potentials whose `‖V‖_r` genuinely diverges (e.g. the log-singular
    /// `V_t` family at `t = 1`, `r = 1`) report `false`; that is data, not
    /// an error.
    pub converged: bool,
}

/// Evaluate `‖V‖_r` at `audit_cutoff` and at double the cutoff, reporting
/// whether the truncation has converged (relative change `< 1e−3`).
pub fn regularity_norm_report(
    v: &FourierPotential,
    l: f64,
    r: f64,
    audit_cutoff: u32,
) -> Result<RegularityNormReport> {
    let value = regularity_norm(v, l, r, audit_cutoff)?;
    let value_doubled = regularity_norm(v, l, r, 2 * audit_cutoff)?;
    let relative_change = if value_doubled == 0.0 {
        0.0
    } else {
        (value_doubled - value).abs() / value_doubled
    };
    Ok(RegularityNormReport {
        value,
        value_doubled,
        relative_change,
        converged: relative_change < 1e-3,
    })
}

/// `κ_M = ρ_M − (ρ_M + 1) ρ_M^{−r} ‖V‖_r`: the guaranteed lower bound on the
/// Laplacian-plus-potential restricted to the complement of `X_M`. Positive
/// κ_M certifies invertibility of the windowed resolvent for `λ < κ_M`.
/// `norm_v_r` must come from [`regularity_norm`] (or be exact).
pub fn kappa(basis: &PlanewaveBasis, r: f64, norm_v_r: f64) -> f64 {
    let rho = basis.rho();
    rho - (rho + 1.0) * rho.powf(-r) * norm_v_r
}

/// A periodic Schrödinger problem `−Δ + V` on `[0, L)` together with the
/// discretization convention. Bundles what every assembly routine needs.
#[derive(Debug, Clone)]
pub struct Problem {
    potential: FourierPotential,
    l: f64,
    convention: CutoffConvention,
}

impl Problem {
    pub fn new(potential: FourierPotential, l: f64, convention: CutoffConvention) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("period L must be positive and finite, got {l}")));
        }
        Ok(Self { potential, l, convention })
    }

    pub fn potential(&self) -> &FourierPotential {
        &self.potential
    }

    pub fn period(&self) -> f64 {
        self.l
    }

    pub fn convention(&self) -> CutoffConvention {
        self.convention
    }

    /// Basis at the given cutoff under this problem's convention.
    pub fn basis(&self, cutoff: u32) -> Result<PlanewaveBasis> {
        PlanewaveBasis::new(self.l, cutoff, self.convention)
    }

    /// Window `X_hi ⊖ X_lo`.
    pub fn window(&self, lo: u32, hi: u32) -> Result<IndexWindow> {
        IndexWindow::new(self.basis(lo)?, self.basis(hi)?)
    }

    /// Galerkin matrix of `−Δ + V` on an arbitrary mode set.
    pub fn hamiltonian_on<S: ModeSet + ?Sized>(&self, s: &S) -> Result<DMatrix<Complex64>> {
        let mut h = potential_block(&self.potential, s, s)?;
        for (i, &k) in s.modes().iter().enumerate() {
            h[(i, i)] += s.omega2(k);
        }
        Ok(h)
    }
}

/// Parse a potential file: either an explicit coefficient table
/// `{"L": real, "coeffs": {"n": [re, im], …}}` or the built-in family
/// `{"family": "Vt", "t": real}` (optional fields: `"L"`, `"a0"`, `"an"`,
/// `"max_freq"`). Returns the period together with the potential; the
/// family defaults to `L = 1` and `max_freq = 8000`.
pub fn potential_from_json(doc: &str) -> Result<(f64, FourierPotential)> {
    let value: serde_json::Value = serde_json::from_str(doc)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Config("potential document must be a JSON object".into()))?;

    let get_f64 = |key: &str| -> Result<Option<f64>> {
        match obj.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("potential field \"{key}\" must be a number"))),
        }
    };

    if let Some(family) = obj.get("family") {
        let family = family
            .as_str()
            .ok_or_else(|| Error::Config("potential field \"family\" must be a string".into()))?;
        if family != "Vt" {
            return Err(Error::Config(format!("unknown potential family \"{family}\" (supported: \"Vt\")")));
        }
        let t = get_f64("t")?
            .ok_or_else(|| Error::Config("potential family \"Vt\" requires field \"t\"".into()))?;
        let l = get_f64("L")?.unwrap_or(1.0);
        let a0 = get_f64("a0")?.unwrap_or(-10.0);
        let an = get_f64("an")?.unwrap_or(-5.0);
        let max_freq = get_f64("max_freq")?.unwrap_or(8000.0) as i64;
        return Ok((l, FourierPotential::vt_with_amplitudes(t, a0, an, max_freq)));
    }

    let l = get_f64("L")?
        .ok_or_else(|| Error::Config("potential document requires field \"L\"".into()))?;
    let coeffs_val = obj
        .get("coeffs")
        .ok_or_else(|| Error::Config("potential document requires field \"coeffs\"".into()))?;
    let coeffs_obj = coeffs_val
        .as_object()
        .ok_or_else(|| Error::Config("potential field \"coeffs\" must be an object".into()))?;
    let mut pairs = Vec::with_capacity(coeffs_obj.len());
    for (key, val) in coeffs_obj {
        let n: i64 = key
            .parse()
            .map_err(|_| Error::Config(format!("coefficient key \"{key}\" is not an integer frequency")))?;
        let arr = val
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Config(format!("coefficient \"{key}\" must be a [re, im] pair")))?;
        let re = arr[0]
            .as_f64()
            .ok_or_else(|| Error::Config(format!("coefficient \"{key}\" real part must be a number")))?;
        let im = arr[1]
            .as_f64()
            .ok_or_else(|| Error::Config(format!("coefficient \"{key}\" imaginary part must be a number")))?;
        pairs.push((n, Complex64::new(re, im)));
    }
    Ok((l, FourierPotential::new(pairs)?))
}

/// Serialize a potential (with its period) to the explicit JSON format.
pub fn potential_to_json(l: f64, v: &FourierPotential) -> serde_json::Value {
    let coeffs: serde_json::Map<String, serde_json::Value> = v
        .coeffs()
        .iter()
        .map(|(n, c)| (n.to_string(), serde_json::json!([c.re, c.im])))
        .collect();
    serde_json::json!({ "L": l, "coeffs": coeffs })
}
