//! Indicial roots of the cone Laplacian and bi-Laplacian, the admissible weight
//! window, the asymptotics space of the bi-Laplacian domain, and `δ₀`.
//!
//! Sign convention: the boundary Laplacian is negative semidefinite, so every
//! discriminant `((n−1)/2)² − λ` is nonnegative and all roots are real.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CrossSectionSpectrum;

/// Real parts closer than this are treated as equal.
pub const ROOT_TOL: f64 = 1e-12;

/// Fraction of the `δ₀` supremum used as the working value.
pub const DELTA0_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedIndex {
    pub s: f64,
    pub gamma: f64,
    pub p: f64,
}

impl WeightedIndex {
    pub fn new(s: f64, gamma: f64, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::NormRequest(format!("p = {p} must lie in (1, ∞)")));
        }
        if !(s >= 0.0) {
            return Err(Error::NormRequest(format!("s = {s} must be nonnegative")));
        }
        Ok(Self { s, gamma, p })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialRoot {
    pub value: f64,
    pub source_lambda: f64,
    pub branch: Branch,
    /// Member of the `(n−5)/2` family of the bi-Laplacian.
    pub shifted: bool,
    /// Zero discriminant: both branches coincide and the root is listed once.
    pub double: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTerm {
    pub rho: f64,
    /// Upper bound on the power of `log x` (exact powers are not resolved).
    pub max_log_power: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicialReport {
    pub q_delta: Vec<IndicialRoot>,
    pub q_delta2: Vec<IndicialRoot>,
    pub gamma_window: (f64, f64),
    pub terms: Vec<AsymptoticTerm>,
    pub delta0_sup: f64,
    pub delta0_chosen: f64,
    pub minimal_domain_clean: bool,
}

fn roots_for(n: u32, spec: &CrossSectionSpectrum, centre: f64, shifted: bool) -> Vec<IndicialRoot> {
    let half = (n as f64 - 1.0) / 2.0;
    let mut out = Vec::new();
    for &(lambda, _) in &spec.entries {
        let disc = (half * half - lambda).max(0.0).sqrt();
        if disc == 0.0 {
            out.push(IndicialRoot {
                value: centre,
                source_lambda: lambda,
                branch: Branch::Plus,
                shifted,
                double: true,
            });
        } else {
            for (branch, sign) in [(Branch::Plus, 1.0), (Branch::Minus, -1.0)] {
                out.push(IndicialRoot {
                    value: centre + sign * disc,
                    source_lambda: lambda,
                    branch,
                    shifted,
                    double: false,
                });
            }
        }
    }
    out
}

fn sort_roots(roots: &mut [IndicialRoot]) {
    roots.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.shifted.cmp(&b.shifted)));
}

/// `Q_Δ = ⋃_j {(n−1)/2 ± √(((n−1)/2)² − λ_j)}`, sorted by value.
pub fn q_delta(n: u32, spec: &CrossSectionSpectrum) -> Result<Vec<IndicialRoot>> {
    check_n(n)?;
    spec.validate()?;
    let mut roots = roots_for(n, spec, (n as f64 - 1.0) / 2.0, false);
    sort_roots(&mut roots);
    Ok(roots)
}

/// `Q_{Δ²} = Q_Δ ∪ ⋃_j {(n−5)/2 ± √(((n−1)/2)² − λ_j)}`.
pub fn q_delta_squared(n: u32, spec: &CrossSectionSpectrum) -> Result<Vec<IndicialRoot>> {
    check_n(n)?;
    spec.validate()?;
    let mut roots = roots_for(n, spec, (n as f64 - 1.0) / 2.0, false);
    roots.extend(roots_for(n, spec, (n as f64 - 5.0) / 2.0, true));
    sort_roots(&mut roots);
    Ok(roots)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Spectrum("cross-section dimension n must be at least 1".into()));
    }
    Ok(())
}

/// Admissible weights `((n−3)/2, min{−1 + √(((n−1)/2)² − λ₁), (n+1)/2})`.
///
/// An empty window comes back with `lo >= hi`; see [`window_is_empty`].
pub fn gamma_window(n: u32, lambda1: f64) -> Result<(f64, f64)> {
    if !(lambda1 < 0.0) {
        return Err(Error::NonNegativeLambda1(lambda1));
    }
    let nf = n as f64;
    let half = (nf - 1.0) / 2.0;
    let lo = (nf - 3.0) / 2.0;
    let hi = (-1.0 + (half * half - lambda1).sqrt()).min((nf + 1.0) / 2.0);
    Ok((lo, hi))
}

pub fn window_is_empty(window: (f64, f64)) -> bool {
    window.0 >= window.1
}

pub fn in_window(gamma: f64, window: (f64, f64)) -> bool {
    window.0 < gamma && gamma < window.1
}

/// True iff no root of `Q_Δ` lies on the line `Re z = (n−3)/2 − γ`.
pub fn minimal_domain_clean(n: u32, spec: &CrossSectionSpectrum, gamma: f64) -> Result<bool> {
    let line = (n as f64 - 3.0) / 2.0 - gamma;
    Ok(q_delta(n, spec)?.iter().all(|r| (r.value - line).abs() > ROOT_TOL))
}

/// Half-open strip `[(n−7)/2 − γ, (n−3)/2 − γ)` of asymptotic exponents.
pub fn asymptotic_strip(n: u32, gamma: f64) -> (f64, f64) {
    let nf = n as f64;
    ((nf - 7.0) / 2.0 - gamma, (nf - 3.0) / 2.0 - gamma)
}

/// Distinct roots of `Q_{Δ²}` in the asymptotic strip, each with `log` power bound 3.
pub fn asymptotics_space(n: u32, spec: &CrossSectionSpectrum, gamma: f64) -> Result<Vec<AsymptoticTerm>> {
    let lambda1 = spec
        .lambda1()
        .ok_or_else(|| Error::Spectrum("truncation has no nonzero eigenvalue".into()))?;
    let window = gamma_window(n, lambda1)?;
    if !in_window(gamma, window) {
        return Err(Error::GammaOutsideWindow {
            gamma,
            lo: window.0,
            hi: window.1,
        });
    }
    check_coverage(n, spec, gamma)?;
    let (lo, hi) = asymptotic_strip(n, gamma);
    let mut terms: Vec<AsymptoticTerm> = Vec::new();
    for r in q_delta_squared(n, spec)? {
        let inside = r.value >= lo - ROOT_TOL && r.value < hi - ROOT_TOL;
        if inside && !terms.iter().any(|t| (t.rho - r.value).abs() <= ROOT_TOL) {
            terms.push(AsymptoticTerm {
                rho: r.value,
                max_log_power: 3,
            });
        }
    }
    Ok(terms)
}

/// The truncated spectrum must produce every root with real part in
/// `[strip.lo − 1, strip.hi + 1]`: the largest discriminant must reach past it
/// from both family centres.
pub fn check_coverage(n: u32, spec: &CrossSectionSpectrum, gamma: f64) -> Result<()> {
    let (lo, hi) = asymptotic_strip(n, gamma);
    let half = (n as f64 - 1.0) / 2.0;
    let centres = [half, (n as f64 - 5.0) / 2.0];
    let needed = centres
        .iter()
        .map(|c| (c - (lo - 1.0)).abs().max((hi + 1.0 - c).abs()))
        .fold(0.0, f64::max);
    let covered = (half * half + spec.lambda_max_abs()).sqrt();
    if covered < needed {
        return Err(Error::TruncationTooShort { needed, covered });
    }
    Ok(())
}

/// `(sup, chosen)` with `sup = min_ρ ((n+1)/2 − ρ − γ − 2)` clipped to `(0, 2]`.
pub fn delta0(terms: &[AsymptoticTerm], gamma: f64, n: u32) -> Result<(f64, f64)> {
    let nf = n as f64;
    let raw = terms
        .iter()
        .map(|t| (nf + 1.0) / 2.0 - t.rho - gamma - 2.0)
        .fold(f64::INFINITY, f64::min);
    if raw <= 0.0 {
        return Err(Error::Delta0Inconsistent(raw));
    }
    let sup = raw.min(2.0);
    Ok((sup, DELTA0_FRACTION * sup))
}

pub fn report(n: u32, spec: &CrossSectionSpectrum, gamma: f64) -> Result<IndicialReport> {
    let lambda1 = spec
        .lambda1()
        .ok_or_else(|| Error::Spectrum("truncation has no nonzero eigenvalue".into()))?;
    let window = gamma_window(n, lambda1)?;
    if !in_window(gamma, window) {
        return Err(Error::GammaOutsideWindow {
            gamma,
            lo: window.0,
            hi: window.1,
        });
    }
    let terms = asymptotics_space(n, spec, gamma)?;
    let (delta0_sup, delta0_chosen) = delta0(&terms, gamma, n)?;
    Ok(IndicialReport {
        q_delta: q_delta(n, spec)?,
        q_delta2: q_delta_squared(n, spec)?,
        gamma_window: window,
        terms,
        delta0_sup,
        delta0_chosen,
        minimal_domain_clean: minimal_domain_clean(n, spec, gamma)?,
    })
}

/// Report for the model cone: `n = 1` is the circle of length `2πα`, `n = 2`
/// the round sphere (`alpha` is ignored).
pub fn cone_report(n: u32, alpha: f64, gamma: f64) -> Result<IndicialReport> {
    let spec = match n {
        1 => circle_spectrum_for(alpha, gamma)?,
        2 => sphere_spectrum_for(gamma)?,
        _ => return Err(Error::Config(format!("n: {n} must be 1 (circle) or 2 (sphere)"))),
    };
    report(n, &spec, gamma)
}

/// A circle spectrum long enough for [`check_coverage`] at weight `gamma`.
pub fn circle_spectrum_for(alpha: f64, gamma: f64) -> Result<CrossSectionSpectrum> {
    let (lo, hi) = asymptotic_strip(1, gamma);
    // centres are 0 and −2 for n = 1; roots are centre ± k/α
    let reach = (lo - 1.0).abs().max((hi + 1.0).abs()) + 2.0;
    let k_max = (reach * alpha).ceil() as usize + 1;
    CrossSectionSpectrum::circle(alpha, k_max.max(2))
}

/// A sphere spectrum long enough for [`check_coverage`] at weight `gamma`.
pub fn sphere_spectrum_for(gamma: f64) -> Result<CrossSectionSpectrum> {
    let (lo, hi) = asymptotic_strip(2, gamma);
    let reach = (lo - 1.0).abs().max((hi + 1.0).abs()) + 2.0;
    CrossSectionSpectrum::sphere(reach.ceil() as usize + 1)
}
