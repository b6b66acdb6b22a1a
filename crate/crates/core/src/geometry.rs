//! Spindle surfaces: closed surfaces of revolution with two conical tips.
//!
//! The metric is `dx² + ψ(x)² dθ²` on `(0, L) × S¹`. Near each tip the profile
//! is exactly conical, `ψ(x) = α₀ x` on `[0, x_c]` and `ψ(x) = α_L (L − x)` on
//! `[L − x_c, L]`, so the collar metric is `dx² + x² h` with `h = α₀² dθ²`
//! constant. The boundary Laplacian at tip 0 is the Laplacian of a circle of
//! circumference `2πα₀`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues of a boundary Laplacian with multiplicities, strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSpectrum {
    pub entries: Vec<(f64, usize)>,
    pub label: String,
}

impl CrossSectionSpectrum {
    pub fn new(entries: Vec<(f64, usize)>, label: impl Into<String>) -> Result<Self> {
        let spec = Self {
            entries,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Circle of circumference `2πα`: `λ_k = −(k/α)²`, multiplicity 2 for `k ≥ 1`.
    pub fn circle(alpha: f64, k_max: usize) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Spectrum(format!("circle parameter {alpha} must be positive")));
        }
        let entries = (0..=k_max)
            .map(|k| {
                let kk = k as f64 / alpha;
                (-(kk * kk), if k == 0 { 1 } else { 2 })
            })
            .collect();
        Self::new(entries, format!("circle({alpha})"))
    }

    /// Unit round sphere: `λ_j = −j(j+1)` with multiplicity `2j+1`.
    pub fn sphere(j_max: usize) -> Result<Self> {
        let entries = (0..=j_max)
            .map(|j| (-((j * (j + 1)) as f64), 2 * j + 1))
            .collect();
        Self::new(entries, "sphere")
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if !self.entries.iter().any(|&(l, _)| l == 0.0) {
            return Err(Error::Spectrum("0 must be an eigenvalue (constants)".into()));
        }
        for &(l, mult) in &self.entries {
            if !(l <= 0.0) {
                return Err(Error::Spectrum(format!("eigenvalue {l} is positive")));
            }
            if mult == 0 {
                return Err(Error::Spectrum(format!("eigenvalue {l} has zero multiplicity")));
            }
        }
        for pair in self.entries.windows(2) {
            if !(pair[1].0 < pair[0].0) {
                return Err(Error::Spectrum("entries must be strictly decreasing".into()));
            }
        }
        Ok(())
    }

    /// Greatest non-zero eigenvalue, if the truncation contains one.
    pub fn lambda1(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.0).find(|&l| l < 0.0)
    }

    /// Largest `|λ|` in the truncation.
    pub fn lambda_max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.0.abs()).fold(0.0, f64::max)
    }
}

/// Monomial coefficients of a quintic in `t ∈ [0, 1]` on the interval `[a, a + h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Quintic {
    a: f64,
    h: f64,
    c: [f64; 6],
}

impl Quintic {
    /// Hermite quintic matching value, first and second derivative at both ends.
    fn hermite(a: f64, b: f64, left: [f64; 3], right: [f64; 3]) -> Self {
        let h = b - a;
        let (v0, d0, s0) = (left[0], left[1] * h, left[2] * h * h);
        let (v1, d1, s1) = (right[0], right[1] * h, right[2] * h * h);
        let c = [
            v0,
            d0,
            0.5 * s0,
            -10.0 * v0 - 6.0 * d0 - 1.5 * s0 + 0.5 * s1 - 4.0 * d1 + 10.0 * v1,
            15.0 * v0 + 8.0 * d0 + 1.5 * s0 - s1 + 7.0 * d1 - 15.0 * v1,
            -6.0 * v0 - 3.0 * d0 - 0.5 * s0 + 0.5 * s1 - 3.0 * d1 + 6.0 * v1,
        ];
        Self { a, h, c }
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let t = (x - self.a) / self.h;
        let c = &self.c;
        let v = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
        let d = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
        let s = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
        (v, d / self.h, s / (self.h * self.h))
    }
}

/// A closed surface with two conical tips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpindleGeometry {
    pub alpha0: f64,
    pub alpha_l: f64,
    pub length: f64,
    pub collar_width: f64,
    interior: Quintic,
}

impl SpindleGeometry {
    pub fn new(alpha0: f64, alpha_l: f64, length: f64, collar_width: f64) -> Result<Self> {
        build_spindle(alpha0, alpha_l, length, collar_width)
    }

    /// Profile value and its derivative; `x` must lie in `[0, L]`.
    pub fn profile(&self, x: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::OutsideDomain {
                x,
                length: self.length,
            });
        }
        Ok(self.profile_unchecked(x))
    }

    pub(crate) fn profile_unchecked(&self, x: f64) -> (f64, f64) {
        let xc = self.collar_width;
        if x <= xc {
            (self.alpha0 * x, self.alpha0)
        } else if x >= self.length - xc {
            (self.alpha_l * (self.length - x), -self.alpha_l)
        } else {
            let (v, d, _) = self.interior.eval(x);
            (v, d)
        }
    }

    /// `ψ` only, for callers that already know `x` is in range.
    pub fn psi(&self, x: f64) -> f64 {
        self.profile_unchecked(x).0
    }

    /// Second derivative of the profile.
    pub fn psi_second(&self, x: f64) -> f64 {
        let xc = self.collar_width;
        if x <= xc || x >= self.length - xc {
            0.0
        } else {
            self.interior.eval(x).2
        }
    }

    /// Cone parameter of the tip at `x = 0` or `x = L`.
    pub fn alpha(&self, tip: Tip) -> f64 {
        match tip {
            Tip::Start => self.alpha0,
            Tip::End => self.alpha_l,
        }
    }

    /// Distance to the given tip.
    pub fn tip_distance(&self, x: f64, tip: Tip) -> f64 {
        match tip {
            Tip::Start => x,
            Tip::End => self.length - x,
        }
    }

    /// Greatest non-zero eigenvalue over both tip circles, `−1/max(α)²`.
    pub fn lambda1(&self) -> f64 {
        let a = self.alpha0.max(self.alpha_l);
        -1.0 / (a * a)
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha0 == self.alpha_l
    }
}

/// Which conical tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tip {
    /// `x = 0`
    Start,
    /// `x = L`
    End,
}

impl Tip {
    pub const BOTH: [Tip; 2] = [Tip::Start, Tip::End];
}

pub fn build_spindle(alpha0: f64, alpha_l: f64, length: f64, collar_width: f64) -> Result<SpindleGeometry> {
    for (name, v) in [
        ("alpha0", alpha0),
        ("alphaL", alpha_l),
        ("length", length),
        ("collar_width", collar_width),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Geometry(format!("{name} = {v} must be positive")));
        }
    }
    if !(collar_width < 0.5 * length) {
        return Err(Error::Geometry(format!(
            "collar_width = {collar_width} must be below length/2 = {}",
            0.5 * length
        )));
    }
    let a = collar_width;
    let b = length - collar_width;
    let interior = Quintic::hermite(
        a,
        b,
        [alpha0 * collar_width, alpha0, 0.0],
        [alpha_l * collar_width, -alpha_l, 0.0],
    );
    // The interpolant must stay positive; sample densely and check.
    const SAMPLES: usize = 4096;
    for k in 0..=SAMPLES {
        let x = a + (b - a) * k as f64 / SAMPLES as f64;
        let (v, _, _) = interior.eval(x);
        if !(v > 0.0) {
            return Err(Error::Geometry(format!(
                "interior profile is not positive at x = {x} (value {v})"
            )));
        }
    }
    Ok(SpindleGeometry {
        alpha0,
        alpha_l,
        length,
        collar_width,
        interior,
    })
}

pub fn profile_eval(geom: &SpindleGeometry, x: f64) -> Result<(f64, f64)> {
    geom.profile(x)
}

/// `∫ dμ_g = 2π ∫ ψ dx` by the grid quadrature.
pub fn volume(_geom: &SpindleGeometry, grid: &crate::discrete::RadialGrid) -> f64 {
    2.0 * PI * crate::numerics::pairwise_sum(&grid.weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffShape {
    SmoothstepQuintic,
    /// `ω = 1` for `x < outer`, `0` otherwise.
    Indicator,
}

/// Collar cutoff `ω(x)`, a function of the distance to a tip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffOmega {
    pub inner: f64,
    pub outer: f64,
    pub shape: CutoffShape,
}

impl CutoffOmega {
    pub fn new(inner: f64, outer: f64, shape: CutoffShape) -> Result<Self> {
        if !(0.0 <= inner && inner < outer) {
            return Err(Error::Geometry(format!(
                "cutoff requires 0 <= inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(Self { inner, outer, shape })
    }

    /// Default cutoff for a geometry: quintic smoothstep on `(x_c/2, x_c)`.
    pub fn for_geometry(geom: &SpindleGeometry) -> Self {
        Self {
            inner: 0.5 * geom.collar_width,
            outer: geom.collar_width,
            shape: CutoffShape::SmoothstepQuintic,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        cutoff_eval(self, x)
    }

    /// `(ω, ω′, ω″)` at distance `x`; the indicator has zero derivatives.
    pub fn eval_with_derivatives(&self, x: f64) -> (f64, f64, f64) {
        match self.shape {
            CutoffShape::Indicator => (self.eval(x), 0.0, 0.0),
            CutoffShape::SmoothstepQuintic => {
                if x <= self.inner || x >= self.outer {
                    return (self.eval(x), 0.0, 0.0);
                }
                let h = self.outer - self.inner;
                let t = (x - self.inner) / h;
                let d1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
                let d2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
                (1.0 - smoothstep5(t), -d1 / h, -d2 / (h * h))
            }
        }
    }
}

pub fn cutoff_eval(omega: &CutoffOmega, x: f64) -> f64 {
    match omega.shape {
        CutoffShape::Indicator => {
            if x < omega.outer {
                1.0
            } else {
                0.0
            }
        }
        CutoffShape::SmoothstepQuintic => {
            if x <= omega.inner {
                1.0
            } else if x >= omega.outer {
                0.0
            } else {
                let t = (x - omega.inner) / (omega.outer - omega.inner);
                1.0 - smoothstep5(t)
            }
        }
    }
}

/// `10t³ − 15t⁴ + 6t⁵` clamped to `[0, 1]`.
pub fn smoothstep5(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}
