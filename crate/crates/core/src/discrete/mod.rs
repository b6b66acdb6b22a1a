//! Discretization of the degenerate Laplacian on a spindle: Fourier modes in
//! θ, a graded radial grid, and one tridiagonal operator per mode.
//!
//! The closed extension is the one with domain minimal ⊕ locally-constant
//! functions: mode 0 keeps constants at the tips and modes `m ≥ 1` keep the
//! bounded branch `x^{m/α}`. The bi-Laplacian is `L_m²` per mode.

mod field;
mod grid;
mod mode;

pub use field::{mode_multiplicity, theta, transform, Field, Representation, ThetaTransform};
pub use grid::{build_grid, Grading, RadialGrid};
pub use mode::{assemble_mode_operator, eigendecompose, ModeEigen, ModeOperator};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SpindleGeometry;

/// Geometry, grid, FFT plans and the eigendecomposed operator of every mode.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub geom: SpindleGeometry,
    pub grid: RadialGrid,
    pub n_theta: usize,
    pub modes: Vec<ModeOperator>,
    fft: ThetaTransform,
}

impl Discretization {
    pub fn new(geom: SpindleGeometry, grid: RadialGrid, n_theta: usize) -> Result<Self> {
        if n_theta < 2 || !n_theta.is_power_of_two() {
            return Err(Error::Grid(format!("n_theta = {n_theta} must be a power of two >= 2")));
        }
        let modes = (0..=n_theta / 2)
            .into_par_iter()
            .map(|m| eigendecompose(assemble_mode_operator(&geom, &grid, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geom,
            grid,
            n_theta,
            modes,
            fft: ThetaTransform::new(n_theta),
        })
    }

    pub fn build(geom: SpindleGeometry, n_radial: usize, n_theta: usize, x_min: f64, grading: Grading) -> Result<Self> {
        let grid = build_grid(&geom, n_radial, x_min, grading)?;
        Self::new(geom, grid, n_theta)
    }

    pub fn n_radial(&self) -> usize {
        self.grid.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid.len(), self.n_theta)
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn fft(&self) -> &ThetaTransform {
        &self.fft
    }

    pub fn transform(&self, u: &Field, to: Representation) -> Field {
        self.fft.transform(u, to)
    }

    pub fn to_modal(&self, u: &Field) -> Field {
        self.fft.to_modal(u)
    }

    pub fn to_physical(&self, u: &Field) -> Field {
        self.fft.to_physical(u)
    }

    pub fn eigen(&self, m: usize) -> &ModeEigen {
        self.modes[m].eigen().expect("modes are eigendecomposed at construction")
    }

    /// Discrete `Δu`, returned in physical representation.
    pub fn apply_laplacian(&self, u: &Field) -> Result<Field> {
        u.check_shape(self.shape())?;
        let modal = self.to_modal(u);
        let n = self.n_radial();
        let out: Vec<Vec<Complex64>> = modal
            .modal()
            .expect("modal")
            .par_iter()
            .zip(&self.modes)
            .map(|(coef, op)| {
                let re: Vec<f64> = coef.iter().map(|c| c.re).collect();
                let im: Vec<f64> = coef.iter().map(|c| c.im).collect();
                let mut lre = vec![0.0; n];
                let mut lim = vec![0.0; n];
                op.apply(&re, &mut lre);
                op.apply(&im, &mut lim);
                lre.into_iter().zip(lim).map(|(a, b)| Complex64::new(a, b)).collect()
            })
            .collect();
        Ok(self.to_physical(&Field::from_modal(n, self.n_theta, out)))
    }

    /// Physical field of a single eigenvector `(m, j)` times `cos(mθ)`.
    pub fn eigenmode_field(&self, m: usize, j: usize, amplitude: f64) -> Field {
        let n = self.n_radial();
        let v = self.eigen(m).vector(j);
        let mut modes = vec![vec![Complex64::new(0.0, 0.0); n]; self.n_modes()];
        // cos(mθ) = (e^{imθ} + e^{−imθ})/2, except m = 0 and the Nyquist mode.
        let scale = if m == 0 || 2 * m == self.n_theta { 1.0 } else { 0.5 };
        for i in 0..n {
            modes[m][i] = Complex64::new(amplitude * scale * v[i], 0.0);
        }
        self.to_physical(&Field::from_modal(n, self.n_theta, modes))
    }
}
