use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Modal,
}

#[derive(Debug, Clone, PartialEq)]
enum FieldData {
    /// Row-major `N × M_θ`, `u(x_i, θ_l)` at index `i·M_θ + l`.
    Physical(Vec<f64>),
    /// One radial vector per mode `m = 0..=M_θ/2`:
    /// `û_m(x_i) = (1/M_θ) Σ_l u(x_i, θ_l) e^{−i m θ_l}`.
    Modal(Vec<Vec<Complex64>>),
}

/// Order parameter on the (radial node) × (angle) lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    n_radial: usize,
    n_theta: usize,
    data: FieldData,
}

impl Field {
    pub fn zeros(n_radial: usize, n_theta: usize) -> Self {
        Self::from_physical(n_radial, n_theta, vec![0.0; n_radial * n_theta])
    }

    pub fn constant(n_radial: usize, n_theta: usize, c: f64) -> Self {
        Self::from_physical(n_radial, n_theta, vec![c; n_radial * n_theta])
    }

    pub fn from_physical(n_radial: usize, n_theta: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n_radial * n_theta, "physical array has wrong length");
        Self {
            n_radial,
            n_theta,
            data: FieldData::Physical(values),
        }
    }

    pub fn from_fn(grid_nodes: &[f64], n_theta: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid_nodes.len();
        let mut v = Vec::with_capacity(n * n_theta);
        for &x in grid_nodes {
            for l in 0..n_theta {
                v.push(f(x, theta(l, n_theta)));
            }
        }
        Self::from_physical(n, n_theta, v)
    }

    pub fn from_modal(n_radial: usize, n_theta: usize, modes: Vec<Vec<Complex64>>) -> Self {
        assert_eq!(modes.len(), n_theta / 2 + 1, "wrong number of modes");
        assert!(modes.iter().all(|m| m.len() == n_radial), "mode vector has wrong length");
        Self {
            n_radial,
            n_theta,
            data: FieldData::Modal(modes),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_radial, self.n_theta)
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Physical(_) => Representation::Physical,
            FieldData::Modal(_) => Representation::Modal,
        }
    }

    pub fn physical(&self) -> Option<&[f64]> {
        match &self.data {
            FieldData::Physical(v) => Some(v),
            FieldData::Modal(_) => None,
        }
    }

    pub fn modal(&self) -> Option<&[Vec<Complex64>]> {
        match &self.data {
            FieldData::Modal(v) => Some(v),
            FieldData::Physical(_) => None,
        }
    }

    pub fn into_physical_values(self) -> Option<Vec<f64>> {
        match self.data {
            FieldData::Physical(v) => Some(v),
            FieldData::Modal(_) => None,
        }
    }

    pub(crate) fn check_shape(&self, expected: (usize, usize)) -> Result<()> {
        if self.shape() != expected {
            return Err(Error::Shape {
                got: self.shape(),
                expected,
            });
        }
        Ok(())
    }
}

/// Angle of column `l`.
pub fn theta(l: usize, n_theta: usize) -> f64 {
    2.0 * PI * l as f64 / n_theta as f64
}

/// Multiplicity of mode `m` in a real field with `M_θ` samples (Parseval weight).
pub fn mode_multiplicity(m: usize, n_theta: usize) -> f64 {
    if m == 0 || 2 * m == n_theta {
        1.0
    } else {
        2.0
    }
}

/// FFT plans for one angular resolution.
#[derive(Clone)]
pub struct ThetaTransform {
    n_theta: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ThetaTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThetaTransform").field("n_theta", &self.n_theta).finish()
    }
}

impl ThetaTransform {
    pub fn new(n_theta: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n_theta,
            forward: planner.plan_fft_forward(n_theta),
            inverse: planner.plan_fft_inverse(n_theta),
        }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn to_modal(&self, u: &Field) -> Field {
        match &u.data {
            FieldData::Modal(_) => u.clone(),
            FieldData::Physical(values) => {
                let (n, mt) = u.shape();
                assert_eq!(mt, self.n_theta);
                let nm = mt / 2 + 1;
                let mut modes = vec![vec![Complex64::new(0.0, 0.0); n]; nm];
                let mut buf = vec![Complex64::new(0.0, 0.0); mt];
                let scale = 1.0 / mt as f64;
                for i in 0..n {
                    for l in 0..mt {
                        buf[l] = Complex64::new(values[i * mt + l], 0.0);
                    }
                    self.forward.process(&mut buf);
                    for (m, mode) in modes.iter_mut().enumerate() {
                        mode[i] = buf[m] * scale;
                    }
                }
                Field::from_modal(n, mt, modes)
            }
        }
    }

    pub fn to_physical(&self, u: &Field) -> Field {
        match &u.data {
            FieldData::Physical(_) => u.clone(),
            FieldData::Modal(modes) => {
                let (n, mt) = u.shape();
                assert_eq!(mt, self.n_theta);
                let mut values = vec![0.0; n * mt];
                let mut buf = vec![Complex64::new(0.0, 0.0); mt];
                for i in 0..n {
                    for k in 0..mt {
                        buf[k] = if k <= mt / 2 {
                            modes[k][i]
                        } else {
                            modes[mt - k][i].conj()
                        };
                    }
                    if mt % 2 == 0 && mt >= 2 {
                        // A real field carries only the cosine part of the Nyquist mode.
                        buf[mt / 2] = Complex64::new(modes[mt / 2][i].re, 0.0);
                    }
                    self.inverse.process(&mut buf);
                    for l in 0..mt {
                        values[i * mt + l] = buf[l].re;
                    }
                }
                Field::from_physical(n, mt, values)
            }
        }
    }

    pub fn transform(&self, u: &Field, to: Representation) -> Field {
        match to {
            Representation::Physical => self.to_physical(u),
            Representation::Modal => self.to_modal(u),
        }
    }
}

/// Convert between representations with a one-off FFT plan.
pub fn transform(u: &Field, to: Representation) -> Field {
    ThetaTransform::new(u.n_theta()).transform(u, to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pure_mode_has_single_line() {
        let nodes: Vec<f64> = (1..=5).map(|i| i as f64 * 0.1).collect();
        let u = Field::from_fn(&nodes, 8, |x, t| x * (3.0 * t).cos());
        let m = transform(&u, Representation::Modal);
        for (k, mode) in m.modal().unwrap().iter().enumerate() {
            for (i, c) in mode.iter().enumerate() {
                let expect = if k == 3 { 0.5 * nodes[i] } else { 0.0 };
                assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parseval() {
        let nodes = [0.3, 0.7];
        let mt = 16;
        let u = Field::from_fn(&nodes, mt, |x, t| x + (2.0 * t).sin() - 0.3 * (8.0 * t).cos() + (t * 5.0).cos() * x);
        let phys = u.physical().unwrap();
        let modal = transform(&u, Representation::Modal);
        for i in 0..2 {
            let lhs: f64 = (0..mt).map(|l| phys[i * mt + l].powi(2)).sum::<f64>() / mt as f64;
            let rhs: f64 = modal
                .modal()
                .unwrap()
                .iter()
                .enumerate()
                .map(|(m, c)| mode_multiplicity(m, mt) * c[i].norm_sqr())
                .sum();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn round_trip(values in proptest::collection::vec(-10.0f64..10.0, 3 * 16)) {
            let u = Field::from_physical(3, 16, values.clone());
            let back = transform(&transform(&u, Representation::Modal), Representation::Physical);
            for (a, b) in back.physical().unwrap().iter().zip(&values) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
