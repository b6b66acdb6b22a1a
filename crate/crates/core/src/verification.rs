//! Brute-force oracles for the fast path: a dense 2D assembly of the discrete
//! Laplacian on the product grid, spectral cross-checks, a Fréchet-derivative
//! check of the energy and a one-step dissipation check.
//!
//! Everything here is single-threaded and deliberately plain.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::discrete::{assemble_mode_operator, Discretization, Field, Grading, RadialGrid};
use crate::dynamics::{imex_step, SolverConfig};
use crate::error::{Error, Result};
use crate::functionals::{chemical_potential, energy, grad_inner, grad_sq, green_residual, inner};
use crate::geometry::SpindleGeometry;
use crate::numerics::linear_fit;

/// Largest `N · M_θ` the dense oracle accepts.
pub const DENSE_CAP: usize = 4096;

/// `Δ` on the full `(radial node, angle)` lattice, row index `i·M_θ + l`.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n_radial: usize,
    pub n_theta: usize,
    pub matrix: DMatrix<f64>,
    /// `dμ_g` quadrature weight of every lattice point.
    pub weights: Vec<f64>,
    nodes: Vec<f64>,
}

/// Real circulant with symbol `σ(k)`, `k` the signed wavenumber.
fn circulant(mt: usize, symbol: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let mut first = vec![0.0; mt];
    for (d, entry) in first.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..mt {
            let kk = if k <= mt / 2 { k as f64 } else { k as f64 - mt as f64 };
            let phase = 2.0 * std::f64::consts::PI * (k * d) as f64 / mt as f64;
            acc += symbol(kk) * phase.cos();
        }
        *entry = acc / mt as f64;
    }
    DMatrix::from_fn(mt, mt, |a, b| first[(a + mt - b) % mt])
}

pub fn dense_assemble(geom: &SpindleGeometry, grid: &RadialGrid, n_theta: usize) -> Result<DenseOperator> {
    let n = grid.len();
    let size = n * n_theta;
    if size > DENSE_CAP {
        return Err(Error::OracleTooLarge { size, cap: DENSE_CAP });
    }
    // mode-0 operator gives the face couplings; the angular parts are added below
    let radial = assemble_mode_operator(geom, grid, 0);
    let d2 = circulant(n_theta, |k| -k * k);
    let dtn = circulant(n_theta, f64::abs);
    let w = &grid.weights;
    let mut a = DMatrix::zeros(size, size);
    for i in 0..n {
        for l in 0..n_theta {
            let row = i * n_theta + l;
            if i > 0 {
                let c = radial.face[i - 1] / w[i];
                a[(row, row - n_theta)] += c;
                a[(row, row)] -= c;
            }
            if i + 1 < n {
                let c = radial.face[i] / w[i];
                a[(row, row + n_theta)] += c;
                a[(row, row)] -= c;
            }
            let ang = grid.inner_weight(i) / (w[i] * grid.psi[i] * grid.psi[i]);
            for l2 in 0..n_theta {
                let col = i * n_theta + l2;
                a[(row, col)] += ang * d2[(l, l2)];
                if i == 0 || i == n - 1 {
                    a[(row, col)] -= dtn[(l, l2)] / w[i];
                }
            }
        }
    }
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let weights = (0..size).map(|r| w[r / n_theta] * dtheta).collect();
    Ok(DenseOperator {
        n_radial: n,
        n_theta,
        matrix: a,
        weights,
        nodes: grid.nodes.clone(),
    })
}

/// Dense `N × N` matrix of a single mode, assembled entry by entry.
pub fn dense_mode_matrix(geom: &SpindleGeometry, grid: &RadialGrid, m: usize) -> DMatrix<f64> {
    let n = grid.len();
    let op = assemble_mode_operator(geom, grid, m);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let w = grid.weights[i];
        if i > 0 {
            a[(i, i - 1)] += op.face[i - 1] / w;
            a[(i, i)] -= op.face[i - 1] / w;
        }
        if i + 1 < n {
            a[(i, i + 1)] += op.face[i] / w;
            a[(i, i)] -= op.face[i] / w;
        }
        a[(i, i)] -= op.sink[i] / w;
    }
    a
}

/// Eigenvalues of `A` self-adjoint in `diag(w)`, ascending.
fn weighted_spectrum(a: &DMatrix<f64>, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let sq: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| 0.5 * (sq[i] * a[(i, j)] / sq[j] + sq[j] * a[(j, i)] / sq[i]));
    let mut vals: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

impl DenseOperator {
    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, u: &Field, disc: &Discretization) -> Result<Field> {
        u.check_shape((self.n_radial, self.n_theta))?;
        let u = disc.to_physical(u);
        let x = nalgebra::DVector::from_column_slice(u.physical().unwrap());
        let y = &self.matrix * x;
        Ok(Field::from_physical(self.n_radial, self.n_theta, y.iter().copied().collect()))
    }

    /// `max |(WA) − (WA)ᵀ| / max |WA|`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.weights[i] * self.matrix[(i, j)];
                let b = self.weights[j] * self.matrix[(j, i)];
                worst = worst.max((a - b).abs());
                scale = scale.max(a.abs());
            }
        }
        worst / scale
    }

    /// Spectrum, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        weighted_spectrum(&self.matrix, &self.weights)
    }
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn max_sorted_mismatch(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| relative_error(*x, *y)).fold(0.0, f64::max)
}

/// Per-mode spectra (with their angular multiplicities) against the dense
/// spectrum, matched in sorted order.
pub fn oracle_compare_spectra(dense: &DenseOperator, disc: &Discretization) -> Result<f64> {
    if dense.n_theta != disc.n_theta || dense.nodes != disc.grid.nodes {
        return Err(Error::GridMismatch);
    }
    let mut union = Vec::with_capacity(dense.size());
    for op in &disc.modes {
        let copies = if op.m == 0 || 2 * op.m == disc.n_theta { 1 } else { 2 };
        let vals = &op.eigen().expect("eigendecomposed").values;
        for _ in 0..copies {
            union.extend_from_slice(vals);
        }
    }
    Ok(max_sorted_mismatch(union, dense.spectrum()))
}

/// Mode `m` alone: fast eigenvalues against a dense eigensolve of that mode.
pub fn oracle_compare_mode(disc: &Discretization, m: usize) -> f64 {
    let a = dense_mode_matrix(&disc.geom, &disc.grid, m);
    let dense = weighted_spectrum(&a, &disc.grid.weights);
    max_sorted_mismatch(disc.eigen(m).values.clone(), dense)
}

/// Random physical field with standard normal entries.
pub fn random_field(n: usize, mt: usize, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * mt).map(|_| StandardNormal.sample(&mut rng)).collect();
    Field::from_physical(n, mt, values)
}

/// Max over `count` random fields of `max|A_dense u − A_fast u| / max|A_dense u|`.
pub fn oracle_compare_action(dense: &DenseOperator, disc: &Discretization, count: usize, seed: u64) -> Result<f64> {
    let (n, mt) = disc.shape();
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let u = random_field(n, mt, seed.wrapping_add(k as u64));
        let a = dense.apply(&u, disc)?;
        let b = disc.apply_laplacian(&u)?;
        let (a, b) = (a.physical().unwrap(), b.physical().unwrap());
        let scale = a.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let diff = a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetReport {
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Indices of `eps` kept for the fit.
    pub used: Vec<usize>,
    pub order: f64,
}

/// Central-difference quotients of `Φ` along `v` against
/// `∫⟨∇u,∇v⟩ + ∫(u³ − u) v`. Errors at round-off level are excluded.
pub fn frechet_check(disc: &Discretization, u: &Field, v: &Field, eps_list: &[f64]) -> Result<FrechetReport> {
    let (n, mt) = disc.shape();
    let u = disc.to_physical(u);
    let v = disc.to_physical(v);
    let (up, vp) = (u.physical().unwrap(), v.physical().unwrap());
    let cubic = Field::from_physical(n, mt, up.iter().map(|x| x * x * x - x).collect());
    let exact = grad_inner(disc, &u, &v)? + inner(disc, &cubic, &v)?;
    let phi0 = energy(disc, &u)?.abs();
    let shifted = |e: f64| Field::from_physical(n, mt, up.iter().zip(vp).map(|(a, b)| a + e * b).collect());
    let mut errors = Vec::with_capacity(eps_list.len());
    let mut used = Vec::new();
    for (k, &e) in eps_list.iter().enumerate() {
        let q = (energy(disc, &shifted(e))? - energy(disc, &shifted(-e))?) / (2.0 * e);
        let err = (q - exact).abs();
        // cancellation error of the quotient is about eps_machine·Φ/ε
        let floor = 1e3 * f64::EPSILON * phi0.max(exact.abs()) / e;
        if err > floor {
            used.push(k);
        }
        errors.push(err);
    }
    let order = if used.len() >= 2 {
        let lx: Vec<f64> = used.iter().map(|&k| eps_list[k].ln()).collect();
        let ly: Vec<f64> = used.iter().map(|&k| errors[k].ln()).collect();
        linear_fit(&lx, &ly).0
    } else {
        f64::NAN
    };
    Ok(FrechetReport {
        eps: eps_list.to_vec(),
        errors,
        used,
        order,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub dt: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Whether the one-step energy change was nonpositive for each `dt`.
    pub monotone: Vec<bool>,
    pub order: f64,
}

/// One step from `u0` for each `dt`: `|ΔΦ/Δt + ∫⟨∇J,∇J⟩|` against `Δt`.
pub fn dissipation_check(disc: &Discretization, u0: &Field, cfg: &SolverConfig, dt_list: &[f64]) -> Result<DissipationReport> {
    let u0 = disc.to_physical(u0);
    let phi0 = energy(disc, &u0)?;
    let j = chemical_potential(disc, &u0)?;
    let rate = grad_sq(disc, &j)?;
    let mut residuals = Vec::new();
    let mut monotone = Vec::new();
    for &dt in dt_list {
        let c = SolverConfig { dt, ..cfg.clone() };
        let u1 = imex_step(disc, &u0, &c)?;
        let phi1 = energy(disc, &u1)?;
        residuals.push(((phi1 - phi0) / dt + rate).abs());
        monotone.push(phi1 <= phi0);
    }
    let pos: Vec<usize> = (0..dt_list.len()).filter(|&k| residuals[k] > 0.0).collect();
    let order = if pos.len() >= 2 {
        let lx: Vec<f64> = pos.iter().map(|&k| dt_list[k].ln()).collect();
        let ly: Vec<f64> = pos.iter().map(|&k| residuals[k].ln()).collect();
        linear_fit(&lx, &ly).0
    } else if residuals.iter().all(|&r| r == 0.0) {
        f64::INFINITY
    } else {
        f64::NAN
    };
    Ok(DissipationReport {
        dt: dt_list.to_vec(),
        residuals,
        monotone,
        order,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n: Vec<usize>,
    pub residuals: Vec<f64>,
    /// `−slope` of `log residual` against `log N`.
    pub order: f64,
}

/// Smooth pair respecting the tip closures on an `α = 1` spindle: mode 0 even
/// about each tip, mode 1 odd.
pub fn manufactured_pair(geom: &SpindleGeometry, disc: &Discretization) -> (Field, Field) {
    let k = std::f64::consts::PI / geom.length;
    let w = Field::from_fn(&disc.grid.nodes, disc.n_theta, |x, t| (k * x).cos() + (k * x).sin() * t.cos());
    let v = Field::from_fn(&disc.grid.nodes, disc.n_theta, |x, t| {
        (2.0 * k * x).cos() + 0.5 * (k * x).sin() * (t.cos() + t.sin()) + 0.25 * (k * x).sin().powi(2) * (2.0 * t).cos()
    });
    (w, v)
}

/// Green-identity residual of the manufactured pair over a sequence of grids.
pub fn green_convergence(geom: &SpindleGeometry, ns: &[usize], n_theta: usize, x_min: f64, grading: Grading) -> Result<ConvergenceReport> {
    let mut residuals = Vec::with_capacity(ns.len());
    for &n in ns {
        let disc = Discretization::build(geom.clone(), n, n_theta, x_min, grading)?;
        let (w, v) = manufactured_pair(geom, &disc);
        residuals.push(green_residual(&disc, &w, &v)?);
    }
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    Ok(ConvergenceReport {
        n: ns.to_vec(),
        residuals,
        order: -linear_fit(&lx, &ly).0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityScan {
    pub dt: Vec<f64>,
    /// Largest single-step increase of `Φ` relative to `Φ(u₀)`, per `dt`.
    pub max_rise: Vec<f64>,
    /// Largest `dt` in the scan with no rise above the tolerance.
    pub threshold: Option<f64>,
}

/// Run `steps` steps for each `dt` and record the worst energy increase.
pub fn energy_stability_scan(
    disc: &Discretization,
    u0: &Field,
    cfg: &SolverConfig,
    dt_list: &[f64],
    steps: usize,
    tol: f64,
) -> Result<StabilityScan> {
    let phi0 = energy(disc, u0)?;
    let mut max_rise = Vec::new();
    for &dt in dt_list {
        let c = SolverConfig { dt, ..cfg.clone() };
        let mut u = disc.to_physical(u0);
        let mut prev = phi0;
        let mut rise: f64 = 0.0;
        for _ in 0..steps {
            u = imex_step(disc, &u, &c)?;
            let phi = energy(disc, &u)?;
            if !phi.is_finite() {
                rise = f64::INFINITY;
                break;
            }
            rise = rise.max((phi - prev) / phi0);
            prev = phi;
        }
        max_rise.push(rise);
    }
    let threshold = dt_list
        .iter()
        .zip(&max_rise)
        .filter(|(_, r)| **r <= tol)
        .map(|(d, _)| *d)
        .fold(None, |a: Option<f64>, d| Some(a.map_or(d, |x| x.max(d))));
    Ok(StabilityScan {
        dt: dt_list.to_vec(),
        max_rise,
        threshold,
    })
}
