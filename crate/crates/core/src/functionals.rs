//! Functionals on discrete fields: the `dμ_g` inner product, mass, Dirichlet
//! energy, the Cahn-Hilliard energy `Φ`, the chemical potential `J`, weighted
//! Mellin-Sobolev norms and the pointwise weighted bound near a tip.
//!
//! All reductions use [`pairwise_sum`] in a fixed order.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discrete::{mode_multiplicity, Discretization, Field, RadialGrid};
use crate::error::{Error, Result};
use crate::geometry::{CutoffOmega, Tip};
use crate::indicial::WeightedIndex;
use crate::numerics::{pairwise_sum, pairwise_sum_by};

/// Cross-section dimension of a spindle surface.
const N_CROSS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRequest {
    pub index: WeightedIndex,
    pub cutoff: CutoffOmega,
    /// Measure `u` in `H^{s,γ}_p ⊕ ℂ_ω`: subtract the tip constants times `ω`
    /// and add their magnitudes, instead of measuring `u` itself in `H^{s,γ}_p`.
    pub split_constants: bool,
}

impl NormRequest {
    pub fn new(index: WeightedIndex, cutoff: CutoffOmega) -> Self {
        Self {
            index,
            cutoff,
            split_constants: true,
        }
    }

    /// CSV column name, `norm_{s}_{γ}_{p}`.
    pub fn column_name(&self) -> String {
        format!("norm_{}_{}_{}", self.index.s, self.index.gamma, self.index.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub energy: f64,
    pub mass: f64,
    pub grad_sq: f64,
    pub norms: Vec<(NormRequest, f64)>,
}

fn physical(disc: &Discretization, u: &Field) -> Result<Field> {
    u.check_shape(disc.shape())?;
    Ok(disc.to_physical(u))
}

fn modal(disc: &Discretization, u: &Field) -> Result<Field> {
    u.check_shape(disc.shape())?;
    Ok(disc.to_modal(u))
}

/// `∫ u v dμ_g` by the grid quadrature.
pub fn inner(disc: &Discretization, u: &Field, v: &Field) -> Result<f64> {
    let (n, mt) = disc.shape();
    let u = physical(disc, u)?;
    let v = physical(disc, v)?;
    let (a, b) = (u.physical().unwrap(), v.physical().unwrap());
    let w = &disc.grid.weights;
    let dtheta = 2.0 * PI / mt as f64;
    Ok(dtheta
        * pairwise_sum_by(n, |i| {
            let row: f64 = (0..mt).map(|l| a[i * mt + l] * b[i * mt + l]).sum();
            w[i] * row
        }))
}

/// `∫ f(u) dμ_g` for a pointwise function `f`.
pub fn integrate_pointwise(disc: &Discretization, u: &Field, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (n, mt) = disc.shape();
    let u = physical(disc, u)?;
    let a = u.physical().unwrap();
    let w = &disc.grid.weights;
    let dtheta = 2.0 * PI / mt as f64;
    Ok(dtheta
        * pairwise_sum_by(n, |i| {
            let row: f64 = (0..mt).map(|l| f(a[i * mt + l])).sum();
            w[i] * row
        }))
}

pub fn mass(disc: &Discretization, u: &Field) -> Result<f64> {
    integrate_pointwise(disc, u, |x| x)
}

/// Compact Dirichlet form `∫⟨∇u,∇v⟩_g dμ_g`, equal to `−⟨u, Δv⟩_w` exactly.
pub fn grad_inner(disc: &Discretization, u: &Field, v: &Field) -> Result<f64> {
    let mu = modal(disc, u)?;
    let mv = modal(disc, v)?;
    let terms: Vec<f64> = disc
        .modes
        .iter()
        .zip(mu.modal().unwrap().iter().zip(mv.modal().unwrap()))
        .map(|(op, (a, b))| {
            let (ar, ai) = split(a);
            let (br, bi) = split(b);
            mode_multiplicity(op.m, disc.n_theta) * (op.dirichlet_form(&ar, &br) + op.dirichlet_form(&ai, &bi))
        })
        .collect();
    Ok(2.0 * PI * pairwise_sum(&terms))
}

pub fn grad_sq(disc: &Discretization, u: &Field) -> Result<f64> {
    grad_inner(disc, u, u)
}

fn split(a: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (a.iter().map(|c| c.re).collect(), a.iter().map(|c| c.im).collect())
}

/// `Φ(u) = ½∫⟨∇u,∇u⟩_g dμ_g + ¼∫(u² − 1)² dμ_g`.
pub fn energy(disc: &Discretization, u: &Field) -> Result<f64> {
    let g = grad_sq(disc, u)?;
    let pot = integrate_pointwise(disc, u, |x| (x * x - 1.0).powi(2))?;
    Ok(0.5 * g + 0.25 * pot)
}

/// `J(u) = −Δu + u³ − u`, physical representation.
pub fn chemical_potential(disc: &Discretization, u: &Field) -> Result<Field> {
    let u = physical(disc, u)?;
    let lu = disc.apply_laplacian(&u)?;
    let (n, mt) = disc.shape();
    let values = u
        .physical()
        .unwrap()
        .iter()
        .zip(lu.physical().unwrap())
        .map(|(&x, &l)| -l + x * x * x - x)
        .collect();
    Ok(Field::from_physical(n, mt, values))
}

/// Second-order three-point derivative on a nonuniform grid, one-sided at the ends.
pub fn nodal_derivative(nodes: &[f64], f: &[f64], out: &mut [f64]) {
    let n = nodes.len();
    for i in 1..n - 1 {
        let hl = nodes[i] - nodes[i - 1];
        let hr = nodes[i + 1] - nodes[i];
        out[i] = -hr / (hl * (hl + hr)) * f[i - 1] + (hr - hl) / (hl * hr) * f[i] + hl / (hr * (hl + hr)) * f[i + 1];
    }
    let (h1, h2) = (nodes[1] - nodes[0], nodes[2] - nodes[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
    let (h1, h2) = (nodes[n - 1] - nodes[n - 2], nodes[n - 2] - nodes[n - 3]);
    out[n - 1] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[n - 1] - (h1 + h2) / (h1 * h2) * f[n - 2] + h1 / (h2 * (h1 + h2)) * f[n - 3];
}

/// Dirichlet form from nodal derivatives (a wider stencil than the operator's
/// face fluxes), with the exact cap energy `m a_1 b_1` of the bounded branch.
pub fn nodal_grad_inner(disc: &Discretization, u: &Field, v: &Field) -> Result<f64> {
    let mu = modal(disc, u)?;
    let mv = modal(disc, v)?;
    let grid = &disc.grid;
    let n = grid.len();
    let hat: Vec<f64> = (0..n).map(|i| grid.inner_weight(i)).collect();
    let terms: Vec<f64> = mu
        .modal()
        .unwrap()
        .iter()
        .zip(mv.modal().unwrap())
        .enumerate()
        .map(|(m, (a, b))| {
            let mf = m as f64;
            let (ar, ai) = split(a);
            let (br, bi) = split(b);
            let mut total = 0.0;
            for (x, y) in [(&ar, &br), (&ai, &bi)] {
                let mut dx = vec![0.0; n];
                let mut dy = vec![0.0; n];
                nodal_derivative(&grid.nodes, x, &mut dx);
                nodal_derivative(&grid.nodes, y, &mut dy);
                let radial = pairwise_sum_by(n, |i| hat[i] * dx[i] * dy[i]);
                let angular = pairwise_sum_by(n, |i| hat[i] * mf * mf / (grid.psi[i] * grid.psi[i]) * x[i] * y[i]);
                let caps = mf * (x[0] * y[0] + x[n - 1] * y[n - 1]);
                total += radial + angular + caps;
            }
            mode_multiplicity(m, disc.n_theta) * total
        })
        .collect();
    Ok(2.0 * PI * pairwise_sum(&terms))
}

/// `|∫⟨∇w,∇v⟩_g dμ_g + ∫ w Δv dμ_g|` with the gradient pairing taken from the
/// nodal stencil, so the residual measures discretization consistency.
pub fn green_residual(disc: &Discretization, w: &Field, v: &Field) -> Result<f64> {
    let g = nodal_grad_inner(disc, w, v)?;
    let lv = disc.apply_laplacian(v)?;
    let wl = inner(disc, w, &lv)?;
    Ok((g + wl).abs())
}

/// Mode-0 value at the node nearest the tip.
pub fn tip_constant(disc: &Discretization, u: &Field, tip: Tip) -> Result<f64> {
    let m = modal(disc, u)?;
    let i = disc.grid.index_from_tip(0, tip);
    Ok(m.modal().unwrap()[0][i].re)
}

/// `max |u − u_tip| / x^β` over collar nodes, `x` the distance to the tip.
pub fn weighted_sup_bound(disc: &Discretization, u: &Field, beta: f64, tip: Tip) -> Result<f64> {
    let c = tip_constant(disc, u, tip)?;
    let u = physical(disc, u)?;
    let vals = u.physical().unwrap();
    let mt = disc.n_theta;
    let grid = &disc.grid;
    let mut best: f64 = 0.0;
    for i in 0..grid.len() {
        let t = disc.geom.tip_distance(grid.nodes[i], tip);
        if t > disc.geom.collar_width {
            continue;
        }
        for l in 0..mt {
            best = best.max((vals[i * mt + l] - c).abs() / t.powf(beta));
        }
    }
    Ok(best)
}

/// Angular derivative `∂_θ^j` of a physical field (spectral).
fn theta_derivative(disc: &Discretization, u: &Field, j: u32) -> Field {
    if j == 0 {
        return disc.to_physical(u);
    }
    let modal = disc.to_modal(u);
    let (n, mt) = disc.shape();
    let modes: Vec<Vec<Complex64>> = modal
        .modal()
        .unwrap()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let factor = if 2 * m == mt && j % 2 == 1 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, m as f64).powu(j)
            };
            c.iter().map(|z| z * factor).collect()
        })
        .collect();
    disc.to_physical(&Field::from_modal(n, mt, modes))
}

/// Radial derivative of every column of a physical array.
fn column_derivative(grid: &RadialGrid, vals: &[f64], mt: usize) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![0.0; n * mt];
    let mut col = vec![0.0; n];
    let mut d = vec![0.0; n];
    for l in 0..mt {
        for i in 0..n {
            col[i] = vals[i * mt + l];
        }
        nodal_derivative(&grid.nodes, &col, &mut d);
        for i in 0..n {
            out[i * mt + l] = d[i];
        }
    }
    out
}

/// 4-point Gauss-Legendre rule on `[0, 1]`.
const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// Cutoff value with its first two `x`-derivatives at `x`.
type CutJet = (f64, f64, f64);

fn tip_cutoff(req: &NormRequest, disc: &Discretization, x: f64, tip: Tip) -> CutJet {
    let sign = if tip == Tip::Start { 1.0 } else { -1.0 };
    let (w, w1, w2) = req.cutoff.eval_with_derivatives(disc.geom.tip_distance(x, tip));
    (w, sign * w1, w2)
}

/// Weighted Mellin-Sobolev norm for integer `s ∈ {0, 1, 2}`.
///
/// Collar part at each tip: `Σ_{k+j≤s} ∫∫ |t^{(n+1)/2−γ} (t∂_t)^k ∂_θ^j (ω u)|^p α dθ dt/t`,
/// `t` the distance to the tip. Interior part: `Σ_{k+j≤s} ∫ |∂_x^k ∂_θ^j ((1−ω) u)|^p dμ_g`.
/// The result is the `p`-th root of the sum.
///
/// Derivatives of `u` come from the nodal stencil and are interpolated linearly
/// between nodes; the cutoff and its derivatives are evaluated exactly at
/// Gauss points (in `log t` on the collars, in `x` inside), so a cutoff ramp
/// spanning few nodes is still integrated accurately.
pub fn mellin_norm(disc: &Discretization, u: &Field, req: &NormRequest) -> Result<f64> {
    let s = req.index.s;
    if !(s == 0.0 || s == 1.0 || s == 2.0) {
        return Err(Error::UnsupportedOrder(s));
    }
    let s = s as usize;
    let p = req.index.p;
    let beta = (N_CROSS + 1.0) / 2.0 - req.index.gamma;
    let (n, mt) = disc.shape();
    let grid = &disc.grid;
    let geom = &disc.geom;
    let u = physical(disc, u)?;

    let mut constants = [0.0; 2];
    if req.split_constants {
        for (k, tip) in Tip::BOTH.iter().enumerate() {
            constants[k] = tip_constant(disc, &u, *tip)?;
        }
    }
    let dtheta = 2.0 * PI / mt as f64;
    let mut total_terms: Vec<f64> = constants.iter().map(|c| c.abs().powf(p)).collect();

    // collar intervals (pairs of adjacent nodes, both within the collar)
    let collar_intervals: Vec<Vec<(usize, usize)>> = Tip::BOTH
        .iter()
        .map(|&tip| {
            let inside = |i: usize| {
                let t = geom.tip_distance(grid.nodes[i], tip);
                t <= geom.collar_width && t <= 0.5 * geom.length
            };
            (0..n - 1)
                .filter(|&i| inside(i) && inside(i + 1))
                .map(|i| if tip == Tip::Start { (i, i + 1) } else { (i + 1, i) })
                .collect()
        })
        .collect();

    for j in 0..=s {
        // jets of B = ∂_θ^j u at the nodes; the split constants are handled at
        // the quadrature points through the exact cutoff
        let b = theta_derivative(disc, &u, j as u32).into_physical_values().unwrap();
        let bx = if s - j >= 1 { column_derivative(grid, &b, mt) } else { vec![0.0; n * mt] };
        let bxx = if s - j >= 2 { column_derivative(grid, &bx, mt) } else { vec![0.0; n * mt] };
        // B jet at x between nodes a and b, column l
        let jet_at = |a: usize, bnode: usize, x: f64, l: usize| -> (f64, f64, f64) {
            let tau = (x - grid.nodes[a]) / (grid.nodes[bnode] - grid.nodes[a]);
            let lerp = |v: &[f64]| (1.0 - tau) * v[a * mt + l] + tau * v[bnode * mt + l];
            let mut jet = (lerp(&b), lerp(&bx), lerp(&bxx));
            if j == 0 {
                for (k, tip) in Tip::BOTH.iter().enumerate() {
                    let (w, w1, w2) = tip_cutoff(req, disc, x, *tip);
                    jet.0 -= constants[k] * w;
                    jet.1 -= constants[k] * w1;
                    jet.2 -= constants[k] * w2;
                }
            }
            jet
        };
        let product = |chi: CutJet, bj: (f64, f64, f64)| -> [f64; 3] {
            [
                chi.0 * bj.0,
                chi.1 * bj.0 + chi.0 * bj.1,
                chi.2 * bj.0 + 2.0 * chi.1 * bj.1 + chi.0 * bj.2,
            ]
        };
        for kk in 0..=(s - j) {
            for (k, tip) in Tip::BOTH.iter().enumerate() {
                let alpha = geom.alpha(*tip);
                let intervals = &collar_intervals[k];
                let sum = pairwise_sum_by(intervals.len(), |q| {
                    let (a, bn) = intervals[q];
                    let (ta, tb) = (
                        geom.tip_distance(grid.nodes[a], *tip),
                        geom.tip_distance(grid.nodes[bn], *tip),
                    );
                    let (la, lb) = (ta.ln(), tb.ln());
                    let mut acc = 0.0;
                    for &(g, gw) in &GAUSS4 {
                        let t = (la + g * (lb - la)).exp();
                        let x = if *tip == Tip::Start { t } else { geom.length - t };
                        let chi = tip_cutoff(req, disc, x, *tip);
                        let wt = t.powf(beta);
                        let row: f64 = (0..mt)
                            .map(|l| {
                                let f = product(chi, jet_at(a, bn, x, l));
                                // (t∂_t)^k with ∂_t = ±∂_x
                                let d = match kk {
                                    0 => f[0],
                                    1 => t * f[1],
                                    _ => t * f[1] + t * t * f[2],
                                };
                                (wt * d).abs().powf(p)
                            })
                            .sum();
                        acc += gw * row;
                    }
                    acc * (lb - la)
                });
                total_terms.push(alpha * dtheta * sum);
            }
            let sum = pairwise_sum_by(n - 1, |i| {
                let (xa, xb) = (grid.nodes[i], grid.nodes[i + 1]);
                let mut acc = 0.0;
                for &(g, gw) in &GAUSS4 {
                    let x = xa + g * (xb - xa);
                    let c0 = tip_cutoff(req, disc, x, Tip::Start);
                    let c1 = tip_cutoff(req, disc, x, Tip::End);
                    let chi = (1.0 - c0.0 - c1.0, -c0.1 - c1.1, -c0.2 - c1.2);
                    if chi == (0.0, 0.0, 0.0) {
                        continue;
                    }
                    let row: f64 = (0..mt)
                        .map(|l| product(chi, jet_at(i, i + 1, x, l))[kk].abs().powf(p))
                        .sum();
                    acc += gw * geom.psi(x) * row;
                }
                acc * (xb - xa)
            });
            total_terms.push(dtheta * sum);
        }
    }
    Ok(pairwise_sum(&total_terms).powf(1.0 / p))
}

/// Energy, mass, Dirichlet energy and the requested norms of `u`.
pub fn report(disc: &Discretization, u: &Field, requests: &[NormRequest]) -> Result<FunctionalReport> {
    let u = physical(disc, u)?;
    let norms = requests
        .iter()
        .map(|r| Ok((*r, mellin_norm(disc, &u, r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalReport {
        energy: energy(disc, &u)?,
        mass: mass(disc, &u)?,
        grad_sq: grad_sq(disc, &u)?,
        norms,
    })
}

/// Equivalent `H^{1,1}_2 ⊕ ℂ_ω` norm squared: `∫u² dμ_g + ∫⟨∇u,∇u⟩_g dμ_g`.
pub fn h11_norm_sq(disc: &Discretization, u: &Field) -> Result<(f64, f64)> {
    let l2 = integrate_pointwise(disc, u, |x| x * x)?;
    Ok((l2, grad_sq(disc, u)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::Grading;
    use crate::geometry::{build_spindle, volume, CutoffShape};

    fn disc(n: usize, alpha: f64) -> Discretization {
        let g = build_spindle(alpha, alpha, 2.0, 0.5).unwrap();
        Discretization::build(g, n, 8, 1e-3, Grading::LogCollar).unwrap()
    }

    #[test]
    fn energy_of_pure_phases() {
        let d = disc(48, 1.0);
        let one = Field::constant(48, 8, 1.0);
        assert!(energy(&d, &one).unwrap().abs() < 1e-14);
        let zero = Field::zeros(48, 8);
        let vol = volume(&d.geom, &d.grid);
        assert!((energy(&d, &zero).unwrap() - vol / 4.0).abs() < 1e-13);
        assert!((mass(&d, &one).unwrap() - vol).abs() < 1e-13);
    }

    #[test]
    fn eigenvector_energy_is_green() {
        let d = disc(48, 1.0);
        let eps = 1e-2;
        for (m, j) in [(0, 2), (1, 1), (3, 0)] {
            let u = d.eigenmode_field(m, j, eps);
            let lam = d.eigen(m).values[j];
            let l2 = inner(&d, &u, &u).unwrap();
            let g = grad_sq(&d, &u).unwrap();
            assert!((g - (-lam) * l2).abs() <= 1e-10 * g.abs().max(1e-30), "({m},{j})");
        }
    }

    #[test]
    fn pure_modes_have_no_mass() {
        let d = disc(32, 1.0);
        let u = Field::from_fn(&d.grid.nodes, 8, |x, t| x.sin() * (2.0 * t).cos() + (t).sin());
        assert!(mass(&d, &u).unwrap().abs() < 1e-13);
    }

    #[test]
    fn chemical_potential_of_constants() {
        let d = disc(32, 1.0);
        for c in [1.0, 0.0, -1.0, 0.3, 2.0] {
            let j = chemical_potential(&d, &Field::constant(32, 8, c)).unwrap();
            for v in j.physical().unwrap() {
                assert!((v - (c * c * c - c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grad_inner_properties() {
        let d = disc(32, 1.0);
        let u = Field::from_fn(&d.grid.nodes, 8, |x, t| (2.0 * x).cos() + 0.1 * x * x * (1.0 - 0.5 * x).powi(2) * t.cos());
        let v = Field::from_fn(&d.grid.nodes, 8, |x, t| (3.0 * x).sin() * (2.0 * t).sin() + x);
        assert!(grad_inner(&d, &u, &u).unwrap() >= 0.0);
        assert!(grad_inner(&d, &Field::constant(32, 8, 1.0), &v).unwrap().abs() < 1e-12);
        let a = grad_inner(&d, &u, &v).unwrap();
        let b = grad_inner(&d, &v, &u).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        let lv = d.apply_laplacian(&v).unwrap();
        let c = -inner(&d, &u, &lv).unwrap();
        assert!((a - c).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn green_residual_trivial_cases() {
        let d = disc(32, 1.0);
        let one = Field::constant(32, 8, 1.0);
        assert!(green_residual(&d, &one, &one).unwrap() < 1e-12);
        let a = d.eigenmode_field(1, 2, 1.0);
        let b = d.eigenmode_field(2, 1, 1.0);
        assert!(green_residual(&d, &a, &b).unwrap() < 1e-10);
    }

    #[test]
    fn collar_norm_closed_form() {
        // u = x on x < 1/2 with an indicator cutoff: ‖u‖² = 2π ∫ x^4 dx/x = π/32.
        let g = build_spindle(1.0, 1.0, 2.0, 0.6).unwrap();
        let d = Discretization::build(g, 512, 8, 1e-3, Grading::LogCollar).unwrap();
        let u = Field::from_fn(&d.grid.nodes, 8, |x, _| if x < 0.5 { x } else { 0.0 });
        let cutoff = CutoffOmega::new(0.0, 0.5, CutoffShape::Indicator).unwrap();
        let mut req = NormRequest::new(WeightedIndex::new(0.0, 0.0, 2.0).unwrap(), cutoff);
        req.split_constants = false;
        let v = mellin_norm(&d, &u, &req).unwrap();
        let exact = (PI / 32.0).sqrt();
        assert!((v - exact).abs() < 1e-2 * exact, "{v} vs {exact}");
        assert_eq!(mellin_norm(&d, &Field::zeros(512, 8), &req).unwrap(), 0.0);
    }

    #[test]
    fn norm_homogeneity_and_errors() {
        let d = disc(48, 1.0);
        let u = Field::from_fn(&d.grid.nodes, 8, |x, t| (x * 3.0).cos() + 0.2 * (x * (2.0 - x)).powf(1.5) * t.cos());
        let cutoff = CutoffOmega::for_geometry(&d.geom);
        for s in [0.0, 1.0, 2.0] {
            let req = NormRequest::new(WeightedIndex::new(s, -0.5, 2.0).unwrap(), cutoff);
            let a = mellin_norm(&d, &u, &req).unwrap();
            let scaled = Field::from_physical(48, 8, u.physical().unwrap().iter().map(|v| -3.0 * v).collect());
            let b = mellin_norm(&d, &scaled, &req).unwrap();
            assert!((b - 3.0 * a).abs() < 1e-10 * b);
        }
        let bad = NormRequest::new(WeightedIndex::new(1.5, -0.5, 2.0).unwrap(), cutoff);
        assert!(matches!(mellin_norm(&d, &u, &bad), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn norm_grows_with_gamma_for_collar_fields() {
        let d = disc(64, 1.0);
        let u = Field::from_fn(&d.grid.nodes, 8, |x, t| if x < 0.4 { x * (1.0 + 0.3 * t.cos()) } else { 0.0 });
        let cutoff = CutoffOmega::new(0.0, 0.45, CutoffShape::Indicator).unwrap();
        let mut prev = 0.0;
        for gamma in [-0.9, -0.5, 0.0, 0.5] {
            let mut req = NormRequest::new(WeightedIndex::new(1.0, gamma, 2.0).unwrap(), cutoff);
            req.split_constants = false;
            let v = mellin_norm(&d, &u, &req).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sup_bound() {
        let d = disc(64, 0.8);
        let u = Field::constant(64, 8, 0.7);
        assert!(weighted_sup_bound(&d, &u, 1.2, Tip::Start).unwrap() < 1e-12);
    }
}
