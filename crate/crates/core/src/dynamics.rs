//! Linearly-implicit IMEX time stepping of `u′ + Δ²u = Δ(u³ − u)`.
//!
//! One step solves
//! `(I + Δt L² − S Δt L) u_{n+1} = u_n + Δt L (u_n³ − u_n) − S Δt L u_n`
//! in the eigenbasis of each mode operator, where the system is diagonal.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discrete::{Discretization, Field};
use crate::error::{Error, Result};
use crate::functionals::{self, NormRequest};
use crate::geometry::Tip;
use crate::numerics::{linear_fit, solve_tridiagonal};

/// Modal amplitudes below this are treated as noise by [`fit_tip_exponent`].
pub const FIT_FLOOR: f64 = 1e-10;

/// Nodes 4..12 counted from the tip (0-based 3..=11).
pub const DEFAULT_FIT_WINDOW: (usize, usize) = (3, 11);

/// Decay of random eigen-coefficients, `(1 + |Λ|)^{-ROUGHNESS}`.
const ROUGHNESS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Random { amplitude: f64, seed: u64 },
    ModeBump { m: usize, j: usize, amplitude: f64 },
    PurePhasePerturbed { amplitude: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub stabilization: f64,
    pub output_every: usize,
    /// Snapshot cadence in steps; 0 keeps only the final state.
    pub snapshot_every: usize,
    pub initial: InitialCondition,
    pub norm_requests: Vec<NormRequest>,
    /// Modes whose tip exponent is fitted at every output.
    pub fit_modes: Vec<usize>,
    pub fit_window: (usize, usize),
    /// Drop the explicit `Δ(u³ − u)` term (linear test problems).
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            stabilization: 2.0,
            output_every: 10,
            snapshot_every: 0,
            initial: InitialCondition::Random {
                amplitude: 0.1,
                seed: 1,
            },
            norm_requests: Vec::new(),
            fit_modes: vec![1],
            fit_window: DEFAULT_FIT_WINDOW,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        if !(self.stabilization >= 0.0) {
            return Err(Error::Config(format!(
                "stabilization = {} must be nonnegative",
                self.stabilization
            )));
        }
        if self.output_every == 0 {
            return Err(Error::Config("output_every must be at least 1".into()));
        }
        if self.fit_window.0 >= self.fit_window.1 {
            return Err(Error::Config(format!("fit window {:?} is empty", self.fit_window)));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipFit {
    pub t: f64,
    pub m: usize,
    pub rho_hat: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub mass: Vec<f64>,
    pub grad_sq: Vec<f64>,
    pub max_abs: Vec<f64>,
    /// One row per output, one column per norm request.
    pub norms: Vec<Vec<f64>>,
    pub tip_fits: Vec<TipFit>,
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t,energy,mass,grad_sq,norm_…` with one row per output.
    pub fn to_csv(&self, requests: &[NormRequest]) -> String {
        let mut s = String::from("t,energy,mass,grad_sq");
        for r in requests {
            s.push(',');
            s.push_str(&r.column_name());
        }
        s.push('\n');
        for k in 0..self.len() {
            let _ = write!(s, "{},{},{},{}", self.times[k], self.energy[k], self.mass[k], self.grad_sq[k]);
            for v in &self.norms[k] {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn fits_to_csv(&self) -> String {
        let mut s = String::from("t,m,rho_hat,r2\n");
        for f in &self.tip_fits {
            let _ = writeln!(s, "{},{},{},{}", f.t, f.m, f.rho_hat, f.r2);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: Field,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: DiagnosticsSeries,
    pub snapshots: Vec<Snapshot>,
}

/// Eigen-coefficients of every mode: `û_m = V_m c_m`.
pub type Coefficients = Vec<Vec<Complex64>>;

fn zero_coefficients(disc: &Discretization) -> Coefficients {
    vec![vec![Complex64::new(0.0, 0.0); disc.n_radial()]; disc.n_modes()]
}

/// Project a field onto the eigenbasis of every mode.
pub fn project(disc: &Discretization, u: &Field) -> Result<Coefficients> {
    u.check_shape(disc.shape())?;
    let modal = disc.to_modal(u);
    let n = disc.n_radial();
    let nyquist = disc.n_theta / 2;
    Ok(modal
        .modal()
        .expect("modal")
        .par_iter()
        .enumerate()
        .map(|(m, line)| {
            let eig = disc.eigen(m);
            let re: Vec<f64> = line.iter().map(|c| c.re).collect();
            let im: Vec<f64> = line.iter().map(|c| c.im).collect();
            let mut cr = vec![0.0; n];
            let mut ci = vec![0.0; n];
            eig.project(&disc.grid.weights, &re, &mut cr);
            if m != 0 && m != nyquist {
                eig.project(&disc.grid.weights, &im, &mut ci);
            }
            cr.into_iter().zip(ci).map(|(a, b)| Complex64::new(a, b)).collect()
        })
        .collect())
}

/// Physical field from eigen-coefficients.
pub fn reconstruct(disc: &Discretization, c: &Coefficients) -> Field {
    let n = disc.n_radial();
    let lines: Vec<Vec<Complex64>> = c
        .par_iter()
        .enumerate()
        .map(|(m, cm)| {
            let eig = disc.eigen(m);
            let re: Vec<f64> = cm.iter().map(|z| z.re).collect();
            let im: Vec<f64> = cm.iter().map(|z| z.im).collect();
            let mut ur = vec![0.0; n];
            let mut ui = vec![0.0; n];
            eig.reconstruct(&re, &mut ur);
            eig.reconstruct(&im, &mut ui);
            ur.into_iter().zip(ui).map(|(a, b)| Complex64::new(a, b)).collect()
        })
        .collect();
    disc.to_physical(&Field::from_modal(n, disc.n_theta, lines))
}

fn cubic_minus_linear(u: &Field) -> Field {
    let (n, mt) = u.shape();
    let values = u.physical().expect("physical").par_iter().map(|&x| x * x * x - x).collect();
    Field::from_physical(n, mt, values)
}

/// Advance eigen-coefficients by one step given the current physical field.
fn step_coefficients(disc: &Discretization, c: &Coefficients, u: &Field, cfg: &SolverConfig) -> Result<Coefficients> {
    let b = if cfg.nonlinear {
        project(disc, &cubic_minus_linear(u))?
    } else {
        zero_coefficients(disc)
    };
    let (dt, s) = (cfg.dt, cfg.stabilization);
    Ok(c.par_iter()
        .zip(&b)
        .enumerate()
        .map(|(m, (cm, bm))| {
            let lam = &disc.eigen(m).values;
            cm.iter()
                .zip(bm)
                .zip(lam)
                .map(|((&cj, &bj), &l)| {
                    let denom = 1.0 + dt * l * l - s * dt * l;
                    debug_assert!(denom >= 1.0);
                    (cj * (1.0 - s * dt * l) + bj * (dt * l)) / denom
                })
                .collect()
        })
        .collect())
}

/// One IMEX step from a physical field.
pub fn imex_step(disc: &Discretization, u: &Field, cfg: &SolverConfig) -> Result<Field> {
    let u = disc.to_physical(u);
    let c = project(disc, &u)?;
    let next = step_coefficients(disc, &c, &u, cfg)?;
    Ok(reconstruct(disc, &next))
}

/// Time-stepping state held in eigen-coefficients.
#[derive(Debug, Clone)]
pub struct Simulation {
    disc: Arc<Discretization>,
    cfg: SolverConfig,
    coeffs: Coefficients,
    u: Field,
    step: usize,
}

impl Simulation {
    pub fn new(disc: Arc<Discretization>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let u0 = make_initial(&disc, &cfg.initial)?;
        Self::with_field(disc, cfg, &u0)
    }

    pub fn with_field(disc: Arc<Discretization>, cfg: SolverConfig, u0: &Field) -> Result<Self> {
        cfg.validate()?;
        let coeffs = project(&disc, u0)?;
        let u = reconstruct(&disc, &coeffs);
        Ok(Self {
            disc,
            cfg,
            coeffs,
            u,
            step: 0,
        })
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn field(&self) -> &Field {
        &self.u
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    pub fn step(&mut self) -> Result<()> {
        let next = step_coefficients(&self.disc, &self.coeffs, &self.u, &self.cfg)?;
        self.step += 1;
        if next.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step: self.step });
        }
        self.coeffs = next;
        self.u = reconstruct(&self.disc, &self.coeffs);
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        functionals::energy(&self.disc, &self.u).expect("shape is consistent")
    }

    pub fn mass(&self) -> f64 {
        functionals::mass(&self.disc, &self.u).expect("shape is consistent")
    }

    fn record(&self, series: &mut DiagnosticsSeries) -> Result<()> {
        let disc = &self.disc;
        let t = self.time();
        let rep = functionals::report(disc, &self.u, &self.cfg.norm_requests)?;
        series.steps.push(self.step);
        series.times.push(t);
        series.energy.push(rep.energy);
        series.mass.push(rep.mass);
        series.grad_sq.push(rep.grad_sq);
        series
            .max_abs
            .push(self.u.physical().expect("physical").iter().fold(0.0, |a: f64, v| a.max(v.abs())));
        series.norms.push(rep.norms.iter().map(|(_, v)| *v).collect());
        for &m in &self.cfg.fit_modes {
            if m >= disc.n_modes() {
                continue;
            }
            if let Some((rho_hat, r2)) = fit_tip_exponent(disc, &self.u, m, Tip::Start, self.cfg.fit_window)? {
                series.tip_fits.push(TipFit { t, m, rho_hat, r2 });
            }
        }
        Ok(())
    }
}

/// Run to `t_end`, recording diagnostics every `output_every` steps and at the end.
pub fn run(disc: Arc<Discretization>, cfg: &SolverConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(disc, cfg.clone())?;
    run_simulation(&mut sim)
}

pub fn run_simulation(sim: &mut Simulation) -> Result<RunOutput> {
    let n_steps = sim.cfg.n_steps();
    let mut series = DiagnosticsSeries::default();
    let mut snapshots = Vec::new();
    sim.record(&mut series)?;
    let snap = sim.cfg.snapshot_every;
    if snap > 0 {
        snapshots.push(Snapshot {
            step: 0,
            time: 0.0,
            field: sim.u.clone(),
        });
    }
    for k in 1..=n_steps {
        sim.step()?;
        if k % sim.cfg.output_every == 0 || k == n_steps {
            sim.record(&mut series)?;
        }
        if (snap > 0 && k % snap == 0) || k == n_steps {
            snapshots.push(Snapshot {
                step: k,
                time: sim.time(),
                field: sim.u.clone(),
            });
        }
    }
    if n_steps == 0 && snap == 0 {
        snapshots.push(Snapshot {
            step: 0,
            time: 0.0,
            field: sim.u.clone(),
        });
    }
    Ok(RunOutput { series, snapshots })
}

/// Random eigen-coefficients with `(1 + |Λ|)^{-ROUGHNESS}` decay. Each `(mode, part)`
/// owns a ChaCha stream consumed in eigen-index order, so low modes draw the
/// same numbers on every grid.
fn random_coefficients(disc: &Discretization, amplitude: f64, seed: u64) -> Coefficients {
    let nyquist = disc.n_theta / 2;
    (0..disc.n_modes())
        .map(|m| {
            let values = &disc.eigen(m).values;
            let mut parts = [0usize, 1].map(|part| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((2 * m + part) as u64);
                let out: Vec<f64> = values
                    .iter()
                    .map(|l| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        amplitude * z * (1.0 + l.abs()).powf(-ROUGHNESS)
                    })
                    .collect();
                out
            });
            if m == 0 || m == nyquist {
                parts[1].iter_mut().for_each(|v| *v = 0.0);
            }
            let [re, im] = parts;
            re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect()
        })
        .collect()
}

pub fn make_initial(disc: &Discretization, ic: &InitialCondition) -> Result<Field> {
    let (n, mt) = disc.shape();
    match *ic {
        InitialCondition::Random { amplitude, seed } => Ok(reconstruct(disc, &random_coefficients(disc, amplitude, seed))),
        InitialCondition::PurePhasePerturbed { amplitude, seed } => {
            if amplitude == 0.0 {
                return Ok(Field::constant(n, mt, 1.0));
            }
            let mut c = random_coefficients(disc, amplitude, seed);
            // add the constant 1 through the pinned kernel vector
            let total: f64 = disc.grid.weights.iter().sum();
            c[0][0] += Complex64::new(total.sqrt(), 0.0);
            Ok(reconstruct(disc, &c))
        }
        InitialCondition::ModeBump { m, j, amplitude } => {
            if m >= disc.n_modes() || j >= n {
                return Err(Error::Config(format!(
                    "mode_bump ({m}, {j}) outside the {} x {n} eigenbasis",
                    disc.n_modes()
                )));
            }
            Ok(disc.eigenmode_field(m, j, amplitude))
        }
    }
}

/// Singular-branch content at the tips.
///
/// Near a tip the bounded branch of mode `m` reads `A x^μ + C x^{μ+2} + …` with
/// `μ = m/α`. `A` and `C` are fitted from the second and third nodes and the
/// misfit at the innermost node is reported, maximized over modes and tips and
/// divided by the largest modal amplitude.
pub fn tip_closure_residual(disc: &Discretization, u: &Field) -> Result<f64> {
    u.check_shape(disc.shape())?;
    let modal = disc.to_modal(u);
    let lines = modal.modal().expect("modal");
    let scale = lines.iter().flatten().fold(0.0, |a: f64, z| a.max(z.norm()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for tip in Tip::BOTH {
        let idx = [0, 1, 2].map(|k| disc.grid.index_from_tip(k, tip));
        let x = idx.map(|i| disc.geom.tip_distance(disc.grid.nodes[i], tip));
        let alpha = disc.geom.alpha(tip);
        for (m, line) in lines.iter().enumerate() {
            let mu = m as f64 / alpha;
            // basis values x^μ and x^{μ+2} at the three nodes
            let p = x.map(|t| t.powf(mu));
            let q = x.map(|t| t.powf(mu + 2.0));
            let det = p[1] * q[2] - p[2] * q[1];
            let a = (line[idx[1]] * q[2] - line[idx[2]] * q[1]) / det;
            let c = (line[idx[2]] * p[1] - line[idx[1]] * p[2]) / det;
            worst = worst.max((line[idx[0]] - a * p[0] - c * q[0]).norm());
        }
    }
    Ok(worst / scale)
}

/// Least-squares slope of `log|û_m(x_i)|` against `log x_i` over the window of
/// node indices counted from `tip`. `None` if any amplitude is below [`FIT_FLOOR`].
pub fn fit_tip_exponent(
    disc: &Discretization,
    u: &Field,
    m: usize,
    tip: Tip,
    window: (usize, usize),
) -> Result<Option<(f64, f64)>> {
    u.check_shape(disc.shape())?;
    if m >= disc.n_modes() {
        return Err(Error::Config(format!("mode {m} exceeds the angular resolution")));
    }
    let modal = disc.to_modal(u);
    let line = &modal.modal().expect("modal")[m];
    let values: Vec<(f64, f64)> = (0..disc.n_radial())
        .map(|i| {
            let x = disc.geom.tip_distance(disc.grid.nodes[i], tip);
            (x, line[i].norm())
        })
        .collect();
    Ok(fit_power_law(&values, |k| disc.grid.index_from_tip(k, tip), window))
}

/// Fit over samples `(x, |a|)` picked by `index(k)` for `k` in the window.
pub fn fit_power_law(samples: &[(f64, f64)], index: impl Fn(usize) -> usize, window: (usize, usize)) -> Option<(f64, f64)> {
    let (lo, hi) = window;
    if hi >= samples.len() || lo >= hi {
        return None;
    }
    let mut lx = Vec::with_capacity(hi - lo + 1);
    let mut ly = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        let (x, a) = samples[index(k)];
        if !(a >= FIT_FLOOR) {
            return None;
        }
        lx.push(x.ln());
        ly.push(a.ln());
    }
    let (slope, _, r2) = linear_fit(&lx, &ly);
    Some((slope, r2))
}

/// Solve `L_m u = f` for `m ≥ 1` (the operator is negative definite there).
pub fn steady_mode_solve(disc: &Discretization, m: usize, f: &[f64]) -> Result<Vec<f64>> {
    if m == 0 || m >= disc.n_modes() {
        return Err(Error::Config(format!("steady solve needs 1 <= m < {}", disc.n_modes())));
    }
    let (lower, diag, upper) = disc.modes[m].tridiagonal();
    solve_tridiagonal(&lower, &diag, &upper, f)
}
