//! Subcommand dispatch for the `conic-ch` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::discrete::{Discretization, Field, Grading};
use crate::dynamics::{self, tip_closure_residual, InitialCondition, RunOutput, Simulation, SolverConfig};
use crate::error::{Error, Result};
use crate::functionals;
use crate::geometry::build_spindle;
use crate::indicial;
use crate::verification as oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "conic-ch", version, about = "Cahn-Hilliard flow on spindle surfaces with conical tips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Indicial roots, γ window and asymptotic terms of a model cone, as JSON.
    Indicial {
        /// Dimension of the cross-section (1: circle of length 2πα, 2: round sphere).
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Evolve a run configuration; writes series.csv, fits.csv and snapshots to out_dir.
    Simulate(RunArgs),
    /// Run the oracle suite on small grids and print a JSON pass/fail report.
    Verify(RunArgs),
    /// Evolve and print the tip exponent fits as CSV (t, m, rho_hat, r2).
    FitAsymptotics(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides as `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Indicial { n, alpha, gamma } => cmd_indicial(n, alpha, gamma, out),
        Command::Simulate(a) => load(&a).and_then(|c| cmd_simulate(&c, out)),
        Command::Verify(a) => load(&a).and_then(|c| cmd_verify(&c, out)),
        Command::FitAsymptotics(a) => load(&a).and_then(|c| cmd_fit(&c, out)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn load(a: &RunArgs) -> Result<RunConfig> {
    let text = match &a.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?),
        None => None,
    };
    RunConfig::from_sources(text.as_deref(), &a.overrides)
}

#[derive(Serialize)]
struct IndicialOutput {
    n: u32,
    alpha: Option<f64>,
    gamma: f64,
    #[serde(flatten)]
    report: indicial::IndicialReport,
}

fn cmd_indicial(n: u32, alpha: f64, gamma: f64, out: &mut dyn Write) -> Result<i32> {
    let report = indicial::cone_report(n, alpha, gamma)?;
    let alpha = (n == 1).then_some(alpha);
    let text = serde_json::to_string_pretty(&IndicialOutput { n, alpha, gamma, report }).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(EXIT_OK)
}

fn simulate(cfg: &RunConfig) -> Result<(Arc<Discretization>, SolverConfig, Field, RunOutput)> {
    let disc = Arc::new(cfg.discretization()?);
    let solver = cfg.solver()?;
    let mut sim = Simulation::new(disc.clone(), solver.clone())?;
    let u0 = sim.field().clone();
    let run = dynamics::run_simulation(&mut sim)?;
    Ok((disc, solver, u0, run))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

#[derive(Serialize)]
struct SnapshotMeta<'a> {
    step: usize,
    time: f64,
    n_radial: usize,
    n_theta: usize,
    layout: &'static str,
    alpha0: f64,
    alpha_l: f64,
    length: f64,
    collar_width: f64,
    x_min: f64,
    grading: String,
    nodes: &'a [f64],
}

fn write_snapshots(dir: &Path, cfg: &RunConfig, disc: &Discretization, run: &RunOutput) -> Result<()> {
    for s in &run.snapshots {
        let field = disc.to_physical(&s.field);
        let values = field.physical().expect("physical after transform");
        let mut bytes = Vec::with_capacity(values.len() * 8);
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let stem = format!("snapshot_{:08}", s.step);
        write_file(dir, &format!("{stem}.bin"), &bytes)?;
        let meta = SnapshotMeta {
            step: s.step,
            time: s.time,
            n_radial: disc.n_radial(),
            n_theta: disc.n_theta,
            layout: "f64 little-endian, row-major [radial node][theta index], theta_l = 2*pi*l/n_theta",
            alpha0: cfg.alpha0,
            alpha_l: cfg.alpha_l,
            length: cfg.length,
            collar_width: cfg.collar_width,
            x_min: cfg.x_min,
            grading: cfg.grading.to_string(),
            nodes: &disc.grid.nodes,
        };
        let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
        write_file(dir, &format!("{stem}.json"), json.as_bytes())?;
    }
    Ok(())
}

/// Mass drift relative to `max(|m₀|, ‖u₀‖_{L¹})`.
pub fn relative_mass_drift(disc: &Discretization, u0: &Field, masses: &[f64]) -> Result<f64> {
    let m0 = functionals::mass(disc, u0)?;
    let scale = m0.abs().max(functionals::integrate_pointwise(disc, u0, f64::abs)?);
    Ok(masses.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / scale)
}

#[derive(Serialize)]
struct SimulateSummary {
    steps: usize,
    t_end: f64,
    energy_initial: f64,
    energy_final: f64,
    relative_mass_drift: f64,
    out_dir: String,
}

fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (disc, solver, u0, run) = simulate(cfg)?;
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir)?;
    write_file(dir, "config.resolved", cfg.echo().as_bytes())?;
    write_file(dir, "series.csv", run.series.to_csv(&solver.norm_requests).as_bytes())?;
    write_file(dir, "fits.csv", run.series.fits_to_csv().as_bytes())?;
    write_snapshots(dir, cfg, &disc, &run)?;
    let s = &run.series;
    let summary = SimulateSummary {
        steps: solver.n_steps(),
        t_end: *s.times.last().unwrap_or(&0.0),
        energy_initial: s.energy[0],
        energy_final: *s.energy.last().unwrap(),
        relative_mass_drift: relative_mass_drift(&disc, &u0, &s.mass)?,
        out_dir: dir.display().to_string(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(EXIT_OK)
}

fn cmd_fit(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (_, _, _, run) = simulate(cfg)?;
    let csv = run.series.fits_to_csv();
    fs::create_dir_all(&cfg.out_dir)?;
    write_file(&cfg.out_dir, "config.resolved", cfg.echo().as_bytes())?;
    write_file(&cfg.out_dir, "fits.csv", csv.as_bytes())?;
    write!(out, "{csv}")?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule, e.g. `<= 1e-8`.
    pub rule: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn at_most(name: &str, value: f64, limit: f64) -> Check {
    Check {
        name: name.into(),
        value,
        rule: format!("<= {limit:e}"),
        pass: value <= limit,
    }
}

fn at_least(name: &str, value: f64, limit: f64) -> Check {
    Check {
        name: name.into(),
        value,
        rule: format!(">= {limit}"),
        pass: value >= limit,
    }
}

fn add(a: &Field, b: &Field, c: f64) -> Field {
    let (n, mt) = a.shape();
    let (pa, pb) = (a.physical().unwrap(), b.physical().unwrap());
    Field::from_physical(n, mt, pa.iter().zip(pb).map(|(x, y)| c + x + y).collect())
}

/// The oracle suite behind `verify`: dense-operator equivalence, Green and
/// Fréchet consistency, dissipation order, tip closure and a short
/// conservation run, all on small grids of the configured geometry.
pub fn verify_suite(cfg: &RunConfig) -> Result<VerifyReport> {
    let geom = cfg.geometry()?;
    let mut checks = Vec::new();

    let small = Discretization::build(geom.clone(), 24, 8, cfg.x_min, cfg.grading)?;
    let dense = oracle::dense_assemble(&geom, &small.grid, 8)?;
    checks.push(at_most("dense_symmetry_residual", dense.symmetry_residual(), 1e-10));
    checks.push(at_most("spectra_max_rel_err", oracle::oracle_compare_spectra(&dense, &small)?, 1e-8));
    checks.push(at_most("mode0_max_rel_err", oracle::oracle_compare_mode(&small, 0), 1e-10));
    checks.push(at_most("action_max_rel_err_100_fields", oracle::oracle_compare_action(&dense, &small, 100, 7)?, 1e-10));

    // the manufactured pair needs the closures of an α = 1 tip
    let unit = build_spindle(1.0, 1.0, cfg.length, cfg.collar_width)?;
    let green = oracle::green_convergence(&unit, &[32, 64, 128], 8, cfg.x_min, Grading::LogCollar)?;
    checks.push(at_least("green_residual_order", green.order, 1.8));

    let d = Discretization::build(geom.clone(), 64, 16, cfg.x_min, cfg.grading)?;
    let u = add(&d.eigenmode_field(0, 1, 0.3), &d.eigenmode_field(1, 0, 0.2), 0.2);
    let v = add(&d.eigenmode_field(0, 2, 0.5), &d.eigenmode_field(2, 0, 0.3), 0.0);
    let fr = oracle::frechet_check(&d, &u, &v, &[0.2, 0.1, 0.05, 0.025, 0.0125])?;
    checks.push(Check {
        name: "frechet_order".into(),
        value: fr.order,
        rule: "2 +- 0.2".into(),
        pass: (fr.order - 2.0).abs() <= 0.2,
    });

    let base = SolverConfig {
        stabilization: cfg.stabilization,
        ..SolverConfig::default()
    };
    let diss = oracle::dissipation_check(&d, &u, &base, &[1e-5, 1e-6, 1e-7, 1e-8])?;
    checks.push(at_least("dissipation_order", diss.order, 1.0));
    let (n, mt) = d.shape();
    let eq = oracle::dissipation_check(&d, &Field::constant(n, mt, 1.0), &base, &[1e-2, 1e-3])?;
    checks.push(at_most("dissipation_at_equilibrium", eq.residuals.iter().cloned().fold(0.0, f64::max), 1e-20));

    let d32 = Discretization::build(geom, 32, 8, cfg.x_min, cfg.grading)?;
    let bump = dynamics::make_initial(&d32, &InitialCondition::ModeBump { m: 1, j: 2, amplitude: 0.1 })?;
    checks.push(at_most("tip_closure_residual_bump", tip_closure_residual(&d32, &bump)?, 1e-8));

    let short = SolverConfig {
        dt: cfg.dt,
        t_end: 200.0 * cfg.dt,
        stabilization: cfg.stabilization,
        output_every: 1,
        initial: InitialCondition::Random { amplitude: 0.1, seed: cfg.initial_seed },
        norm_requests: Vec::new(),
        ..SolverConfig::default()
    };
    let d = Arc::new(d);
    let mut sim = Simulation::new(d.clone(), short)?;
    let u0 = sim.field().clone();
    let run = dynamics::run_simulation(&mut sim)?;
    let e = &run.series.energy;
    let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max) / e[0].abs();
    checks.push(at_most("energy_max_rise_relative", rise, 1e-8));
    checks.push(at_most("mass_drift_relative", relative_mass_drift(&d, &u0, &run.series.mass)?, 1e-8));

    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { checks, pass })
}

fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let report = verify_suite(cfg)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(if report.pass { EXIT_OK } else { EXIT_RUNTIME })
}
