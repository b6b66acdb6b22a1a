//! Acceptance gates. Runs without the libtest harness so that every criterion
//! prints one PASS/FAIL line; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use conic_ch::cli;
use conic_ch::discrete::{Discretization, Field, Grading};
use conic_ch::dynamics::{self, fit_tip_exponent, steady_mode_solve, InitialCondition, Simulation, SolverConfig, DEFAULT_FIT_WINDOW};
use conic_ch::functionals::{self, mellin_norm, NormRequest};
use conic_ch::geometry::{build_spindle, volume, CrossSectionSpectrum, CutoffOmega, Tip};
use conic_ch::indicial::{self, gamma_window, q_delta, WeightedIndex};
use conic_ch::verification as oracle;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn indicial_exactness() -> Outcome {
    let mut bad = Vec::new();
    for (n, l1, want) in [(1, -1.0, (-1.0, 0.0)), (1, -1.5625, (-1.0, 0.25)), (2, -2.0, (-0.5, 0.5))] {
        let w = gamma_window(n, l1).unwrap();
        if !(close(w.0, want.0, 1e-12) && close(w.1, want.1, 1e-12)) {
            bad.push(format!("window({n},{l1}) = {w:?}"));
        }
    }
    let roots = q_delta(2, &CrossSectionSpectrum::sphere(10).unwrap()).unwrap();
    for j in 0..=10usize {
        let lam = -((j * (j + 1)) as f64);
        let mut pair: Vec<f64> = roots.iter().filter(|r| r.source_lambda == lam).map(|r| r.value).collect();
        pair.sort_by(f64::total_cmp);
        if pair.len() != 2 || !close(pair[0], -(j as f64), 1e-12) || !close(pair[1], j as f64 + 1.0, 1e-12) {
            bad.push(format!("j={j}: {pair:?}"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "3 windows, 11 root pairs exact".into() } else { bad.join("; ") })
}

fn delta0_ledger() -> Outcome {
    let spec = indicial::circle_spectrum_for(1.0, -0.5).unwrap();
    let rep = indicial::report(1, &spec, -0.5).unwrap();
    let rhos: Vec<f64> = rep.terms.iter().map(|t| t.rho).collect();
    let pass = rhos == [-2.0, -1.0] && rep.delta0_sup == 0.5;
    outcome(pass, format!("terms {rhos:?}, delta0 sup {}", rep.delta0_sup))
}

fn oracle_equivalence() -> Outcome {
    let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
    let d = Discretization::build(g.clone(), 24, 8, 1e-3, Grading::LogCollar).unwrap();
    let dense = oracle::dense_assemble(&g, &d.grid, 8).unwrap();
    let spec = oracle::oracle_compare_spectra(&dense, &d).unwrap();
    let action = oracle::oracle_compare_action(&dense, &d, 100, 11).unwrap();
    outcome(spec <= 1e-8 && action <= 1e-10, format!("spectra {spec:.2e} (<= 1e-8), action {action:.2e} (<= 1e-10)"))
}

fn green_frechet() -> Outcome {
    let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
    let green = oracle::green_convergence(&g, &[32, 64, 128], 8, 1e-3, Grading::LogCollar).unwrap();
    let d = Discretization::build(g, 64, 16, 1e-3, Grading::LogCollar).unwrap();
    let (n, mt) = d.shape();
    let sum = |fs: &[Field], c: f64| {
        let mut v = vec![c; n * mt];
        for f in fs {
            for (a, b) in v.iter_mut().zip(f.physical().unwrap()) {
                *a += b;
            }
        }
        Field::from_physical(n, mt, v)
    };
    let u = sum(&[d.eigenmode_field(0, 1, 0.3), d.eigenmode_field(1, 0, 0.2), d.eigenmode_field(3, 1, 0.1)], 0.1);
    let v = sum(&[d.eigenmode_field(0, 2, 0.5), d.eigenmode_field(2, 0, 0.3)], 0.0);
    let fr = oracle::frechet_check(&d, &u, &v, &[0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625]).unwrap();
    outcome(
        green.order >= 1.8 && close(fr.order, 2.0, 0.2),
        format!("green order {:.3} (>= 1.8), frechet order {:.4} (2 +- 0.2)", green.order, fr.order),
    )
}

/// Geometry with an unstable mode-1 band, used for the dynamical criteria.
fn long_spindle(n: usize) -> Arc<Discretization> {
    let g = build_spindle(0.8, 0.8, 6.0, 0.5).unwrap();
    Arc::new(Discretization::build(g, n, 16, 1e-3, Grading::LogCollar).unwrap())
}

fn conservation(dt: f64) -> (bool, String) {
    let d = long_spindle(64);
    let cfg = SolverConfig {
        dt,
        t_end: 10_000.0 * dt,
        output_every: 1,
        initial: InitialCondition::Random { amplitude: 0.1, seed: 1 },
        ..SolverConfig::default()
    };
    let mut sim = Simulation::new(d.clone(), cfg).unwrap();
    let u0 = sim.field().clone();
    let out = dynamics::run_simulation(&mut sim).unwrap();
    let e = &out.series.energy;
    let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max) / e[0];
    let drift = cli::relative_mass_drift(&d, &u0, &out.series.mass).unwrap();
    let steps = out.series.len() - 1;
    (
        steps == 10_000 && drift <= 1e-8 && rise <= 1e-8,
        format!("dt {dt}: {steps} steps, mass drift {drift:.2e}, max rise {rise:.2e}·Phi0"),
    )
}

fn conservation_dissipation() -> Outcome {
    let start = Instant::now();
    let d = long_spindle(64);
    let base = SolverConfig {
        initial: InitialCondition::Random { amplitude: 0.1, seed: 1 },
        ..SolverConfig::default()
    };
    let u0 = dynamics::make_initial(&d, &base.initial).unwrap();
    let scan = oracle::energy_stability_scan(&d, &u0, &base, &[1e-3, 1e-2, 1e-1, 1.0], 100, 1e-8).unwrap();
    let threshold = scan.threshold.unwrap_or(0.0);
    let mut pass = threshold >= base.dt;
    let mut parts = vec![format!("scan threshold {threshold}")];
    for dt in [base.dt, threshold] {
        if dt > 0.0 {
            let (ok, msg) = conservation(dt);
            pass &= ok;
            parts.push(msg);
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    parts.push(format!("{:.1}s", elapsed.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

fn tip_asymptotics() -> Outcome {
    let d = long_spindle(64);
    let f: Vec<f64> = d
        .grid
        .nodes
        .iter()
        .map(|&x| {
            let s = (x - 1.0) / 0.3;
            if s.abs() < 1.0 {
                (1.0 - s * s).powi(2)
            } else {
                0.0
            }
        })
        .collect();
    let sol = steady_mode_solve(&d, 1, &f).unwrap();
    let samples: Vec<(f64, f64)> = d.grid.nodes.iter().zip(&sol).map(|(&x, v)| (x, v.abs())).collect();
    let steady = dynamics::fit_power_law(&samples, |k| d.grid.index_from_tip(k, Tip::Start), DEFAULT_FIT_WINDOW);

    let cfg = SolverConfig {
        t_end: 1.0,
        output_every: 1000,
        initial: InitialCondition::Random { amplitude: 0.1, seed: 1 },
        ..SolverConfig::default()
    };
    let out = dynamics::run(d.clone(), &cfg).unwrap();
    let u = &out.snapshots.last().unwrap().field;
    let evolved = fit_tip_exponent(&d, u, 1, Tip::Start, DEFAULT_FIT_WINDOW).unwrap();
    let pass = match (steady, evolved) {
        (Some((rs, _)), Some((re, r2))) => close(rs, 1.25, 0.05 * 1.25) && close(re, 1.25, 0.10 * 1.25) && r2 >= 0.99,
        _ => false,
    };
    outcome(pass, format!("steady (rho_hat, r2) {steady:?}; evolved at t=1 {evolved:?}"))
}

fn smoothing() -> Outcome {
    let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
    let gamma = -0.5;
    let req = NormRequest::new(WeightedIndex::new(2.0, gamma + 2.0, 2.0).unwrap(), CutoffOmega::for_geometry(&g));
    let mut at = [[0.0; 2]; 2];
    for (k, n) in [64, 128].into_iter().enumerate() {
        let d = Arc::new(Discretization::build(g.clone(), n, 16, 1e-3, Grading::LogCollar).unwrap());
        let cfg = SolverConfig {
            t_end: 0.1,
            output_every: 100,
            initial: InitialCondition::Random { amplitude: 0.1, seed: 1 },
            ..SolverConfig::default()
        };
        let mut sim = Simulation::new(d.clone(), cfg.clone()).unwrap();
        at[0][k] = mellin_norm(&d, sim.field(), &req).unwrap();
        for _ in 0..cfg.n_steps() {
            sim.step().unwrap();
        }
        at[1][k] = mellin_norm(&d, sim.field(), &req).unwrap();
    }
    let change = |v: [f64; 2]| (v[1] - v[0]).abs() / v[0];
    let (c0, c1) = (change(at[0]), change(at[1]));
    outcome(
        c1 <= 0.05 && c0 >= 0.5,
        format!(
            "t=0: {:.4} -> {:.4} ({:.1}%, >= 50%); t=0.1: {:.4} -> {:.4} ({:.2}%, <= 5%)",
            at[0][0],
            at[0][1],
            100.0 * c0,
            at[1][0],
            at[1][1],
            100.0 * c1
        ),
    )
}

fn long_time() -> Outcome {
    let d = long_spindle(64);
    let cfg = SolverConfig {
        dt: 1e-2,
        t_end: 50.0,
        initial: InitialCondition::Random { amplitude: 0.1, seed: 1 },
        ..SolverConfig::default()
    };
    let vol = volume(&d.geom, &d.grid);
    let mut sim = Simulation::new(d.clone(), cfg.clone()).unwrap();
    let u0: Field = sim.field().clone();
    let phi0 = sim.energy();
    let m0 = functionals::mass(&d, &u0).unwrap();
    let scale = m0.abs().max(functionals::integrate_pointwise(&d, &u0, f64::abs).unwrap());
    let l2_cap = vol.sqrt() * (4.0 * phi0).sqrt() + vol;
    let (mut worst_grad, mut worst_l2, mut worst_e, mut worst_m) = (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..cfg.n_steps() {
        sim.step().unwrap();
        let (l2, grad) = functionals::h11_norm_sq(&d, sim.field()).unwrap();
        worst_grad = worst_grad.max(grad / (2.0 * phi0));
        worst_l2 = worst_l2.max(l2 / l2_cap);
        worst_e = worst_e.max(sim.energy() / phi0);
        worst_m = worst_m.max((sim.mass() - m0).abs() / scale);
    }
    outcome(
        worst_grad <= 1.0 && worst_l2 <= 1.0 && worst_e <= 1.0 && worst_m <= 1e-8,
        format!(
            "t={:.1}: max grad^2/(2Phi0) {worst_grad:.3}, max |u|^2/cap {worst_l2:.3}, max Phi/Phi0 {worst_e:.3}, mass drift {worst_m:.2e}",
            sim.time()
        ),
    )
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut csv = Vec::new();
    for dir in &dirs {
        let args = [
            "conic-ch",
            "simulate",
            "--t_end",
            "0.2",
            "--initial.seed",
            "42",
            "--out_dir",
            dir.path().to_str().unwrap(),
        ];
        let code = cli::run(args, &mut std::io::sink(), &mut std::io::sink());
        assert_eq!(code, 0);
        csv.push((
            std::fs::read(dir.path().join("series.csv")).unwrap(),
            std::fs::read(dir.path().join("fits.csv")).unwrap(),
        ));
    }
    let same = csv[0] == csv[1];
    outcome(same, format!("series.csv {} bytes, identical: {same}", csv[0].0.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 indicial exactness", indicial_exactness),
        ("2 delta0 ledger", delta0_ledger),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 green/frechet orders", green_frechet),
        ("5 conservation and dissipation", conservation_dissipation),
        ("6 tip asymptotics", tip_asymptotics),
        ("7 smoothing", smoothing),
        ("8 long-time bounds", long_time),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} [{:.2}s]", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
