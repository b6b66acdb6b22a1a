use std::sync::Arc;

use conic_ch::config::RunConfig;
use conic_ch::discrete::{Discretization, Field, Grading};
use conic_ch::dynamics::{imex_step, make_initial, InitialCondition, SolverConfig};
use conic_ch::functionals::{energy, grad_inner, inner, mass};
use conic_ch::geometry::build_spindle;
use conic_ch::indicial::{gamma_window, in_window};
use proptest::prelude::*;

fn disc(alpha: f64, n: usize) -> Arc<Discretization> {
    let g = build_spindle(alpha, alpha, 2.0, 0.5).unwrap();
    Arc::new(Discretization::build(g, n, 8, 1e-3, Grading::LogCollar).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_step_conserves_mass_and_lowers_energy(seed in 0u64..1000, amp in 0.01f64..0.5, dt in 1e-4f64..0.5) {
        let d = disc(1.0, 32);
        let cfg = SolverConfig { dt, ..SolverConfig::default() };
        let u = make_initial(&d, &InitialCondition::Random { amplitude: amp, seed }).unwrap();
        let v = imex_step(&d, &u, &cfg).unwrap();
        let (m0, m1) = (mass(&d, &u).unwrap(), mass(&d, &v).unwrap());
        prop_assert!((m1 - m0).abs() <= 1e-12 * (1.0 + m0.abs()));
        let (e0, e1) = (energy(&d, &u).unwrap(), energy(&d, &v).unwrap());
        prop_assert!(e1 <= e0 + 1e-12 * e0);
    }

    #[test]
    fn dirichlet_form_is_symmetric_and_nonnegative(s1 in 0u64..500, s2 in 0u64..500, alpha in 0.5f64..1.5) {
        let d = disc(alpha, 24);
        let u = make_initial(&d, &InitialCondition::Random { amplitude: 1.0, seed: s1 }).unwrap();
        let v = make_initial(&d, &InitialCondition::Random { amplitude: 1.0, seed: s2 }).unwrap();
        let (uv, vu) = (grad_inner(&d, &u, &v).unwrap(), grad_inner(&d, &v, &u).unwrap());
        prop_assert!((uv - vu).abs() <= 1e-10 * (1.0 + uv.abs()));
        prop_assert!(grad_inner(&d, &u, &u).unwrap() >= 0.0);
    }

    #[test]
    fn laplacian_is_self_adjoint(s1 in 0u64..500, s2 in 0u64..500) {
        let d = disc(0.8, 24);
        let u = make_initial(&d, &InitialCondition::Random { amplitude: 1.0, seed: s1 }).unwrap();
        let v = make_initial(&d, &InitialCondition::Random { amplitude: 1.0, seed: s2 }).unwrap();
        let a = inner(&d, &d.apply_laplacian(&u).unwrap(), &v).unwrap();
        let b = inner(&d, &u, &d.apply_laplacian(&v).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn constants_are_in_the_kernel(c in -2.0f64..2.0, alpha in 0.5f64..1.5) {
        let d = disc(alpha, 24);
        let lu = d.apply_laplacian(&Field::constant(24, 8, c)).unwrap();
        let lu = d.to_physical(&lu);
        prop_assert!(lu.physical().unwrap().iter().all(|x| x.abs() <= 1e-8 * (1.0 + c.abs())));
    }

    #[test]
    fn config_accepts_exactly_the_window(alpha in 0.3f64..3.0, gamma in -1.5f64..1.0) {
        let ov = vec!["--alpha0".to_string(), alpha.to_string(), "--alphaL".into(), alpha.to_string(), "--gamma".into(), gamma.to_string()];
        let accepted = RunConfig::from_sources(None, &ov).is_ok();
        let w = gamma_window(1, -1.0 / (alpha * alpha)).unwrap();
        prop_assert_eq!(accepted, in_window(gamma, w));
    }
}
