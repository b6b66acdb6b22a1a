use std::ffi::{CStr, CString};
use std::ptr;

use conic_ch_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cch_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn simulation_lifecycle() {
    let cfg = CString::new("n_radial = 32\nn_theta = 8\ndt = 0.001\n").unwrap();
    let mut sim = ptr::null_mut();
    unsafe {
        assert_eq!(cch_simulation_new(cfg.as_ptr(), &mut sim), CchStatus::Ok);
        assert!(!sim.is_null());
        let (mut n, mut mt) = (0usize, 0usize);
        assert_eq!(cch_simulation_shape(sim, &mut n, &mut mt), CchStatus::Ok);
        assert_eq!((n, mt), (32, 8));

        let (mut e0, mut m0) = (0.0, 0.0);
        assert_eq!(cch_simulation_energy(sim, &mut e0), CchStatus::Ok);
        assert_eq!(cch_simulation_mass(sim, &mut m0), CchStatus::Ok);
        assert_eq!(cch_simulation_step(sim, 20), CchStatus::Ok);
        let (mut e1, mut m1, mut t) = (0.0, 0.0, 0.0);
        cch_simulation_energy(sim, &mut e1);
        cch_simulation_mass(sim, &mut m1);
        cch_simulation_time(sim, &mut t);
        assert!((t - 0.02).abs() < 1e-12);
        assert!(e1 <= e0);
        assert!((m1 - m0).abs() < 1e-12);

        let mut buf = vec![0.0; n * mt];
        assert_eq!(cch_simulation_field(sim, buf.as_mut_ptr(), buf.len() - 1), CchStatus::BufferTooSmall);
        assert!(last_error().contains("need 256"));
        assert_eq!(cch_simulation_field(sim, buf.as_mut_ptr(), buf.len()), CchStatus::Ok);
        assert!(buf.iter().all(|v| v.is_finite()) && buf.iter().any(|v| *v != 0.0));
        assert_eq!(last_error(), "");
        cch_simulation_free(sim);
    }
}

#[test]
fn defaults_when_config_is_null() {
    let mut sim = ptr::null_mut();
    unsafe {
        assert_eq!(cch_simulation_new(ptr::null(), &mut sim), CchStatus::Ok);
        let (mut n, mut mt) = (0usize, 0usize);
        cch_simulation_shape(sim, &mut n, &mut mt);
        assert_eq!((n, mt), (64, 16));
        cch_simulation_free(sim);
    }
}

#[test]
fn invalid_config_is_a_validation_error() {
    let cfg = CString::new("gamma = 0.5\n").unwrap();
    let mut sim = ptr::null_mut();
    unsafe {
        assert_eq!(cch_simulation_new(cfg.as_ptr(), &mut sim), CchStatus::Validation);
    }
    assert!(sim.is_null());
    assert!(last_error().contains("gamma"));
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(cch_simulation_new(ptr::null(), ptr::null_mut()), CchStatus::NullPointer);
        assert_eq!(cch_simulation_step(ptr::null_mut(), 1), CchStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(cch_simulation_energy(ptr::null(), &mut x), CchStatus::NullPointer);
        assert_eq!(cch_gamma_window(1, -1.0, ptr::null_mut(), &mut x), CchStatus::NullPointer);
        cch_simulation_free(ptr::null_mut());
        cch_string_free(ptr::null_mut());
    }
}

#[test]
fn gamma_window_values() {
    let (mut lo, mut hi) = (0.0, 0.0);
    unsafe {
        assert_eq!(cch_gamma_window(1, -1.5625, &mut lo, &mut hi), CchStatus::Ok);
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 0.25).abs() < 1e-12);
        assert_eq!(cch_gamma_window(2, -2.0, &mut lo, &mut hi), CchStatus::Ok);
        assert!((lo + 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        assert_eq!(cch_gamma_window(1, 1.0, &mut lo, &mut hi), CchStatus::Validation);
    }
}

#[test]
fn indicial_json_round_trip() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(cch_indicial_report_json(1, 1.0, -0.5, &mut s), CchStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        cch_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["delta0_sup"], 0.5);
        assert_eq!(cch_indicial_report_json(3, 1.0, -0.5, &mut s), CchStatus::Validation);
        assert!(s.is_null());
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::path::Path::new(dir).join("include/conic_ch.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cch_simulation_new",
        "cch_simulation_step",
        "cch_simulation_free",
        "cch_simulation_field",
        "cch_gamma_window",
        "cch_indicial_report_json",
        "cch_string_free",
        "cch_last_error_message",
        "typedef struct CchSimulation CchSimulation",
        "CCH_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
        .unwrap();
    assert!(status.success());
}
