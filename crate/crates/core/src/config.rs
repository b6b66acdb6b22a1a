//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::discrete::{Discretization, Grading};
use crate::dynamics::{InitialCondition, SolverConfig, DEFAULT_FIT_WINDOW};
use crate::error::{Error, Result};
use crate::functionals::NormRequest;
use crate::geometry::{build_spindle, CutoffOmega, SpindleGeometry};
use crate::indicial::{gamma_window, in_window, WeightedIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialKind {
    Random,
    ModeBump,
    PurePhasePerturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha0: f64,
    pub alpha_l: f64,
    pub length: f64,
    pub collar_width: f64,
    pub n_radial: usize,
    pub n_theta: usize,
    pub x_min: f64,
    pub grading: Grading,
    pub dt: f64,
    pub t_end: f64,
    pub stabilization: f64,
    pub output_every: usize,
    pub snapshot_every: usize,
    pub initial_kind: InitialKind,
    pub initial_amplitude: f64,
    pub initial_seed: u64,
    pub initial_m: usize,
    pub initial_j: usize,
    pub gamma: f64,
    /// `(s, γ, p)` triples.
    pub norms: Vec<(f64, f64, f64)>,
    pub fit_modes: Vec<usize>,
    pub fit_window: (usize, usize),
    pub out_dir: PathBuf,
    pub format: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            alpha_l: 1.0,
            length: 2.0,
            collar_width: 0.5,
            n_radial: 64,
            n_theta: 16,
            x_min: 1e-3,
            grading: Grading::LogCollar,
            dt: 1e-3,
            t_end: 1.0,
            stabilization: 2.0,
            output_every: 10,
            snapshot_every: 0,
            initial_kind: InitialKind::Random,
            initial_amplitude: 0.1,
            initial_seed: 1,
            initial_m: 1,
            initial_j: 0,
            gamma: -0.5,
            norms: vec![(1.0, -0.5, 2.0), (2.0, 1.5, 2.0)],
            fit_modes: vec![1],
            fit_window: DEFAULT_FIT_WINDOW,
            out_dir: PathBuf::from("out"),
            format: "csv".into(),
        }
    }
}

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "alpha0",
    "alphaL",
    "length",
    "collar_width",
    "n_radial",
    "n_theta",
    "x_min",
    "grading",
    "dt",
    "t_end",
    "stabilization",
    "output_every",
    "snapshot_every",
    "initial.kind",
    "initial.amplitude",
    "initial.seed",
    "initial.m",
    "initial.j",
    "gamma",
    "norms",
    "fit.modes",
    "fit.window",
    "out_dir",
    "format",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {raw:?}", lineno + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Turn `--key value` / `--key=value` pairs into a map.
pub fn parse_overrides(args: &[String]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key value, got {a:?}")))?;
        if let Some((k, v)) = key.split_once('=') {
            map.insert(k.to_string(), v.to_string());
        } else {
            let v = it
                .next()
                .ok_or_else(|| Error::Config(format!("--{key} needs a value")))?;
            map.insert(key.to_string(), v.clone());
        }
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Option<Vec<T>> {
    v.split(',').map(|s| s.trim().parse().ok()).collect()
}

impl RunConfig {
    /// Defaults, then the file entries, then the overrides; all violations are
    /// collected into one error.
    pub fn from_sources(file: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut entries = match file {
            Some(text) => parse_key_values(text)?,
            None => BTreeMap::new(),
        };
        entries.extend(parse_overrides(overrides)?);
        let mut cfg = RunConfig::default();
        let mut errors = Vec::new();
        for (k, v) in &entries {
            if let Err(e) = cfg.set(k, v) {
                errors.push(e);
            }
        }
        errors.extend(cfg.violations());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errors.join("; ")))
        }
    }

    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str, what: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("{key}: expected {what}, got {v:?}"))
        }
        match key {
            "alpha0" => self.alpha0 = num(key, v, "a positive number")?,
            "alphaL" => self.alpha_l = num(key, v, "a positive number")?,
            "length" => self.length = num(key, v, "a positive number")?,
            "collar_width" => self.collar_width = num(key, v, "a positive number")?,
            "n_radial" => self.n_radial = num(key, v, "an integer >= 16")?,
            "n_theta" => self.n_theta = num(key, v, "a power of two")?,
            "x_min" => self.x_min = num(key, v, "a number in (0, collar_width)")?,
            "grading" => self.grading = v.parse().map_err(|_| format!("grading: expected log-collar or uniform, got {v:?}"))?,
            "dt" => self.dt = num(key, v, "a positive number")?,
            "t_end" => self.t_end = num(key, v, "a nonnegative number")?,
            "stabilization" => self.stabilization = num(key, v, "a nonnegative number")?,
            "output_every" => self.output_every = num(key, v, "a positive integer")?,
            "snapshot_every" => self.snapshot_every = num(key, v, "a nonnegative integer")?,
            "initial.kind" => {
                self.initial_kind = match v {
                    "random" => InitialKind::Random,
                    "mode_bump" => InitialKind::ModeBump,
                    "pure_phase_perturbed" => InitialKind::PurePhasePerturbed,
                    _ => {
                        return Err(format!(
                            "initial.kind: expected random, mode_bump or pure_phase_perturbed, got {v:?}"
                        ))
                    }
                }
            }
            "initial.amplitude" => self.initial_amplitude = num(key, v, "a number")?,
            "initial.seed" => self.initial_seed = num(key, v, "an unsigned integer")?,
            "initial.m" => self.initial_m = num(key, v, "a mode index")?,
            "initial.j" => self.initial_j = num(key, v, "an eigen index")?,
            "gamma" => self.gamma = num(key, v, "a number")?,
            "norms" => {
                let mut out = Vec::new();
                for triple in v.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                    let vals: Vec<f64> = parse_list(triple).ok_or_else(|| format!("norms: cannot parse {triple:?}"))?;
                    if vals.len() != 3 {
                        return Err(format!("norms: expected s,gamma,p triples separated by ';', got {triple:?}"));
                    }
                    out.push((vals[0], vals[1], vals[2]));
                }
                self.norms = out;
            }
            "fit.modes" => self.fit_modes = parse_list(v).ok_or_else(|| format!("fit.modes: expected a list of integers, got {v:?}"))?,
            "fit.window" => {
                let w: Vec<usize> = parse_list(v).ok_or_else(|| format!("fit.window: expected lo,hi, got {v:?}"))?;
                if w.len() != 2 {
                    return Err(format!("fit.window: expected lo,hi, got {v:?}"));
                }
                self.fit_window = (w[0], w[1]);
            }
            "out_dir" => self.out_dir = PathBuf::from(v),
            "format" => self.format = v.to_string(),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// γ window of the cone with the larger opening, `λ₁ = −1/max(α₀, α_L)²`.
    pub fn gamma_window(&self) -> Result<(f64, f64)> {
        let a = self.alpha0.max(self.alpha_l);
        gamma_window(1, -1.0 / (a * a))
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = build_spindle(self.alpha0, self.alpha_l, self.length, self.collar_width) {
            out.push(format!("geometry (alpha0, alphaL, length, collar_width): {e}"));
        } else if !(self.x_min > 0.0 && self.x_min < self.collar_width) {
            out.push(format!("x_min: {} must lie in (0, {})", self.x_min, self.collar_width));
        }
        if self.n_radial < 16 {
            out.push(format!("n_radial: {} must be at least 16", self.n_radial));
        }
        if self.n_theta < 2 || !self.n_theta.is_power_of_two() {
            out.push(format!("n_theta: {} must be a power of two >= 2", self.n_theta));
        }
        if !(self.dt > 0.0) {
            out.push(format!("dt: {} must be positive", self.dt));
        }
        if !(self.t_end >= 0.0) {
            out.push(format!("t_end: {} must be nonnegative", self.t_end));
        }
        if !(self.stabilization >= 0.0) {
            out.push(format!("stabilization: {} must be nonnegative", self.stabilization));
        }
        if self.output_every == 0 {
            out.push("output_every: must be at least 1".into());
        }
        if self.alpha0 > 0.0 && self.alpha_l > 0.0 {
            match self.gamma_window() {
                Ok(w) if !in_window(self.gamma, w) => out.push(format!(
                    "gamma: {} outside the admissible window ({}, {})",
                    self.gamma, w.0, w.1
                )),
                Err(e) => out.push(format!("gamma: {e}")),
                _ => {}
            }
        }
        for &(s, g, p) in &self.norms {
            if let Err(e) = WeightedIndex::new(s, g, p) {
                out.push(format!("norms: {e}"));
            } else if !(s == 0.0 || s == 1.0 || s == 2.0) {
                out.push(format!("norms: s = {s} must be 0, 1 or 2"));
            }
        }
        if self.fit_window.0 >= self.fit_window.1 || self.fit_window.1 >= self.n_radial / 2 {
            out.push(format!(
                "fit.window: ({}, {}) must satisfy lo < hi < n_radial/2",
                self.fit_window.0, self.fit_window.1
            ));
        }
        if self.fit_modes.iter().any(|&m| m > self.n_theta / 2) {
            out.push(format!("fit.modes: every mode must be <= n_theta/2 = {}", self.n_theta / 2));
        }
        if self.format != "csv" {
            out.push(format!("format: only csv is supported, got {:?}", self.format));
        }
        out
    }

    pub fn geometry(&self) -> Result<SpindleGeometry> {
        build_spindle(self.alpha0, self.alpha_l, self.length, self.collar_width)
    }

    pub fn discretization(&self) -> Result<Discretization> {
        Discretization::build(self.geometry()?, self.n_radial, self.n_theta, self.x_min, self.grading)
    }

    pub fn norm_requests(&self) -> Result<Vec<NormRequest>> {
        let cutoff = CutoffOmega::for_geometry(&self.geometry()?);
        self.norms
            .iter()
            .map(|&(s, g, p)| Ok(NormRequest::new(WeightedIndex::new(s, g, p)?, cutoff)))
            .collect()
    }

    pub fn initial(&self) -> InitialCondition {
        match self.initial_kind {
            InitialKind::Random => InitialCondition::Random {
                amplitude: self.initial_amplitude,
                seed: self.initial_seed,
            },
            InitialKind::PurePhasePerturbed => InitialCondition::PurePhasePerturbed {
                amplitude: self.initial_amplitude,
                seed: self.initial_seed,
            },
            InitialKind::ModeBump => InitialCondition::ModeBump {
                m: self.initial_m,
                j: self.initial_j,
                amplitude: self.initial_amplitude,
            },
        }
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        Ok(SolverConfig {
            dt: self.dt,
            t_end: self.t_end,
            stabilization: self.stabilization,
            output_every: self.output_every,
            snapshot_every: self.snapshot_every,
            initial: self.initial(),
            norm_requests: self.norm_requests()?,
            fit_modes: self.fit_modes.clone(),
            fit_window: self.fit_window,
            nonlinear: true,
        })
    }

    /// The fully resolved configuration in the input format.
    pub fn echo(&self) -> String {
        let kind = match self.initial_kind {
            InitialKind::Random => "random",
            InitialKind::ModeBump => "mode_bump",
            InitialKind::PurePhasePerturbed => "pure_phase_perturbed",
        };
        let norms = self
            .norms
            .iter()
            .map(|(s, g, p)| format!("{s},{g},{p}"))
            .collect::<Vec<_>>()
            .join(";");
        let modes = self.fit_modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        let values = [
            self.alpha0.to_string(),
            self.alpha_l.to_string(),
            self.length.to_string(),
            self.collar_width.to_string(),
            self.n_radial.to_string(),
            self.n_theta.to_string(),
            self.x_min.to_string(),
            self.grading.to_string(),
            self.dt.to_string(),
            self.t_end.to_string(),
            self.stabilization.to_string(),
            self.output_every.to_string(),
            self.snapshot_every.to_string(),
            kind.to_string(),
            self.initial_amplitude.to_string(),
            self.initial_seed.to_string(),
            self.initial_m.to_string(),
            self.initial_j.to_string(),
            self.gamma.to_string(),
            norms,
            modes,
            format!("{},{}", self.fit_window.0, self.fit_window.1),
            self.out_dir.display().to_string(),
            self.format.clone(),
        ];
        let mut s = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
