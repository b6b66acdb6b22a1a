//! Cahn-Hilliard dynamics on spindle surfaces with conical tips.
//!
//! The crate covers the indicial analysis of the cone Laplacian
//! ([`indicial`]), a spectral-in-angle finite-volume discretization
//! ([`discrete`]), weighted Mellin-Sobolev norms and the energy functional
//! ([`functionals`]), a stabilized IMEX time stepper ([`dynamics`]), brute
//! force oracles ([`verification`]) and the run configuration used by the
//! `conic-ch` binary ([`config`], [`cli`]).

pub mod discrete;
pub mod dynamics;
pub mod cli;
pub mod config;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod indicial;
pub mod numerics;
pub mod verification;

pub use error::{Error, Result};
