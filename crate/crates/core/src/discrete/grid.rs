use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SpindleGeometry, Tip};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grading {
    /// Geometric spacing on `[x_min, x_c]` at each tip, uniform in the middle.
    LogCollar,
    Uniform,
}

impl std::str::FromStr for Grading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-collar" | "log_collar" => Ok(Grading::LogCollar),
            "uniform" => Ok(Grading::Uniform),
            other => Err(Error::Config(format!(
                "grading = {other}: expected one of log-collar, uniform"
            ))),
        }
    }
}

impl std::fmt::Display for Grading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Grading::LogCollar => "log-collar",
            Grading::Uniform => "uniform",
        })
    }
}

/// Radial nodes on `(0, L)` with trapezoidal weights for `∫ f ψ dx`.
///
/// The end weights also carry the tip caps `∫₀^{x_1} ψ dx`, so that
/// `Σ w_i` approximates `∫₀^L ψ dx`. `cap` holds those two cap areas
/// separately; `w_i − cap` is the weight of the cell strictly inside `[x_1, x_N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub psi: Vec<f64>,
    pub cap: [f64; 2],
    pub grading: Grading,
    pub x_min: f64,
    /// Number of geometrically spaced nodes per collar (0 for uniform grids).
    pub collar_nodes: usize,
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cell weight excluding the tip caps.
    pub fn inner_weight(&self, i: usize) -> f64 {
        let n = self.len();
        let mut w = self.weights[i];
        if i == 0 {
            w -= self.cap[0];
        }
        if i == n - 1 {
            w -= self.cap[1];
        }
        w
    }

    /// Node index `k` counted from the given tip (0 = innermost).
    pub fn index_from_tip(&self, k: usize, tip: Tip) -> usize {
        match tip {
            Tip::Start => k,
            Tip::End => self.len() - 1 - k,
        }
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.nodes == other.nodes && self.weights == other.weights
    }
}

pub fn build_grid(geom: &SpindleGeometry, n: usize, x_min: f64, grading: Grading) -> Result<RadialGrid> {
    if n < 16 {
        return Err(Error::Grid(format!("n_radial = {n} must be at least 16")));
    }
    let xc = geom.collar_width;
    let len = geom.length;
    if !(x_min > 0.0 && x_min < xc) {
        return Err(Error::Grid(format!(
            "x_min = {x_min} must lie in (0, collar_width = {xc})"
        )));
    }
    let (nodes, collar_nodes) = match grading {
        Grading::Uniform => {
            let h = (len - 2.0 * x_min) / (n - 1) as f64;
            ((0..n).map(|i| x_min + i as f64 * h).collect::<Vec<_>>(), 0)
        }
        Grading::LogCollar => {
            // Balance the last collar spacing against the middle spacing.
            let a = xc * (xc / x_min).ln();
            let b = len - 2.0 * xc;
            let nc = ((n as f64 * a / (2.0 * a + b)).round() as usize).clamp(4, (n - 2) / 2);
            let nm = n - 2 * nc;
            let ratio = xc / x_min;
            let collar: Vec<f64> = (0..nc)
                .map(|k| {
                    if k == nc - 1 {
                        xc
                    } else {
                        x_min * ratio.powf(k as f64 / (nc - 1) as f64)
                    }
                })
                .collect();
            let mut nodes = collar.clone();
            let hm = b / (nm + 1) as f64;
            nodes.extend((1..=nm).map(|j| xc + j as f64 * hm));
            nodes.extend(collar.iter().rev().map(|&x| len - x));
            (nodes, nc)
        }
    };
    let psi: Vec<f64> = nodes.iter().map(|&x| geom.psi(x)).collect();
    let cap = [
        0.5 * geom.alpha0 * nodes[0] * nodes[0],
        0.5 * geom.alpha_l * (len - nodes[n - 1]).powi(2),
    ];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
        let right = if i + 1 < n { nodes[i + 1] - nodes[i] } else { 0.0 };
        weights[i] = psi[i] * 0.5 * (left + right);
    }
    weights[0] += cap[0];
    weights[n - 1] += cap[1];
    Ok(RadialGrid {
        nodes,
        weights,
        psi,
        cap,
        grading,
        x_min,
        collar_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_spindle, volume};
    use std::f64::consts::PI;

    #[test]
    fn collar_ratios_are_constant() {
        let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
        let grid = build_grid(&g, 64, 1e-3, Grading::LogCollar).unwrap();
        assert_eq!(grid.len(), 64);
        let nc = grid.collar_nodes;
        let r0 = grid.nodes[1] / grid.nodes[0];
        for k in 1..nc - 1 {
            let r = grid.nodes[k + 1] / grid.nodes[k];
            assert!((r - r0).abs() < 1e-10, "ratio {r} vs {r0}");
        }
        assert!(grid.nodes.windows(2).all(|p| p[1] > p[0]));
        assert_eq!(grid.nodes[0], 1e-3);
        assert!((grid.nodes[63] - (2.0 - 1e-3)).abs() < 1e-14);
    }

    #[test]
    fn bad_x_min_rejected() {
        let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!(build_grid(&g, 64, 0.5, Grading::LogCollar).is_err());
        assert!(build_grid(&g, 64, 0.7, Grading::LogCollar).is_err());
        assert!(build_grid(&g, 64, 0.0, Grading::LogCollar).is_err());
        assert!(build_grid(&g, 8, 1e-3, Grading::LogCollar).is_err());
    }

    #[test]
    fn weights_integrate_constant_to_volume() {
        let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
        // ∫ψ: two cone pieces of 1/8 each plus the quintic ∫_0^1 (0.5 + t − 2t³ + t⁴) dt = 0.7
        let exact = 0.25 + 0.7;
        for grading in [Grading::LogCollar, Grading::Uniform] {
            let grid = build_grid(&g, 256, 1e-3, grading).unwrap();
            let v = volume(&g, &grid);
            // trapezoid error h²/12·[ψ'] over the middle section
            assert!((v / (2.0 * PI) - exact).abs() < 5e-4, "{grading}: {v}");
        }
    }
}
