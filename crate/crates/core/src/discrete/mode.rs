use serde::{Deserialize, Serialize};

use crate::discrete::RadialGrid;
use crate::error::{Error, Result};
use crate::geometry::SpindleGeometry;
use crate::numerics::symmetric_tridiagonal_eigen;

/// Eigenpairs of a mode operator, sorted by nonincreasing eigenvalue.
///
/// `vectors` is row-major `N × N` with eigenvectors as columns, orthonormal in
/// the `diag(w)` inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

/// Radial operator `L_m u = (1/ψ)(ψ u′)′ − (m²/ψ²) u` for one Fourier mode.
///
/// Conservative finite-volume form: `w_i (L u)_i = F_{i+1/2} − F_{i−1/2} − s_i u_i`
/// with face fluxes `F = c (u_{i+1} − u_i)`, `c = ψ(x_f)/(x_{i+1} − x_i)` at the
/// face midpoint `x_f`, and sink `s_i = m² ŵ_i / ψ_i²` where `ŵ` excludes the tip
/// caps. At each tip the outer flux is the Robin closure `x u′ = (m/α) u`,
/// i.e. `ψ u′ = m u`: the cap is filled by the bounded branch `x^{m/α}` (or a
/// constant for `m = 0`), whose Dirichlet energy on the cap is exactly `m u_1²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeOperator {
    pub m: usize,
    /// Face coefficients `c_{i+1/2}`, length `N − 1`.
    pub face: Vec<f64>,
    /// `s_i` plus the Robin terms at the two end rows, length `N`.
    pub sink: Vec<f64>,
    /// Quadrature weights `w_i` (copied from the grid).
    pub weights: Vec<f64>,
    pub eig: Option<ModeEigen>,
}

pub fn assemble_mode_operator(geom: &SpindleGeometry, grid: &RadialGrid, m: usize) -> ModeOperator {
    let n = grid.len();
    let x = &grid.nodes;
    let face: Vec<f64> = (0..n - 1)
        .map(|i| {
            let xf = 0.5 * (x[i] + x[i + 1]);
            geom.psi(xf) / (x[i + 1] - x[i])
        })
        .collect();
    let mf = m as f64;
    let mut sink: Vec<f64> = (0..n)
        .map(|i| mf * mf * grid.inner_weight(i) / (grid.psi[i] * grid.psi[i]))
        .collect();
    sink[0] += mf;
    sink[n - 1] += mf;
    ModeOperator {
        m,
        face,
        sink,
        weights: grid.weights.clone(),
        eig: None,
    }
}

impl ModeOperator {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(lower, diag, upper)` of the (non-symmetric) matrix of `L_m`.
    pub fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.len();
        let w = &self.weights;
        let mut diag = vec![0.0; n];
        let mut lower = vec![0.0; n - 1];
        let mut upper = vec![0.0; n - 1];
        for i in 0..n {
            let mut d = -self.sink[i];
            if i > 0 {
                d -= self.face[i - 1];
                lower[i - 1] = self.face[i - 1] / w[i];
            }
            if i + 1 < n {
                d -= self.face[i];
                upper[i] = self.face[i] / w[i];
            }
            diag[i] = d / w[i];
        }
        (lower, diag, upper)
    }

    /// `W^{1/2} L W^{−1/2}` as (diag, off).
    pub fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let w = &self.weights;
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let mut d = -self.sink[i];
            if i > 0 {
                d -= self.face[i - 1];
            }
            if i + 1 < n {
                d -= self.face[i];
            }
            diag[i] = d / w[i];
        }
        let off = (0..n - 1).map(|i| self.face[i] / (w[i] * w[i + 1]).sqrt()).collect();
        (diag, off)
    }

    /// `(L_m u)_i` on a real radial vector.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = -self.sink[i] * u[i];
            if i > 0 {
                acc += self.face[i - 1] * (u[i - 1] - u[i]);
            }
            if i + 1 < n {
                acc += self.face[i] * (u[i + 1] - u[i]);
            }
            out[i] = acc / self.weights[i];
        }
    }

    /// `−⟨a, L_m b⟩_w = Σ c (Δa)(Δb) + Σ s a b`, the discrete Dirichlet form.
    pub fn dirichlet_form(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.len();
        let mut terms = Vec::with_capacity(2 * n);
        for i in 0..n - 1 {
            terms.push(self.face[i] * (a[i + 1] - a[i]) * (b[i + 1] - b[i]));
        }
        for i in 0..n {
            terms.push(self.sink[i] * a[i] * b[i]);
        }
        crate::numerics::pairwise_sum(&terms)
    }

    pub fn eigen(&self) -> Option<&ModeEigen> {
        self.eig.as_ref()
    }
}

/// Populate the eigenpairs of `op`.
///
/// For `m = 0` the kernel pair is pinned to exactly `(0, const)` so the implicit
/// solve preserves the mean to round-off.
pub fn eigendecompose(mut op: ModeOperator) -> Result<ModeOperator> {
    let n = op.len();
    let (diag, off) = op.symmetrized();
    let (vals, z) = symmetric_tridiagonal_eigen(&diag, &off).map_err(|_| Error::Eigensolver { mode: op.m })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let sqrt_w: Vec<f64> = op.weights.iter().map(|w| w.sqrt()).collect();
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        values.push(vals[k]);
        for i in 0..n {
            vectors[i * n + col] = z[i * n + k] / sqrt_w[i];
        }
    }
    // Canonical sign: the first entry (from the start tip) above a tenth of the
    // peak is positive, so the basis is comparable across grids.
    for col in 0..n {
        let peak = (0..n).map(|i| vectors[i * n + col].abs()).fold(0.0, f64::max);
        let first = (0..n).find(|&i| vectors[i * n + col].abs() > 0.1 * peak).unwrap_or(0);
        if vectors[first * n + col] < 0.0 {
            for i in 0..n {
                vectors[i * n + col] = -vectors[i * n + col];
            }
        }
    }
    if op.m == 0 {
        let total: f64 = op.weights.iter().sum();
        let c = 1.0 / total.sqrt();
        values[0] = 0.0;
        for i in 0..n {
            vectors[i * n] = c;
        }
        // Remove round-off overlap with the constant so the other modes carry no mass.
        for col in 1..n {
            let overlap: f64 = (0..n).map(|i| op.weights[i] * vectors[i * n + col]).sum::<f64>() * c;
            for i in 0..n {
                vectors[i * n + col] -= overlap * c;
            }
        }
    }
    op.eig = Some(ModeEigen { values, vectors });
    Ok(op)
}

impl ModeEigen {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Column `j` as a vector.
    pub fn vector(&self, j: usize) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| self.vectors[i * n + j]).collect()
    }

    /// Coefficients `Vᵀ W u`.
    pub fn project(&self, weights: &[f64], u: &[f64], out: &mut [f64]) {
        let n = self.len();
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..n {
            let wu = weights[i] * u[i];
            if wu == 0.0 {
                continue;
            }
            let row = &self.vectors[i * n..(i + 1) * n];
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * wu;
            }
        }
    }

    /// `V c`.
    pub fn reconstruct(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let row = &self.vectors[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for (v, c) in row.iter().zip(coeffs) {
                acc += v * c;
            }
            out[i] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{build_grid, Grading};
    use crate::geometry::build_spindle;

    fn setup(n: usize) -> (SpindleGeometry, RadialGrid) {
        let g = build_spindle(1.0, 1.0, 2.0, 0.5).unwrap();
        let grid = build_grid(&g, n, 1e-3, Grading::LogCollar).unwrap();
        (g, grid)
    }

    #[test]
    fn constants_are_harmonic_in_mode_zero() {
        let (g, grid) = setup(48);
        let op = assemble_mode_operator(&g, &grid, 0);
        let one = vec![1.0; 48];
        let mut out = vec![0.0; 48];
        op.apply(&one, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn bounded_branch_is_discretely_harmonic_in_collar() {
        let (g, grid) = setup(96);
        let op = assemble_mode_operator(&g, &grid, 1);
        let u: Vec<f64> = grid.nodes.iter().map(|&x| x).collect();
        let mut out = vec![0.0; u.len()];
        op.apply(&u, &mut out);
        // Tip row is exact for x on a straight cone with α = 1.
        assert!(out[0].abs() < 1e-9 * (1.0 / grid.nodes[0]));
        // Interior collar rows: truncation only, relative to the size of each term (~1/x).
        for i in 1..grid.collar_nodes - 1 {
            let scale = 1.0 / grid.nodes[i];
            assert!(out[i].abs() < 2e-2 * scale, "row {i}: {}", out[i]);
        }
    }

    #[test]
    fn self_adjoint_and_nonpositive() {
        let (g, grid) = setup(40);
        for m in 0..4 {
            let op = eigendecompose(assemble_mode_operator(&g, &grid, m)).unwrap();
            let n = op.len();
            let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 1.3).cos()).collect();
            let mut la = vec![0.0; n];
            let mut lb = vec![0.0; n];
            op.apply(&a, &mut la);
            op.apply(&b, &mut lb);
            let lhs: f64 = (0..n).map(|i| op.weights[i] * la[i] * b[i]).sum();
            let rhs: f64 = (0..n).map(|i| op.weights[i] * a[i] * lb[i]).sum();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "m={m}: {lhs} {rhs}");
            let eig = op.eigen().unwrap();
            assert!(eig.values.windows(2).all(|p| p[0] >= p[1]));
            if m == 0 {
                assert_eq!(eig.values[0], 0.0);
                assert!(eig.values[1] < -1e-3);
            } else {
                assert!(eig.values[0] <= 1e-10);
            }
        }
    }

    #[test]
    fn eigen_reconstruction() {
        let (g, grid) = setup(32);
        let op = eigendecompose(assemble_mode_operator(&g, &grid, 2)).unwrap();
        let eig = op.eigen().unwrap();
        let n = op.len();
        let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for j in 0..n {
            let v = eig.vector(j);
            let mut lv = vec![0.0; n];
            op.apply(&v, &mut lv);
            for i in 0..n {
                assert!((lv[i] - eig.values[j] * v[i]).abs() <= 1e-10 * scale * v.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0));
            }
            for k in 0..n {
                let dot: f64 = (0..n).map(|i| op.weights[i] * v[i] * eig.vectors[i * n + k]).sum();
                let e = if j == k { 1.0 } else { 0.0 };
                assert!((dot - e).abs() < 1e-9, "{j} {k} {dot}");
            }
        }
    }

    #[test]
    fn mirrored_tips_have_identical_spectra() {
        // A symmetric spindle is invariant under x -> L - x, so each mode operator
        // commutes with the reflection; compare against the reflected assembly.
        let (g, grid) = setup(40);
        for m in 0..3 {
            let op = assemble_mode_operator(&g, &grid, m);
            let n = op.len();
            for i in 0..n {
                assert!((op.sink[i] - op.sink[n - 1 - i]).abs() <= 1e-10 * op.sink[i].abs().max(1.0));
            }
            for i in 0..n - 1 {
                assert!((op.face[i] - op.face[n - 2 - i]).abs() <= 1e-10 * op.face[i].abs());
            }
        }
    }
}
