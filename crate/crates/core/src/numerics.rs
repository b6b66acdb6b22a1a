//! Small numerical kernels shared across modules.

use crate::error::{Error, Result};

/// Pairwise summation with a fixed split order, so reductions are reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n`.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, f: &dyn Fn(usize) -> f64) -> f64 {
        if hi - lo <= 32 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, &f)
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix by implicit QL
/// with Wilkinson shifts.
///
/// `diag` has length `n`, `off` length `n − 1` (`off[i]` couples `i` and `i+1`).
/// Returns eigenvalues and the orthonormal eigenvectors as columns of a
/// row-major `n × n` matrix, unsorted.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> std::result::Result<(Vec<f64>, Vec<f64>), ()> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[k * n + i + 1];
                    let zk = z[k * n + i];
                    z[k * n + i + 1] = s * zk + c * zk1;
                    z[k * n + i] = c * zk - s * zk1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Solve a tridiagonal system `A x = rhs` (Thomas algorithm, no pivoting).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Grid("singular tridiagonal system".into()));
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i - 1] * c[i];
        if beta == 0.0 {
            return Err(Error::Grid("singular tridiagonal system".into()));
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i + 1] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_eigen_reconstructs() {
        let n = 9;
        let diag: Vec<f64> = (0..n).map(|i| -(i as f64) * 1.7 - 0.3).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + 0.1 * i as f64).collect();
        let (vals, z) = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        for k in 0..n {
            for i in 0..n {
                let mut av = diag[i] * z[i * n + k];
                if i > 0 {
                    av += off[i - 1] * z[(i - 1) * n + k];
                }
                if i + 1 < n {
                    av += off[i] * z[(i + 1) * n + k];
                }
                assert!((av - vals[k] * z[i * n + k]).abs() < 1e-12);
            }
            for k2 in 0..n {
                let dot: f64 = (0..n).map(|i| z[i * n + k] * z[i * n + k2]).sum();
                let expect = if k == k2 { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn known_spectrum_of_discrete_dirichlet_laplacian() {
        let n = 16;
        let diag = vec![-2.0; n];
        let off = vec![1.0; n - 1];
        let (mut vals, _) = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (k, v) in vals.iter().enumerate() {
            let theta = std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64;
            assert!((v - (-2.0 + 2.0 * theta.cos())).abs() < 1e-13);
        }
    }

    #[test]
    fn fit_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, b, r2) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thomas_solves() {
        let lower = [1.0, 1.0];
        let diag = [4.0, 4.0, 4.0];
        let upper = [1.0, 1.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-10);
        assert_eq!(pairwise_sum(&xs), pairwise_sum_by(xs.len(), |i| xs[i]));
    }
}
