//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shift).

use crate::error::{FluxError, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub eigenvalues: Vec<f64>,
    /// Row-major `n × n`; column `j` is the eigenvector of `eigenvalues[j]`.
    pub vectors: Vec<f64>,
}

impl TridiagonalEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Component `site` of eigenvector `j`.
    pub fn component(&self, site: usize, j: usize) -> f64 {
        self.vectors[site * self.dim() + j]
    }
}

/// Diagonalizes the matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(FluxError::SizeMismatch {
            expected: n.saturating_sub(1),
            found: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let scale = d
        .iter()
        .chain(off.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let negligible =
        |em: f64, dd: f64| em.abs() <= f64::EPSILON * dd || em.abs() <= 1e-3 * f64::EPSILON * scale;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if negligible(e[m], d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(FluxError::NoConvergence {
                    iterations: sweeps,
                    best_value: e[l].abs(),
                    best_point: vec![],
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
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
                    let row = k * n;
                    let zf = z[row + i + 1];
                    z[row + i + 1] = s * z[row + i] + c * zf;
                    z[row + i] = c * z[row + i] - s * zf;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(TridiagonalEigen {
        eigenvalues: d,
        vectors: z,
    })
}
