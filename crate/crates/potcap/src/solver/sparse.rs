//! Sparse rows and the two linear solvers the schemes need.
//!
//! The assembled operators are M-matrices, nonsymmetric once transport is on,
//! so the workhorse is Jacobi-preconditioned BiCGStab. Its reductions go
//! through the fixed-chunk helpers in `par`, which makes every iterate (and
//! therefore the iteration count) independent of the thread count. The radial
//! solver only ever produces tridiagonal systems and uses elimination
//! directly.

use super::SolverError;
use crate::par;

/// Compressed sparse rows. Column indices are sorted within each row and the
/// diagonal entry is always present.
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds from per-row entry lists. Duplicate columns within a row are
    /// summed.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0usize);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut write: Option<u32> = None;
            for (c, v) in row {
                if write == Some(c) {
                    *vals.last_mut().expect("entry just written") += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    write = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .position(|&c| c as usize == i)
                    .map(|k| vals[k])
                    .unwrap_or(0.0)
            })
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        par::map_indices(self.n, |i| {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c as usize];
            }
            acc
        })
    }

    pub fn transpose(&self) -> Csr {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                rows[*c as usize].push((i as u32, *v));
            }
        }
        Csr::from_rows(rows)
    }
}

/// A converged iterative solve.
#[derive(Debug, Clone)]
pub struct LinearSolve {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// true residual |Ax - b| / |b|, recomputed after the iteration
    pub relative_residual: f64,
}

const BREAKDOWN: f64 = 1e-300;
const MAX_RESTARTS: usize = 4;

/// Jacobi-preconditioned BiCGStab from the zero start. Converges on the
/// assembled M-matrices well inside the iteration budget; the budget only
/// exists so a mis-assembled system fails loudly instead of spinning.
pub fn bicgstab(a: &Csr, b: &[f64], tol: f64, max_iters: usize) -> Result<LinearSolve, SolverError> {
    let n = a.n();
    let norm_b = par::chunk_dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok(LinearSolve {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let floor = BREAKDOWN * norm_b * norm_b;

    let mut x = vec![0.0; n];
    let mut iterations = 0usize;
    // Breakdown of a pairing restarts the recurrence from the current
    // iterate; the outer loop is the restart loop.
    'restart: for _ in 0..=MAX_RESTARTS {
        let ax = a.matvec(&x);
        let mut r = par::map_indices(n, |i| b[i] - ax[i]);
        let r_hat = r.clone();
        let mut rho = 1.0f64;
        let mut alpha = 1.0f64;
        let mut omega = 1.0f64;
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        while iterations < max_iters {
            iterations += 1;
            let rho_new = par::chunk_dot(&r_hat, &r);
            if rho_new.abs() < floor {
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            p = par::map_indices(n, |i| r[i] + beta * (p[i] - omega * v[i]));
            let p_hat = par::map_indices(n, |i| inv_diag[i] * p[i]);
            v = a.matvec(&p_hat);
            let denom = par::chunk_dot(&r_hat, &v);
            if denom.abs() < floor {
                continue 'restart;
            }
            alpha = rho_new / denom;
            let s = par::map_indices(n, |i| r[i] - alpha * v[i]);
            if par::chunk_dot(&s, &s).sqrt() <= tol * norm_b {
                x = par::map_indices(n, |i| x[i] + alpha * p_hat[i]);
                break 'restart;
            }
            let s_hat = par::map_indices(n, |i| inv_diag[i] * s[i]);
            let t = a.matvec(&s_hat);
            let tt = par::chunk_dot(&t, &t);
            omega = if tt > 0.0 { par::chunk_dot(&t, &s) / tt } else { 0.0 };
            x = par::map_indices(n, |i| x[i] + alpha * p_hat[i] + omega * s_hat[i]);
            r = par::map_indices(n, |i| s[i] - omega * t[i]);
            rho = rho_new;
            if par::chunk_dot(&r, &r).sqrt() <= tol * norm_b {
                break 'restart;
            }
            if omega.abs() < BREAKDOWN {
                continue 'restart;
            }
        }
        break;
    }

    let ax = a.matvec(&x);
    let diff = par::map_indices(n, |i| ax[i] - b[i]);
    let relative_residual = par::chunk_dot(&diff, &diff).sqrt() / norm_b;
    if relative_residual <= 10.0 * tol {
        Ok(LinearSolve {
            x,
            iterations,
            relative_residual,
        })
    } else {
        Err(SolverError::SolveFailure {
            iterations,
            residual: relative_residual,
        })
    }
}

/// Tridiagonal elimination (`sub[0]` and `sup[n-1]` are ignored). The radial
/// systems are strictly diagonally dominant, so no pivoting.
pub fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}
