//! Restarted GMRES with an ILU(0) right preconditioner.

use alloc::vec::Vec;

use crate::assembly::SparseOperator;
use crate::error::{SolveError, SolveErrorKind};
use crate::math::{norm2, sqrt};

/// Incomplete LU with the sparsity pattern of the matrix.
pub struct Ilu0 {
    lu: SparseOperator,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &SparseOperator) -> Result<Self, SolveError> {
        let n = a.rows;
        let mut lu = a.clone();
        let mut diag = alloc::vec![usize::MAX; n];
        for r in 0..n {
            let start = lu.row_offsets[r];
            if let Ok(k) = lu.row(r).0.binary_search(&r) {
                diag[r] = start + k;
            }
        }
        let singular = |row: usize, pivot: f64| SolveError {
            kind: SolveErrorKind::SingularPivot { row, pivot },
            residuals: Vec::new(),
        };
        for i in 0..n {
            let (start, end) = (lu.row_offsets[i], lu.row_offsets[i + 1]);
            for kk in start..end {
                let k = lu.col_indices[kk];
                if k >= i {
                    break;
                }
                if diag[k] == usize::MAX {
                    return Err(singular(k, 0.0));
                }
                let factor = lu.values[kk] / lu.values[diag[k]];
                lu.values[kk] = factor;
                // row i -= factor * (upper part of row k), within the pattern
                let (ks, ke) = (diag[k] + 1, lu.row_offsets[k + 1]);
                let mut p = kk + 1;
                for q in ks..ke {
                    let col = lu.col_indices[q];
                    while p < end && lu.col_indices[p] < col {
                        p += 1;
                    }
                    if p < end && lu.col_indices[p] == col {
                        lu.values[p] -= factor * lu.values[q];
                    }
                }
            }
            if diag[i] == usize::MAX || lu.values[diag[i]] == 0.0 {
                return Err(singular(i, 0.0));
            }
        }
        Ok(Self { lu, diag })
    }

    pub fn apply(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let (cols, vals) = self.lu.row(i);
            let mut s = x[i];
            for (&c, &v) in cols.iter().zip(vals) {
                if c >= i {
                    break;
                }
                s -= v * x[c];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let (start, end) = (self.diag[i] + 1, self.lu.row_offsets[i + 1]);
            let mut s = x[i];
            for q in start..end {
                s -= self.lu.values[q] * x[self.lu.col_indices[q]];
            }
            x[i] = s / self.lu.values[self.diag[i]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` to relative residual `tolerance`. `history` receives the
/// relative residual after every iteration.
pub fn gmres(
    a: &SparseOperator,
    b: &[f64],
    precond: &Ilu0,
    restart: usize,
    max_iterations: usize,
    tolerance: f64,
    history: &mut Vec<f64>,
) -> Result<(Vec<f64>, usize), SolveError> {
    let n = a.rows;
    let m = restart.max(1);
    let bnorm = norm2(b);
    let mut x = alloc::vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut iterations = 0;
    let fail = |kind, history: &Vec<f64>| SolveError {
        kind,
        residuals: history.clone(),
    };
    let mut cycle_start_residual = f64::INFINITY;
    loop {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        if beta / bnorm <= tolerance {
            return Ok((x, iterations));
        }
        if iterations >= max_iterations || beta >= 0.999 * cycle_start_residual {
            return Err(fail(SolveErrorKind::Stagnation { iterations }, history));
        }
        cycle_start_residual = beta;
        let mut basis: Vec<Vec<f64>> = alloc::vec![r.iter().map(|v| v / beta).collect()];
        let mut hess = alloc::vec![alloc::vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (alloc::vec![0.0; m], alloc::vec![0.0; m]);
        let mut g = alloc::vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && iterations < max_iterations {
            let mut z = basis[k].clone();
            precond.apply(&mut z);
            let mut w = a.matvec(&z);
            for (j, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                hess[j][k] = hij;
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= hij * vi;
                }
            }
            let wnorm = norm2(&w);
            hess[k + 1][k] = wnorm;
            for j in 0..k {
                let t = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
                hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
                hess[j][k] = t;
            }
            let denom = sqrt(hess[k][k] * hess[k][k] + hess[k + 1][k] * hess[k + 1][k]);
            if denom == 0.0 {
                return Err(fail(SolveErrorKind::Stagnation { iterations }, history));
            }
            cs[k] = hess[k][k] / denom;
            sn[k] = hess[k + 1][k] / denom;
            hess[k][k] = denom;
            hess[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            history.push(g[k].abs() / bnorm);
            if g[k].abs() / bnorm <= tolerance || wnorm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wnorm).collect());
        }
        // back substitution for the k x k triangular system
        let mut y = alloc::vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| hess[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        let mut update = alloc::vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vi) in update.iter_mut().zip(v) {
                *u += yi * vi;
            }
        }
        precond.apply(&mut update);
        for (xi, u) in x.iter_mut().zip(&update) {
            *xi += u;
        }
    }
}
