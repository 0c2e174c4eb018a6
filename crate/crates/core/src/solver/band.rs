//! Banded LU factorisation with partial pivoting.

use alloc::vec::Vec;

use crate::assembly::SparseOperator;
use crate::error::{SolveError, SolveErrorKind};

/// Factors of `P A` for a band matrix with `lower` sub- and `upper`
/// super-diagonals. Row `i` of `U` is stored over columns
/// `i ..= i + lower + upper`; multipliers of column `k` over rows
/// `k + 1 ..= k + lower`.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    lower: usize,
    width: usize,
    /// Row `i`, column `j` at `i * stride + (j + lower - i)` for `j` in
    /// `i - lower ..= i + lower + upper`.
    rows: Vec<f64>,
    stride: usize,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Factors `a` (already permuted into band form).
    pub fn factor(a: &SparseOperator, lower: usize, upper: usize) -> Result<Self, SolveError> {
        let n = a.rows;
        let width = lower + upper; // fill-in bound of U above the diagonal
        let stride = lower + width + 1;
        let mut rows = alloc::vec![0.0; n * stride];
        let at = |i: usize, j: usize| i * stride + (j + lower - i);
        let mut amax: f64 = 0.0;
        for r in 0..n {
            let (cols, vals) = a.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                rows[at(r, c)] = v;
                amax = amax.max(v.abs());
            }
        }
        let tiny = f64::MIN_POSITIVE.max(amax * f64::EPSILON);
        let mut multipliers = alloc::vec![0.0; n * lower.max(1)];
        let mut pivots = alloc::vec![0usize; n];
        for k in 0..n {
            let last_row = (k + lower).min(n - 1);
            let last_col = (k + width).min(n - 1);
            let mut p = k;
            let mut best = rows[at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = rows[at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(SolveError {
                    kind: SolveErrorKind::SingularPivot { row: k, pivot: best },
                    residuals: Vec::new(),
                });
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    rows.swap(at(k, j), at(p, j));
                }
            }
            let pivot = rows[at(k, k)];
            for i in k + 1..=last_row {
                let m = rows[at(i, k)] / pivot;
                multipliers[k * lower + (i - k - 1)] = m;
                rows[at(i, k)] = 0.0;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        rows[at(i, j)] -= m * rows[at(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            lower,
            width,
            rows,
            stride,
            multipliers,
            pivots,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, lower) = (self.n, self.lower);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for i in k + 1..=(k + lower).min(n.saturating_sub(1)) {
                b[i] -= self.multipliers[k * lower + (i - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let base = k * self.stride + lower - k;
            let mut s = b[k];
            for j in k + 1..=(k + self.width).min(n - 1) {
                s -= self.rows[base + j] * b[j];
            }
            b[k] = s / self.rows[base + k];
        }
    }
}
