use alloc::vec::Vec;

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    pub rows: usize,
    pub cols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

/// Coordinate-format accumulator. Duplicates are summed in insertion order,
/// so assembly is bitwise reproducible.
#[derive(Clone, Debug)]
pub struct TripletBuilder {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(rows: usize, cols: usize, capacity: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::with_capacity(capacity),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> SparseOperator {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = alloc::vec![0usize; self.rows + 1];
        let mut col_indices = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        SparseOperator {
            rows: self.rows,
            cols: self.cols,
            row_offsets,
            col_indices,
            values,
        }
    }
}

impl SparseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        TripletBuilder::new(rows, cols).build()
    }

    pub fn identity(n: usize) -> Self {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.add(i, i, 1.0);
        }
        b.build()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension");
        (0..self.rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// `A^T x`
    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "transpose_matvec dimension");
        let mut out = alloc::vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * xr;
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        self.transpose_matvec(&alloc::vec![1.0; self.rows])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        let scale = self.max_abs();
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    pub fn is_symmetric(&self, relative_tolerance: f64) -> bool {
        self.asymmetry() <= relative_tolerance
    }

    /// `sum_k coeff_k * op_k`; all operators must share dimensions.
    pub fn linear_combination(terms: &[(f64, &SparseOperator)]) -> SparseOperator {
        let (rows, cols) = terms.first().map_or((0, 0), |(_, op)| (op.rows, op.cols));
        let capacity = terms.iter().map(|(_, op)| op.nnz()).sum();
        let mut b = TripletBuilder::with_capacity(rows, cols, capacity);
        for (coeff, op) in terms {
            assert!(op.rows == rows && op.cols == cols, "linear_combination dimension");
            for r in 0..rows {
                let (cs, vs) = op.row(r);
                for (&c, &v) in cs.iter().zip(vs) {
                    b.add(r, c, coeff * v);
                }
            }
        }
        b.build()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = alloc::vec![alloc::vec![0.0; self.cols]; self.rows];
        for (r, row) in out.iter_mut().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                row[c] = v;
            }
        }
        out
    }

    /// `x^T A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_are_summed() {
        let mut b = TripletBuilder::new(2, 3);
        b.add(1, 2, 1.0);
        b.add(0, 0, 2.0);
        b.add(1, 2, 0.5);
        b.add(1, 0, 0.0);
        let a = b.build();
        assert_eq!(a.row_offsets, [0, 1, 3]);
        assert_eq!(a.col_indices, [0, 0, 2]);
        assert_eq!(a.get(1, 2), 1.5);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.matvec(&[1.0, 1.0, 2.0]), [2.0, 3.0]);
        assert_eq!(a.col_sums(), [2.0, 0.0, 1.5]);
        assert_eq!(a.row_sums(), [2.0, 1.5]);
    }

    #[test]
    fn identity_and_symmetry() {
        let i = SparseOperator::identity(4);
        assert!(i.is_symmetric(0.0));
        assert_eq!(i.matvec(&[1.0, 2.0, 3.0, 4.0]), [1.0, 2.0, 3.0, 4.0]);
        let mut b = TripletBuilder::new(2, 2);
        b.add(0, 1, 1.0);
        assert!(!b.build().is_symmetric(1e-13));
    }

    proptest! {
        #[test]
        fn matvec_matches_dense(entries in prop::collection::vec((0usize..5, 0usize..4, -10.0f64..10.0), 0..40),
                                x in prop::collection::vec(-1.0f64..1.0, 4)) {
            let mut b = TripletBuilder::new(5, 4);
            let mut dense = [[0.0f64; 4]; 5];
            for &(r, c, v) in &entries {
                b.add(r, c, v);
                dense[r][c] += v;
            }
            let a = b.build();
            let y = a.matvec(&x);
            for r in 0..5 {
                let expected: f64 = (0..4).map(|c| dense[r][c] * x[c]).sum();
                prop_assert!((y[r] - expected).abs() < 1e-12);
            }
            let combo = SparseOperator::linear_combination(&[(2.0, &a), (-1.0, &a)]);
            for r in 0..5 {
                for c in 0..4 {
                    prop_assert!((combo.get(r, c) - a.get(r, c)).abs() < 1e-12);
                }
            }
        }
    }
}
