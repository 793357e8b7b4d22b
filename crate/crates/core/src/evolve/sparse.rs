use crate::qops::{CMatrix, C64};

/// Coordinate-list view of a mostly-zero square matrix.
#[derive(Clone, Debug)]
pub(crate) struct SparseOp {
    dim: usize,
    /// `(row, col, value)`
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..dim {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        for &(_, j, v) in &self.entries {
            cols[j] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// `out += factor · S x`
    pub fn left_mul_acc(&self, x: &CMatrix, factor: C64, out: &mut CMatrix) {
        let d = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for col in 0..d {
            let base = col * d;
            for &(i, k, v) in &self.entries {
                os[base + i] += factor * v * xs[base + k];
            }
        }
    }

    /// `out += factor · x S†`
    pub fn right_adj_mul_acc(&self, x: &CMatrix, factor: C64, out: &mut CMatrix) {
        let d = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for &(j, k, v) in &self.entries {
            let w = factor * v.conj();
            let (src, dst) = (k * d, j * d);
            for i in 0..d {
                os[dst + i] += w * xs[src + i];
            }
        }
    }
}
