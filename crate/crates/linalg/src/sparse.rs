//! Sparse triplet matrices over F_p.

use crate::field::{add, mul};
use crate::matrix::Matrix;

/// Coordinate-format matrix. Entries are kept sorted by (row, col) with no
/// duplicates and no zeros once `compress` has run; constructors call it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, u8)>,
}

impl SparseMatrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        SparseMatrix { p, rows, cols, entries: Vec::new() }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let entries = (0..n as u32).map(|i| (i, i, 1)).collect();
        SparseMatrix { p, rows: n, cols: n, entries }
    }

    /// Build from triplets; duplicates are summed.
    pub fn from_triplets(p: u8, rows: usize, cols: usize, t: impl IntoIterator<Item = (usize, usize, u8)>) -> Self {
        let entries = t
            .into_iter()
            .map(|(i, j, v)| {
                assert!(i < rows && j < cols, "triplet ({i},{j}) out of range {rows}x{cols}");
                (i as u32, j as u32, v % p)
            })
            .collect();
        let mut m = SparseMatrix { p, rows, cols, entries };
        m.compress();
        m
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0 {
                    entries.push((i as u32, j as u32, v));
                }
            }
        }
        SparseMatrix { p: m.p(), rows: m.rows(), cols: m.cols(), entries }
    }

    fn compress(&mut self) {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let p = self.p;
        let mut out: Vec<(u32, u32, u8)> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 = add(p, last.2, v),
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|e| e.2 != 0);
        self.entries = out;
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.entries.iter().map(|&(i, j, v)| (i as usize, j as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        match self.entries.binary_search_by_key(&(i as u32, j as u32), |&(a, b, _)| (a, b)) {
            Ok(k) => self.entries[k].2,
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.p, self.rows, self.cols);
        for (i, j, v) in self.entries() {
            m.set(i, j, v);
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.p, self.cols, self.rows, self.entries().map(|(i, j, v)| (j, i, v)))
    }

    /// Row-wise view: for each row, the (col, value) pairs.
    pub fn row_lists(&self) -> Vec<Vec<(usize, u8)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (i, j, v) in self.entries() {
            out[i].push((j, v));
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "sparse product shape mismatch");
        let p = self.p;
        let orows = other.row_lists();
        let mut acc = vec![0u8; other.cols];
        let mut touched = Vec::new();
        let mut out = Vec::new();
        let mut i0 = 0;
        while i0 < self.entries.len() {
            let i = self.entries[i0].0;
            let mut k = i0;
            while k < self.entries.len() && self.entries[k].0 == i {
                let (_, j, a) = self.entries[k];
                for &(c, b) in &orows[j as usize] {
                    if acc[c] == 0 {
                        touched.push(c);
                    }
                    acc[c] = add(p, acc[c], mul(p, a, b));
                }
                k += 1;
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != 0 {
                    out.push((i, c as u32, acc[c]));
                }
                acc[c] = 0;
            }
            touched.clear();
            i0 = k;
        }
        SparseMatrix { p, rows: self.rows, cols: other.cols, entries: out }
    }

    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0u8; self.rows];
        for (i, j, a) in self.entries() {
            out[i] = add(self.p, out[i], mul(self.p, a, v[j]));
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SparseMatrix::from_triplets(self.p, self.rows, self.cols, self.entries().chain(other.entries()))
    }

    pub fn scale(&self, c: u8) -> SparseMatrix {
        SparseMatrix::from_triplets(self.p, self.rows, self.cols, self.entries().map(|(i, j, v)| (i, j, mul(self.p, v, c % self.p))))
    }

    pub fn kronecker(&self, b: &SparseMatrix) -> SparseMatrix {
        let p = self.p;
        let mut t = Vec::with_capacity(self.nnz() * b.nnz());
        for (ia, ja, x) in self.entries() {
            for (ib, jb, y) in b.entries() {
                t.push((ia * b.rows + ib, ja * b.cols + jb, mul(p, x, y)));
            }
        }
        SparseMatrix::from_triplets(p, self.rows * b.rows, self.cols * b.cols, t)
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_roundtrip_and_product() {
        let a = Matrix::from_i64(3, 2, 3, &[1, 0, 2, 0, 1, 1]);
        let b = Matrix::from_i64(3, 3, 2, &[1, 2, 0, 1, 2, 2]);
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        assert_eq!(sa.to_dense(), a);
        assert_eq!(sa.mul(&sb).to_dense(), &a * &b);
        assert_eq!(sa.kronecker(&sb).to_dense(), a.kronecker(&b));
        assert_eq!(sa.transpose().to_dense(), a.transpose());
    }

    #[test]
    fn duplicates_sum() {
        let m = SparseMatrix::from_triplets(2, 1, 1, [(0, 0, 1), (0, 0, 1)]);
        assert!(m.is_zero());
    }
}
