//! Dense byte-per-entry matrices over F_p.

use std::fmt;

use crate::bits::BitMatrix;
use crate::field::{add, inv, mul, neg, sub};
use crate::LinalgError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Result of row reduction: the canonical reduced echelon form, its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from row vectors; entries are reduced mod p.
    pub fn from_rows(p: u8, cols: usize, rows: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = x % p;
            }
        }
        m
    }

    /// Build from signed integers, reducing mod p.
    pub fn from_i64(p: u8, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let data = entries.iter().map(|&x| x.rem_euclid(p as i64) as u8).collect();
        Matrix { p, rows, cols, data }
    }

    pub fn from_fn(p: u8, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut m = Self::zeros(p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % p;
            }
        }
        m
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v % self.p;
    }

    /// Add `v` to entry (i, j).
    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: u8) {
        let k = i * self.cols + j;
        self.data[k] = add(self.p, self.data[k], v % self.p);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u8] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn from_data(p: u8, rows: usize, cols: usize, data: Vec<u8>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|&x| x >= p) {
            return Err(LinalgError::Shape("entry out of range".into()));
        }
        Ok(Matrix { p, rows, cols, data })
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows || self.p != other.p {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        let p = self.p as u32;
        let n = other.cols;
        let mut out = Matrix::zeros(self.p, self.rows, n);
        let mut acc = vec![0u32; n];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0u32;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u32;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                for (x, &b) in acc.iter_mut().zip(orow) {
                    *x += a * b as u32;
                }
                pending += 1;
                // Keep accumulators far below overflow: each step adds < 251^2.
                if pending >= 60_000 {
                    acc.iter_mut().for_each(|x| *x %= p);
                    pending = 0;
                }
            }
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (o, &x) in orow.iter_mut().zip(&acc) {
                *o = (x % p) as u8;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u32;
        (0..self.rows)
            .map(|i| {
                let r = self.row(i);
                let s: u32 = r.iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                (s % p) as u8
            })
            .collect()
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add(self.p, a, b)).collect();
        Ok(Matrix { p: self.p, rows: self.rows, cols: self.cols, data })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub(self.p, a, b)).collect();
        Ok(Matrix { p: self.p, rows: self.rows, cols: self.cols, data })
    }

    /// In-place `self += c * other`.
    pub fn add_scaled(&mut self, c: u8, other: &Matrix) {
        self.check_same_shape(other).expect("shape mismatch in add_scaled");
        let c = c % self.p;
        if c == 0 {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = add(self.p, *a, mul(self.p, c, b));
        }
    }

    pub fn scale(&self, c: u8) -> Matrix {
        let c = c % self.p;
        let data = self.data.iter().map(|&a| mul(self.p, a, c)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|&a| neg(self.p, a)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols || self.p != other.p {
            return Err(LinalgError::Shape(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Kronecker product with row index `i_a * rows_b + i_b` and column index `j_a * cols_b + j_b`.
    pub fn kronecker(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.p, b.p);
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        let mut out = Matrix::zeros(self.p, rows, cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                if a == 0 {
                    continue;
                }
                for ib in 0..b.rows {
                    let orow = (ia * b.rows + ib) * cols + ja * b.cols;
                    for jb in 0..b.cols {
                        out.data[orow + jb] = mul(self.p, a, b.get(ib, jb));
                    }
                }
            }
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut out = Matrix::zeros(self.p, self.rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
            out.data[i * cols + self.cols..(i + 1) * cols].copy_from_slice(other.row(i));
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.p, idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(i));
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, self.rows, idx.len(), |i, k| self.get(i, idx[k]))
    }

    /// Copy `block` into `self` with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.p, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.p, self.rows);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0).count()
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix F_{} {}x{} [", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Canonical reduced row echelon form. Zero rows are moved to the bottom.
pub fn rref(m: &Matrix) -> Echelon {
    if m.p == 2 {
        let mut b = BitMatrix::from_matrix(m);
        let pivots = b.rref();
        let rank = pivots.len();
        return Echelon { matrix: b.to_matrix(), rank, pivots };
    }
    let mut a = m.clone();
    let pivots = rref_in_place(&mut a);
    Echelon { rank: pivots.len(), matrix: a, pivots }
}

/// Row reduce in place over F_p (any p), returning pivot columns.
pub(crate) fn rref_in_place(a: &mut Matrix) -> Vec<usize> {
    let p = a.p;
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.data.swap(piv * cols + j, r * cols + j);
            }
        }
        let s = inv(p, a.get(r, c));
        if s != 1 {
            for j in c..cols {
                let k = r * cols + j;
                a.data[k] = mul(p, a.data[k], s);
            }
        }
        let pivot_row: Vec<u8> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c);
            if f == 0 {
                continue;
            }
            let nf = (p - f) as u16;
            let row = &mut a.data[i * cols + c..(i + 1) * cols];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if y != 0 {
                    *x = ((*x as u16 + nf * y as u16) % p as u16) as u8;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solve `a x = b`. Returns the canonical particular solution (free variables zero) or `None`.
pub fn solve(a: &Matrix, b: &[u8]) -> Option<Vec<u8>> {
    assert_eq!(a.rows, b.len());
    let p = a.p;
    let bm = Matrix::from_rows(p, 1, &b.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    let aug = a.hstack(&bm);
    let e = rref(&aug);
    if e.pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![0u8; a.cols];
    for (i, &c) in e.pivots.iter().enumerate() {
        x[c] = e.matrix.get(i, a.cols);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let z = Matrix::zeros(2, 3, 4);
        let e = rref(&z);
        assert_eq!(e.rank, 0);
        assert!(e.matrix.is_zero());

        let i3 = Matrix::identity(2, 3);
        let e = rref(&i3);
        assert_eq!(e.rank, 3);
        assert_eq!(e.matrix, i3);

        let m = Matrix::from_rows(2, 2, &[vec![1, 1], vec![1, 1]]);
        let e = rref(&m);
        assert_eq!(e.rank, 1);
        assert_eq!(e.matrix, Matrix::from_rows(2, 2, &[vec![1, 1], vec![0, 0]]));
    }

    #[test]
    fn rref_mod3() {
        // Second row minus twice the first is (0,0,1), so column 1 is not a pivot.
        let m = Matrix::from_i64(3, 2, 3, &[2, 1, 0, 1, 2, 1]);
        let e = rref(&m);
        assert_eq!(e.rank, 2);
        assert_eq!(e.pivots, vec![0, 2]);
        assert_eq!(e.matrix, Matrix::from_i64(3, 2, 3, &[1, 2, 0, 0, 0, 1]));
    }

    #[test]
    fn kronecker_small() {
        let a = Matrix::from_rows(2, 2, &[vec![1, 1]]);
        let b = Matrix::from_rows(2, 1, &[vec![1], vec![1]]);
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k.get(i, j), a.get(i / 2, j) * b.get(i % 2, 0));
            }
        }
        assert_eq!(Matrix::identity(2, 2).kronecker(&Matrix::identity(2, 3)), Matrix::identity(2, 6));
    }

    #[test]
    fn solve_basic() {
        let a = Matrix::from_i64(5, 2, 2, &[1, 2, 3, 4]);
        let x = solve(&a, &[1, 0]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![1, 0]);
        let s = Matrix::from_i64(5, 2, 2, &[1, 1, 2, 2]);
        assert!(solve(&s, &[1, 0]).is_none());
    }
}
