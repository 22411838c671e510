//! Divided-power matrix elements: the standard basis of Schur algebras.

use std::collections::BTreeMap;

use crate::combinat::{compositions, multinomial_mod, tables};

/// A nonnegative integer matrix `a` with `rows` = target dimension and `cols` =
/// source dimension. It stands for the divided-power monomial prod e_{ij}^{(a_ij)}
/// in Gamma^d(Hom(k^cols, k^rows)), where e_{ij} sends basis vector j to i and
/// d is the sum of the entries. For square matrices this is the standard basis
/// element of the Schur algebra S(n, d) given by the multiset of pairs (i, j).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

pub type SchurGenerator = IMat;

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IMat { rows, cols, data }
    }

    /// Square generator from a multiset of matrix-unit pairs (i, j), 0-based.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut a = IMat::zeros(n, n);
        for &(i, j) in pairs {
            a.data[i * n + j] += 1;
        }
        a
    }

    /// Diagonal generator: the weight idempotent for `lambda`.
    pub fn diagonal(lambda: &[u32]) -> Self {
        let n = lambda.len();
        let mut a = IMat::zeros(n, n);
        for (i, &x) in lambda.iter().enumerate() {
            a.data[i * n + i] = x;
        }
        a
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn degree(&self) -> u32 {
        self.data.iter().sum()
    }

    /// Weight of the target (row sums).
    pub fn row_sums(&self) -> Vec<u32> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).sum()).collect()
    }

    /// Weight of the source (column sums).
    pub fn col_sums(&self) -> Vec<u32> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn divisible_by(&self, q: u32) -> bool {
        self.data.iter().all(|&x| x % q == 0)
    }

    pub fn div(&self, q: u32) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x / q).collect() }
    }

    pub fn scale(&self, q: u32) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * q).collect() }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == 0))
    }

    /// Block-diagonal matrix with the given blocks (all of equal shape).
    pub fn block_diagonal(blocks: &[IMat]) -> IMat {
        let (r, c) = (blocks[0].rows, blocks[0].cols);
        let mut out = IMat::zeros(r * blocks.len(), c * blocks.len());
        for (l, b) in blocks.iter().enumerate() {
            for i in 0..r {
                for j in 0..c {
                    out.set(l * r + i, l * c + j, b.get(i, j));
                }
            }
        }
        out
    }
}

/// All standard basis elements of S(n, d).
pub fn schur_basis(n: usize, d: u32) -> Vec<SchurGenerator> {
    compositions(d, n * n).into_iter().map(|c| IMat::from_data(n, n, c.0)).collect()
}

/// `E_{tgt,src}^{(k)} 1_lambda`: moves k units of weight from `src` to `tgt`.
pub fn raising_generator(lambda: &[u32], src: usize, tgt: usize, k: u32) -> Option<SchurGenerator> {
    if src == tgt || lambda[src] < k {
        return None;
    }
    let mut a = IMat::diagonal(lambda);
    a.set(src, src, lambda[src] - k);
    a.set(tgt, src, k);
    Some(a)
}

/// Structure constants of the product: a (m x k) times b (k x n) as a combination of
/// (m x n) elements, so that act(a) act(b) = sum coeff * act(c).
pub fn schur_product(a: &IMat, b: &IMat, p: u32) -> Vec<(IMat, u8)> {
    assert_eq!(a.cols, b.rows, "incompatible divided-power product");
    let (m, k, n) = (a.rows, a.cols, b.cols);
    // For each middle index j, a table w_j (m x n) with row sums a[., j] and column sums b[j, .].
    let per_j: Vec<Vec<Vec<u32>>> = (0..k).map(|j| tables(&a.column(j), b.row(j), u32::MAX)).collect();
    if per_j.iter().any(|t| t.is_empty()) {
        return Vec::new();
    }
    let mut acc: BTreeMap<IMat, u32> = BTreeMap::new();
    let mut idx = vec![0usize; k];
    loop {
        let mut c = IMat::zeros(m, n);
        let mut coeff: u32 = 1;
        for i in 0..m {
            for l in 0..n {
                let parts: Vec<u32> = (0..k).map(|j| per_j[j][idx[j]][i * n + l]).collect();
                c.data[i * n + l] = parts.iter().sum();
                coeff = coeff * multinomial_mod(parts, p) as u32 % p;
            }
        }
        if coeff != 0 {
            let e = acc.entry(c).or_insert(0);
            *e = (*e + coeff) % p;
        }
        // Advance the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == k {
                return acc.into_iter().filter(|&(_, v)| v != 0).map(|(c, v)| (c, v as u8)).collect();
            }
            idx[pos] += 1;
            if idx[pos] < per_j[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if k == 0 {
            return acc.into_iter().filter(|&(_, v)| v != 0).map(|(c, v)| (c, v as u8)).collect();
        }
    }
}
