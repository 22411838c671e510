//! Word-packed matrices over F_2.

use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        assert_eq!(m.p(), 2);
        let mut b = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for (j, &x) in m.row(i).iter().enumerate() {
                if x != 0 {
                    b.data[i * b.words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        b
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(2, self.rows, self.cols, |i, j| self.get(i, j) as u8)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] ^= 1 << (j % 64);
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let w = self.words;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (word, bit) = (c / 64, c % 64);
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * w + word] >> bit & 1 == 1) else {
                continue;
            };
            if piv != r {
                for k in 0..w {
                    self.data.swap(piv * w + k, r * w + k);
                }
            }
            let (head, tail) = self.data.split_at_mut(r * w);
            let (prow, rest) = tail.split_at_mut(w);
            for i in 0..r {
                let row = &mut head[i * w..(i + 1) * w];
                if row[word] >> bit & 1 == 1 {
                    for k in word..w {
                        row[k] ^= prow[k];
                    }
                }
            }
            for i in 0..self.rows - r - 1 {
                let row = &mut rest[i * w..(i + 1) * w];
                if row[word] >> bit & 1 == 1 {
                    for k in word..w {
                        row[k] ^= prow[k];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rref_in_place;

    #[test]
    fn agrees_with_generic_elimination() {
        let m = Matrix::from_rows(
            2,
            70,
            &(0..9)
                .map(|i| (0..70).map(|j| (((i * 7 + j * 3) % 5) % 2) as u8).collect())
                .collect::<Vec<_>>(),
        );
        let mut b = BitMatrix::from_matrix(&m);
        let pb = b.rref();
        let mut g = m.clone();
        let pg = rref_in_place(&mut g);
        assert_eq!(pb, pg);
        assert_eq!(b.to_matrix(), g);
    }
}
