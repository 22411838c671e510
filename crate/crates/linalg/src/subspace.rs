//! Subspaces of F_p^n held in canonical reduced echelon form.

use crate::matrix::{rref, Matrix};
use crate::LinalgError;

/// A subspace of F_p^ambient. `basis` rows are the nonzero rows of the canonical
/// reduced echelon form, so two equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u8, ambient: usize) -> Self {
        Subspace { basis: Matrix::zeros(p, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(p: u8, ambient: usize) -> Self {
        Subspace { basis: Matrix::identity(p, ambient), pivots: (0..ambient).collect() }
    }

    /// Row space of `m`.
    pub fn span(m: &Matrix) -> Self {
        let e = rref(m);
        let basis = e.matrix.select_rows(&(0..e.rank).collect::<Vec<_>>());
        Subspace { basis, pivots: e.pivots }
    }

    pub fn span_vectors(p: u8, ambient: usize, vs: &[Vec<u8>]) -> Self {
        Self::span(&Matrix::from_rows(p, ambient, vs))
    }

    pub fn p(&self) -> u8 {
        self.basis.p()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u8>> {
        (0..self.dim()).map(|i| self.basis.row(i).to_vec()).collect()
    }

    fn check(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient() != other.ambient() {
            return Err(LinalgError::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        Ok(Subspace::span(&self.basis.vstack(&other.basis)))
    }

    /// Intersection via the kernel of `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        let p = self.p();
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(p, self.ambient()));
        }
        let m = self.basis.transpose().hstack(&other.basis.transpose().neg());
        let k = kernel(&m);
        let a = self.dim();
        let coeffs = k.basis.select_cols(&(0..a).collect::<Vec<_>>());
        Ok(Subspace::span(&(&coeffs * &self.basis)))
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(v.len(), self.ambient());
        let p = self.p();
        let coords: Vec<u8> = self.pivots.iter().map(|&c| v[c] % p).collect();
        let mut recon = vec![0u8; self.ambient()];
        for (i, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (r, &b) in recon.iter_mut().zip(self.basis.row(i)) {
                *r = ((*r as u16 + c as u16 * b as u16) % p as u16) as u8;
            }
        }
        let matches = recon.iter().zip(v).all(|(&a, &b)| a == b % p);
        matches.then_some(coords)
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    /// Image of the subspace under `m` acting on column vectors (`m` is target x ambient).
    pub fn image_under(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient());
        Subspace::span(&(&self.basis * &m.transpose()))
    }
}

/// Null space `{v : m v = 0}` in canonical form.
pub fn kernel(m: &Matrix) -> Subspace {
    let p = m.p();
    let n = m.cols();
    let e = rref(m);
    let free: Vec<usize> = {
        let mut is_piv = vec![false; n];
        for &c in &e.pivots {
            is_piv[c] = true;
        }
        (0..n).filter(|&c| !is_piv[c]).collect()
    };
    let mut vs = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![0u8; n];
        v[f] = 1;
        for (i, &c) in e.pivots.iter().enumerate() {
            let x = e.matrix.get(i, f);
            v[c] = if x == 0 { 0 } else { p - x };
        }
        vs.push(v);
    }
    Subspace::span_vectors(p, n, &vs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Matrix::identity(3, 4)).dim(), 0);
        assert_eq!(kernel(&Matrix::zeros(2, 3, 5)), Subspace::full(2, 5));
        let k = kernel(&Matrix::from_rows(2, 2, &[vec![1, 1]]));
        assert_eq!(k.basis_vectors(), vec![vec![1, 1]]);
    }

    #[test]
    fn intersect_examples() {
        let a = Subspace::full(2, 2);
        let b = Subspace::span_vectors(2, 2, &[vec![1, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), b);
        assert_eq!(b.intersect(&Subspace::zero(2, 2)).unwrap().dim(), 0);
        assert!(a.intersect(&Subspace::zero(2, 3)).is_err());
    }

    #[test]
    fn coordinates_roundtrip() {
        let s = Subspace::span_vectors(3, 3, &[vec![1, 2, 0], vec![0, 1, 1]]);
        let v = vec![2, 2, 1]; // 2*(1,2,0) + 1*(0,1,1) reduced: (2,5,1) = (2,2,1)
        assert!(s.contains(&v));
        assert!(!s.contains(&[0, 0, 1]));
    }
}
