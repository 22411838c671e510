//! Incremental solving of large homogeneous systems with few solutions.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::field::{inv, mul};
use crate::subspace::Subspace;

/// Accumulates linear equations `row . x = 0` one at a time, keeping a sparse
/// echelon basis of the equation space keyed by leading column.
#[derive(Clone, Debug)]
pub struct IncrementalSolver {
    p: u8,
    ncols: usize,
    /// Monic rows keyed by leading column; entries sorted by column.
    pivots: BTreeMap<usize, Vec<(usize, u8)>>,
}

/// Dense accumulator with a min-heap of touched columns.
struct Scratch {
    vals: Vec<u8>,
    heap: BinaryHeap<Reverse<usize>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { vals: vec![0; n], heap: BinaryHeap::new() }
    }

    fn add(&mut self, p: u8, c: usize, v: u8) {
        if v == 0 {
            return;
        }
        let old = self.vals[c];
        self.vals[c] = ((old as u16 + v as u16) % p as u16) as u8;
        if old == 0 {
            self.heap.push(Reverse(c));
        }
    }

    /// Next nonzero column, leaving it in the heap.
    fn lowest(&mut self) -> Option<usize> {
        while let Some(&Reverse(c)) = self.heap.peek() {
            if self.vals[c] != 0 {
                return Some(c);
            }
            self.heap.pop();
        }
        None
    }

    /// Drain the remaining nonzero entries in column order.
    fn drain(&mut self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        while let Some(Reverse(c)) = self.heap.pop() {
            if self.vals[c] != 0 && out.last().map_or(true, |&(d, _)| d != c) {
                out.push((c, self.vals[c]));
                self.vals[c] = 0;
            }
        }
        out
    }
}

impl IncrementalSolver {
    pub fn new(p: u8, ncols: usize) -> Self {
        IncrementalSolver { p, ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Dimension of the current solution space.
    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ncols
    }

    /// Add a sparse equation given as (column, coefficient) pairs; duplicates are summed.
    /// Returns true when the equation was independent of the earlier ones.
    pub fn add_sparse(&mut self, row: &[(usize, u8)]) -> bool {
        if self.is_full() {
            return false;
        }
        match self.reduce(row.iter().copied()) {
            Some(r) => {
                self.pivots.insert(r[0].0, r);
                true
            }
            None => false,
        }
    }

    /// Add a dense equation. Returns true when it was independent.
    pub fn add_dense(&mut self, row: &[u8]) -> bool {
        assert_eq!(row.len(), self.ncols);
        let sparse: Vec<(usize, u8)> = row.iter().enumerate().filter(|(_, &x)| x % self.p != 0).map(|(c, &x)| (c, x)).collect();
        self.add_sparse(&sparse)
    }

    /// Reduce a row against the pivots; returns the monic remainder if nonzero.
    fn reduce(&self, row: impl Iterator<Item = (usize, u8)>) -> Option<Vec<(usize, u8)>> {
        let p = self.p;
        let mut s = Scratch::new(self.ncols);
        for (c, v) in row {
            s.add(p, c, v % p);
        }
        while let Some(c) = s.lowest() {
            let Some(prow) = self.pivots.get(&c) else {
                let f = inv(p, s.vals[c]);
                let mut r = s.drain();
                for e in r.iter_mut() {
                    e.1 = mul(p, e.1, f);
                }
                return Some(r);
            };
            let f = p - s.vals[c];
            for &(j, y) in prow {
                s.add(p, j, mul(p, f, y));
            }
        }
        None
    }

    /// Whether the equation is implied by those already added.
    pub fn implies(&self, row: &[(usize, u8)]) -> bool {
        self.reduce(row.iter().copied()).is_none()
    }

    /// Basis of the solution space by back-substitution, one vector per free column.
    pub fn kernel_vectors(&self) -> Vec<Vec<u8>> {
        let p = self.p;
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![0u8; self.ncols];
                x[f] = 1;
                for (&c, prow) in self.pivots.range(..f).rev() {
                    let mut acc = 0u32;
                    for &(j, y) in &prow[1..] {
                        acc += y as u32 * x[j] as u32;
                    }
                    x[c] = ((p as u32 - acc % p as u32) % p as u32) as u8;
                }
                x
            })
            .collect()
    }

    /// The solution space `{x : row . x = 0 for all added rows}`, canonical.
    pub fn kernel(&self) -> Subspace {
        if self.pivots.is_empty() {
            return Subspace::full(self.p, self.ncols);
        }
        Subspace::span_vectors(self.p, self.ncols, &self.kernel_vectors())
    }
}

/// Counters reported by [`ConstraintRefiner::refine_stream`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RefineStats {
    pub consumed: usize,
    pub verification_failures: usize,
    pub passes: usize,
}

/// Refines a subspace by a stream of linear constraints (functionals on the
/// ambient space), stopping early once the dimension has been stable for
/// `patience` constraints, then re-checking every constraint on the result.
pub struct ConstraintRefiner;

impl ConstraintRefiner {
    pub fn refine_stream(start: &Subspace, constraints: &[Vec<(usize, u8)>], patience: usize) -> (Subspace, RefineStats) {
        let p = start.p();
        let mut stats = RefineStats::default();
        let mut current = start.clone();
        let patience = patience.max(1);
        let mut idx = 0;
        let mut forced: Option<usize> = None;
        loop {
            stats.passes += 1;
            let mut solver = IncrementalSolver::new(p, current.dim());
            if let Some(k) = forced.take() {
                solver.add_dense(&restrict(&current, &constraints[k]));
            }
            let mut stable = 0;
            while idx < constraints.len() && current.dim() > 0 && !solver.is_full() && stable < patience {
                let restricted = restrict(&current, &constraints[idx]);
                stats.consumed += 1;
                idx += 1;
                if solver.add_dense(&restricted) {
                    stable = 0;
                } else {
                    stable += 1;
                }
            }
            current = pull_back(&current, &solver.kernel());
            if current.dim() == 0 {
                return (current, stats);
            }
            // Verification pass over the full stream.
            let failing = constraints.iter().position(|c| restrict(&current, c).iter().any(|&x| x != 0));
            match failing {
                None => return (current, stats),
                Some(k) => {
                    stats.verification_failures += 1;
                    forced = Some(k);
                }
            }
        }
    }
}

/// Values of the functional `c` on the basis vectors of `s`.
fn restrict(s: &Subspace, c: &[(usize, u8)]) -> Vec<u8> {
    let p = s.p() as u32;
    let b = s.basis();
    (0..s.dim())
        .map(|i| {
            let row = b.row(i);
            (c.iter().map(|&(j, v)| v as u32 * row[j] as u32).sum::<u32>() % p) as u8
        })
        .collect()
}

/// Map a subspace of coordinates on `s` back into the ambient space.
fn pull_back(s: &Subspace, coords: &Subspace) -> Subspace {
    if coords.dim() == s.dim() {
        return s.clone();
    }
    if coords.dim() == 0 {
        return Subspace::zero(s.p(), s.ambient());
    }
    Subspace::span(&(coords.basis() * s.basis()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::subspace::kernel;

    #[test]
    fn solver_matches_kernel() {
        let m = Matrix::from_i64(3, 3, 4, &[1, 2, 0, 1, 2, 1, 1, 0, 0, 0, 1, 1]);
        let mut s = IncrementalSolver::new(3, 4);
        for i in 0..3 {
            s.add_dense(m.row(i));
        }
        assert_eq!(s.kernel(), kernel(&m));
        assert!(s.implies(&[(0, 1), (1, 2), (3, 1)]));
    }

    #[test]
    fn refiner_checks_every_constraint() {
        let start = Subspace::full(2, 4);
        // Many redundant constraints first, then a new one: patience 2 stops early,
        // and the verification pass must still pick up the last one.
        let mut cs = vec![vec![(0, 1)]; 5];
        cs.push(vec![(1, 1)]);
        let (s, st) = ConstraintRefiner::refine_stream(&start, &cs, 2);
        assert_eq!(s.dim(), 2);
        assert!(st.verification_failures >= 1);
    }
}
