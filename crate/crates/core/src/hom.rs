//! Hom spaces in the functor category as Schur-algebra intertwiners.

use std::collections::BTreeMap;

use polyext_linalg::{kernel, IncrementalSolver, Matrix, SparseMatrix, Subspace};

use crate::combinat::{Composition, GradedSpace};
use crate::expr::FunctorExpr;
use crate::realize::{labels_of_weight, label_grading, Realization};
use crate::schur::{raising_generator, schur_basis, IMat};
use crate::Error;

/// A canonical basis of Hom(src, dst) at a common ambient.
#[derive(Clone, Debug)]
pub struct HomBasis {
    pub src: FunctorExpr,
    pub dst: FunctorExpr,
    pub ambient: usize,
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
    /// Basis maps (rows = dim dst, cols = dim src).
    pub basis: Vec<SparseMatrix>,
    /// Degree of each basis map (target degree plus source degree) when either side is graded.
    pub grading: Option<Vec<u32>>,
    /// Row-major vectorizations of the basis maps, in canonical echelon form.
    pub space: Subspace,
}

impl HomBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Graded dimension table (degree 0 only when ungraded).
    pub fn graded_dims(&self) -> GradedSpace {
        let mut g = GradedSpace::default();
        match &self.grading {
            Some(d) => d.iter().for_each(|&t| g.add(t, 1)),
            None => g.add(0, self.dim()),
        }
        g
    }

    /// Coordinates of a map in this basis, if it lies in the span.
    pub fn coordinates(&self, m: &SparseMatrix) -> Option<Vec<u8>> {
        self.space.coordinates(&vectorize(m))
    }
}

pub(crate) fn vectorize(m: &SparseMatrix) -> Vec<u8> {
    let mut v = vec![0u8; m.rows() * m.cols()];
    for (i, j, c) in m.entries() {
        v[i * m.cols() + j] = c;
    }
    v
}

fn unvectorize(p: u8, rows: usize, cols: usize, v: &[u8]) -> SparseMatrix {
    SparseMatrix::from_triplets(p, rows, cols, v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k / cols, k % cols, c)))
}

fn check_pair(f: &Realization, g: &Realization) -> Result<bool, Error> {
    if f.ambient() != g.ambient() || f.p() != g.p() {
        return Err(Error::Unsupported("Hom needs realizations at the same ambient and prime".into()));
    }
    if f.degree() != g.degree() {
        return Ok(false);
    }
    if f.ambient() < f.degree() as usize {
        return Err(Error::Unsupported(format!(
            "ambient {} is below the degree {}; intertwiners need not be natural",
            f.ambient(),
            f.degree()
        )));
    }
    Ok(true)
}

/// Variable layout: one unknown per (dst index, src index) pair of equal weight.
struct Layout {
    var: BTreeMap<(usize, usize), usize>,
    pairs: Vec<(usize, usize)>,
}

impl Layout {
    fn new(f: &Realization, g: &Realization) -> Self {
        let mut var = BTreeMap::new();
        let mut pairs = Vec::new();
        for (w, fi) in f.weight_blocks() {
            for &r in g.weight_indices(w) {
                for &c in fi {
                    var.insert((r, c), pairs.len());
                    pairs.push((r, c));
                }
            }
        }
        Layout { var, pairs }
    }
}

/// Constraint rows of X act_F(xi) - act_G(xi) X = 0.
fn constraints(f: &Realization, g: &Realization, lay: &Layout, xi: &IMat) -> Vec<Vec<(usize, u8)>> {
    let p = f.p();
    let af = f.act(xi);
    let ag = g.act(xi);
    let src_w = xi.col_sums();
    let dst_w = xi.row_sums();
    // Entry (r, c) with r of weight dst_w in G and c of weight src_w in F.
    let af_cols = af.transpose().row_lists(); // af_cols[c] = [(s, a)] with s of weight dst_w
    let ag_rows = ag.row_lists();
    let mut out = Vec::new();
    for &r in g.weight_indices(&dst_w) {
        for &c in f.weight_indices(&src_w) {
            let mut row: BTreeMap<usize, u32> = BTreeMap::new();
            for &(s, a) in &af_cols[c] {
                if let Some(&v) = lay.var.get(&(r, s)) {
                    *row.entry(v).or_insert(0) += a as u32;
                }
            }
            for &(s, a) in &ag_rows[r] {
                if let Some(&v) = lay.var.get(&(s, c)) {
                    *row.entry(v).or_insert(0) += (p - a as u32) % p;
                }
            }
            let row: Vec<(usize, u8)> = row.into_iter().filter(|(_, x)| x % p != 0).map(|(v, x)| (v, (x % p) as u8)).collect();
            if !row.is_empty() {
                out.push(row);
            }
        }
    }
    out
}

/// Generators used to build the constraint system: divided powers of e_{i,i+1}
/// and e_{i+1,i} on every weight of F.
fn generating_set(f: &Realization) -> Vec<IMat> {
    let n = f.ambient();
    let mut out = Vec::new();
    for w in f.weight_blocks().keys() {
        for i in 0..n.saturating_sub(1) {
            for (src, tgt) in [(i, i + 1), (i + 1, i)] {
                for k in 1..=w[src] {
                    out.extend(raising_generator(w, src, tgt, k));
                }
            }
        }
    }
    out
}

/// The verification sweep: all divided powers of all off-diagonal units on every
/// weight, plus a deterministic stride through the full Schur basis.
fn verification_set(f: &Realization, budget: usize) -> Vec<IMat> {
    let n = f.ambient();
    let mut out = Vec::new();
    for w in f.weight_blocks().keys() {
        for src in 0..n {
            for tgt in 0..n {
                for k in 1..=w[src] {
                    out.extend(raising_generator(w, src, tgt, k));
                }
            }
        }
    }
    let full = schur_basis(n, f.degree());
    let stride = (full.len() / budget.max(1)).max(1);
    out.extend(full.into_iter().step_by(stride));
    out
}

/// Intertwiner space Hom(F, G), solved incrementally and verified.
pub fn hom_space(f: &Realization, g: &Realization) -> Result<HomBasis, Error> {
    let ok = check_pair(f, g)?;
    let lay = Layout::new(f, g);
    let p = f.p();
    if !ok || lay.pairs.is_empty() {
        return Ok(assemble(f, g, &lay, Subspace::zero(p as u8, 0)));
    }
    let mut solver = IncrementalSolver::new(p as u8, lay.pairs.len());
    for xi in generating_set(f) {
        for row in constraints(f, g, &lay, &xi) {
            solver.add_sparse(&row);
        }
    }
    // Verification: every constraint of the sweep must vanish on the solution basis.
    loop {
        let sols = solver.kernel_vectors();
        let mut failures = 0;
        for xi in verification_set(f, 400) {
            for row in constraints(f, g, &lay, &xi) {
                let bad = sols.iter().any(|x| row.iter().map(|&(v, a)| a as u32 * x[v] as u32).sum::<u32>() % p != 0);
                if bad {
                    solver.add_sparse(&row);
                    failures += 1;
                }
            }
        }
        if failures == 0 {
            break;
        }
    }
    Ok(assemble(f, g, &lay, solver.kernel()))
}

/// Brute-force oracle: impose the constraints of every element of the full Schur basis.
pub fn hom_space_bruteforce(f: &Realization, g: &Realization) -> Result<HomBasis, Error> {
    let ok = check_pair(f, g)?;
    let p = f.p();
    // Dense unknowns for every matrix entry, without the weight-block shortcut.
    let (rows, cols) = (g.dim(), f.dim());
    let nvar = rows * cols;
    if !ok || nvar == 0 {
        let lay = Layout { var: BTreeMap::new(), pairs: Vec::new() };
        return Ok(assemble(f, g, &lay, Subspace::zero(p as u8, 0)));
    }
    let mut eqs: Vec<Vec<u8>> = Vec::new();
    for xi in schur_basis(f.ambient(), f.degree()) {
        let af = f.act_dense(&xi);
        let ag = g.act_dense(&xi);
        for r in 0..rows {
            for c in 0..cols {
                let mut row = vec![0u8; nvar];
                for s in 0..cols {
                    let a = af.get(s, c);
                    if a != 0 {
                        row[r * cols + s] = ((row[r * cols + s] as u32 + a as u32) % p) as u8;
                    }
                }
                for s in 0..rows {
                    let a = ag.get(r, s);
                    if a != 0 {
                        row[s * cols + c] = ((row[s * cols + c] as u32 + p - a as u32) % p) as u8;
                    }
                }
                if row.iter().any(|&x| x != 0) {
                    eqs.push(row);
                }
            }
        }
    }
    let sys = if eqs.is_empty() { Matrix::zeros(p as u8, 0, nvar) } else { Matrix::from_rows(p as u8, nvar, &eqs) };
    let ker = kernel(&sys);
    let lay = Layout { var: BTreeMap::new(), pairs: (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect() };
    Ok(assemble(f, g, &lay, ker))
}

fn assemble(f: &Realization, g: &Realization, lay: &Layout, ker: Subspace) -> HomBasis {
    let (rows, cols) = (g.dim(), f.dim());
    let mut vecs = Vec::with_capacity(ker.dim());
    for v in ker.basis_vectors() {
        let mut full = vec![0u8; rows * cols];
        for (k, &x) in v.iter().enumerate() {
            if x != 0 {
                let (r, c) = lay.pairs[k];
                full[r * cols + c] = x;
            }
        }
        vecs.push(full);
    }
    from_vectors(f, g, &vecs)
}

fn from_vectors(f: &Realization, g: &Realization, vecs: &[Vec<u8>]) -> HomBasis {
    let p = f.p() as u8;
    let (rows, cols) = (g.dim(), f.dim());
    let space = Subspace::span_vectors(p, rows * cols, vecs);
    let basis: Vec<SparseMatrix> = space.basis_vectors().iter().map(|v| unvectorize(p, rows, cols, v)).collect();
    let graded = f.grading().is_some() || g.grading().is_some();
    let grading = graded.then(|| {
        basis
            .iter()
            .map(|m| {
                let (r, c, _) = m.entries().next().expect("basis maps are nonzero");
                g.grading().map(|x| x[r]).unwrap_or(0) + f.grading().map(|x| x[c]).unwrap_or(0)
            })
            .collect()
    });
    HomBasis {
        src: f.expr().clone(),
        dst: g.expr().clone(),
        ambient: f.ambient(),
        p: f.p(),
        rows,
        cols,
        basis,
        grading,
        space,
    }
}

impl HomBasis {
    /// Rebuild from stored basis maps, recomputing the echelon space and grading.
    /// The maps must be exactly the canonical basis `hom_space` returns.
    pub fn from_maps(f: &Realization, g: &Realization, maps: &[SparseMatrix]) -> Result<Self, Error> {
        if maps.iter().any(|m| m.rows() != g.dim() || m.cols() != f.dim() || m.p() as u32 != f.p()) {
            return Err(Error::Verification(format!("stored Hom({}, {}) maps have the wrong shape", f.expr(), g.expr())));
        }
        let vecs: Vec<Vec<u8>> = maps.iter().map(vectorize).collect();
        let h = from_vectors(f, g, &vecs);
        if h.basis != maps {
            return Err(Error::Verification(format!("stored Hom({}, {}) basis is not in canonical form", f.expr(), g.expr())));
        }
        Ok(h)
    }
}

/// Which side a map is composed on in [`induced`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// x -> m o x.
    Post,
    /// x -> x o m.
    Pre,
}

/// Matrix of x -> m o x (Post) or x -> x o m (Pre) from the basis `from` to the basis `to`.
pub fn induced(m: &SparseMatrix, from: &HomBasis, to: &HomBasis, side: Side) -> Result<Matrix, Error> {
    let p = from.p as u8;
    let mut out = Matrix::zeros(p, to.dim(), from.dim());
    for (j, x) in from.basis.iter().enumerate() {
        let y = match side {
            Side::Post => m.mul(x),
            Side::Pre => x.mul(m),
        };
        if (y.rows(), y.cols()) != (to.rows, to.cols) {
            return Err(Error::Unsupported("induced map has the wrong shape".into()));
        }
        let c = to.coordinates(&y).ok_or_else(|| Error::Verification("composite is not in the target Hom space".into()))?;
        for (i, v) in c.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Tensor product of two maps a: F1 -> G1 and b: F2 -> G2 in the bases of the
/// realizations of F1 * F2 and G1 * G2 (labels concatenate).
pub fn cup_hom(
    a: &SparseMatrix,
    (f1, g1): (&Realization, &Realization),
    b: &SparseMatrix,
    (f2, g2): (&Realization, &Realization),
    (f12, g12): (&Realization, &Realization),
) -> Result<SparseMatrix, Error> {
    let p = f1.p();
    let idx = |r: &Realization, x: &[u8], y: &[u8]| -> Result<usize, Error> {
        r.index_of(&[x, y].concat()).ok_or_else(|| Error::Unsupported(format!("{} is not the tensor product realization", r.expr())))
    };
    let mut t = Vec::new();
    for (i1, j1, c1) in a.entries() {
        for (i2, j2, c2) in b.entries() {
            let row = idx(g12, &g1.labels()[i1], &g2.labels()[i2])?;
            let col = idx(f12, &f1.labels()[j1], &f2.labels()[j2])?;
            t.push((row, col, (c1 as u32 * c2 as u32 % p) as u8));
        }
    }
    Ok(SparseMatrix::from_triplets(p as u8, g12.dim(), f12.dim(), t))
}

/// Graded dims of Hom(Gamma^lambda, F): the lambda-weight space of F(k^n), n = len(lambda).
pub fn yoneda_hom(lambda: &[u32], f: &FunctorExpr, p: u32) -> GradedSpace {
    let mut g = GradedSpace::default();
    if f.degree(p) != lambda.iter().sum::<u32>() {
        return g;
    }
    for l in labels_of_weight(f, lambda, p) {
        g.add(label_grading(f, lambda.len(), &l, p), 1);
    }
    g
}

/// Whether Hom(F, S^mu) vanishes, computed by the intertwiner solver at ambient deg.
pub fn hom_twist_vanishing(f: &FunctorExpr, mu: &Composition, p: u32) -> Result<bool, Error> {
    let d = f.degree(p);
    if d != mu.weight() {
        return Ok(true);
    }
    let n = (d as usize).max(1);
    let fr = Realization::new(f, n, p)?;
    let gr = Realization::new(&FunctorExpr::Sym(mu.clone()), n, p)?;
    Ok(hom_space(&fr, &gr)?.dim() == 0)
}

/// dim Hom(F, G) = dim Hom(F^(r), G^(r)), each at its own degree as ambient.
pub fn fr_hom_iso_check(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32) -> Result<(usize, usize), Error> {
    let plain = hom_dim(f, g, p)?;
    let twisted = hom_dim(&FunctorExpr::twist(r, f.clone()), &FunctorExpr::twist(r, g.clone()), p)?;
    Ok((plain, twisted))
}

/// dim Hom(F, G) by the intertwiner solver at ambient max(deg, 1).
pub fn hom_dim(f: &FunctorExpr, g: &FunctorExpr, p: u32) -> Result<usize, Error> {
    if f.degree(p) != g.degree(p) {
        return Ok(0);
    }
    let n = (f.degree(p) as usize).max(1);
    let fr = Realization::new(f, n, p)?;
    let gr = Realization::new(g, n, p)?;
    Ok(hom_space(&fr, &gr)?.dim())
}
