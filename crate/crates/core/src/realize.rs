//! Functors evaluated at k^n as explicit modules over Schur algebras.
//!
//! Basis labels are flat byte vectors:
//! - `Sym`, `Div`, `Ext`: one exponent vector of length n per tensor factor
//!   (0/1 vectors for exterior factors, read as wedges in increasing index order);
//! - `Tensor(d)`: the d indices of a pure tensor;
//! - `TensorProduct`: concatenation of the children's labels;
//! - `Twist`, `Dual`: the child's label (dual basis for `Dual`);
//! - `Precompose(W, c)`: the label of `c` at ambient dim(W)*n, where basis vector
//!   j of k^n on line l of W has index l*n + j.
//!
//! A divided-power element `a` (rows = target dimension) acts on labels through
//! [`act_label`]; the action of the generic matrix is sum over `a` of t^a act(a).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use polyext_linalg::{Matrix, SparseMatrix, Subspace};

use crate::combinat::{compositions, multinomial_mod, multiset_permutations, tables, GradedSpace};
use crate::expr::FunctorExpr;
use crate::graded::graded_eval_dims;
use crate::schur::IMat;
use crate::Error;

pub type Label = Vec<u8>;

/// Default cap on the dimension of a realization.
pub const DEFAULT_MAX_DIM: usize = 250_000;

/// Length of a label of `expr` at ambient n.
pub fn label_len(expr: &FunctorExpr, n: usize) -> usize {
    use FunctorExpr as E;
    match expr {
        E::Sym(m) | E::Div(m) | E::Ext(m) => m.len() * n,
        E::Tensor(d) => *d as usize,
        E::TensorProduct(cs) => cs.iter().map(|c| label_len(c, n)).sum(),
        E::Twist(_, c) | E::Dual(c) => label_len(c, n),
        E::Precompose(w, c) => label_len(c, w.total_dim() * n),
        E::Unit => 0,
        E::Compose(..) => panic!("composite functors have no module realization"),
    }
}

/// All labels of torus weight `w` (length n), in canonical order.
pub fn labels_of_weight(expr: &FunctorExpr, w: &[u32], p: u32) -> Vec<Label> {
    use FunctorExpr as E;
    let n = w.len();
    match expr {
        E::Sym(m) | E::Div(m) => tables(m.parts(), w, u32::MAX).into_iter().map(to_label).collect(),
        E::Ext(m) => tables(m.parts(), w, 1).into_iter().map(to_label).collect(),
        E::Tensor(d) => {
            if w.iter().sum::<u32>() != *d {
                return Vec::new();
            }
            multiset_permutations(w)
        }
        E::TensorProduct(cs) => {
            let degs: Vec<u32> = cs.iter().map(|c| c.degree(p)).collect();
            let mut out = Vec::new();
            for split in tables(&degs, w, u32::MAX) {
                let per_child: Vec<Vec<Label>> =
                    cs.iter().enumerate().map(|(i, c)| labels_of_weight(c, &split[i * n..(i + 1) * n], p)).collect();
                product_concat(&per_child, &mut out);
            }
            out
        }
        E::Twist(r, c) => {
            let q = p.pow(*r);
            if w.iter().any(|&x| x % q != 0) {
                return Vec::new();
            }
            let inner: Vec<u32> = w.iter().map(|&x| x / q).collect();
            labels_of_weight(c, &inner, p)
        }
        E::Dual(c) => labels_of_weight(c, w, p),
        E::Precompose(g, c) => {
            let lines = g.total_dim();
            let per_j: Vec<Vec<Vec<u32>>> =
                w.iter().map(|&x| compositions(x, lines).into_iter().map(|c| c.0).collect()).collect();
            let mut out = Vec::new();
            let mut fine = vec![0u32; lines * n];
            for_each_choice(&per_j, |choice| {
                for (j, v) in choice.iter().enumerate() {
                    for (l, &x) in v.iter().enumerate() {
                        fine[l * n + j] = x;
                    }
                }
                out.extend(labels_of_weight(c, &fine, p));
            });
            out
        }
        E::Unit => {
            if w.iter().all(|&x| x == 0) {
                vec![Vec::new()]
            } else {
                Vec::new()
            }
        }
        E::Compose(..) => panic!("composite functors have no module realization"),
    }
}

fn to_label(v: Vec<u32>) -> Label {
    v.into_iter().map(|x| u8::try_from(x).expect("exponent exceeds label range")).collect()
}

/// Cartesian product of label lists, concatenated, appended to `out`.
fn product_concat(lists: &[Vec<Label>], out: &mut Vec<Label>) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut lab = Vec::new();
        for (l, &i) in lists.iter().zip(&idx) {
            lab.extend_from_slice(&l[i]);
        }
        out.push(lab);
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Iterate over the Cartesian product of option lists, last index fastest.
pub(crate) fn for_each_choice<T>(options: &[Vec<T>], mut f: impl FnMut(&[&T])) {
    if options.iter().any(|o| o.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; options.len()];
    let mut cur: Vec<&T> = options.iter().map(|o| &o[0]).collect();
    loop {
        f(&cur);
        let mut pos = options.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < options[pos].len() {
                cur[pos] = &options[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            cur[pos] = &options[pos][0];
        }
    }
}

/// Torus weight of a label at ambient n.
pub fn label_weight(expr: &FunctorExpr, n: usize, label: &[u8], p: u32) -> Vec<u32> {
    use FunctorExpr as E;
    match expr {
        E::Sym(_) | E::Div(_) | E::Ext(_) => {
            let mut w = vec![0u32; n];
            for chunk in label.chunks(n.max(1)) {
                for (x, &e) in w.iter_mut().zip(chunk) {
                    *x += e as u32;
                }
            }
            w
        }
        E::Tensor(_) => {
            let mut w = vec![0u32; n];
            for &i in label {
                w[i as usize] += 1;
            }
            w
        }
        E::TensorProduct(cs) => {
            let mut w = vec![0u32; n];
            let mut off = 0;
            for c in cs {
                let len = label_len(c, n);
                for (x, y) in w.iter_mut().zip(label_weight(c, n, &label[off..off + len], p)) {
                    *x += y;
                }
                off += len;
            }
            w
        }
        E::Twist(r, c) => label_weight(c, n, label, p).into_iter().map(|x| x * p.pow(*r)).collect(),
        E::Dual(c) => label_weight(c, n, label, p),
        E::Precompose(g, c) => {
            let lines = g.total_dim();
            let fine = label_weight(c, lines * n, label, p);
            let mut w = vec![0u32; n];
            for l in 0..lines {
                for j in 0..n {
                    w[j] += fine[l * n + j];
                }
            }
            w
        }
        E::Unit => vec![0; n],
        E::Compose(..) => panic!("composite functors have no module realization"),
    }
}

/// Internal degree of a label (nonzero only below Precompose nodes).
pub fn label_grading(expr: &FunctorExpr, n: usize, label: &[u8], p: u32) -> u32 {
    use FunctorExpr as E;
    match expr {
        E::TensorProduct(cs) => {
            let mut off = 0;
            let mut t = 0;
            for c in cs {
                let len = label_len(c, n);
                t += label_grading(c, n, &label[off..off + len], p);
                off += len;
            }
            t
        }
        E::Twist(_, c) | E::Dual(c) => label_grading(c, n, label, p),
        E::Precompose(g, c) => {
            let lines = g.lines();
            let m = lines.len() * n;
            let fine = label_weight(c, m, label, p);
            let own: u32 = (0..lines.len()).map(|l| lines[l] * fine[l * n..(l + 1) * n].iter().sum::<u32>()).sum();
            own + label_grading(c, m, label, p)
        }
        _ => 0,
    }
}

/// Action of the divided-power element `a` on one basis label (at ambient a.cols).
/// Output labels live at ambient a.rows. Coefficients are reduced mod p and nonzero.
pub fn act_label(expr: &FunctorExpr, a: &IMat, label: &[u8], p: u32) -> Vec<(Label, u8)> {
    let mut acc: BTreeMap<Label, u32> = BTreeMap::new();
    act_into(expr, a, label, p, 1, &mut acc);
    acc.into_iter().filter(|&(_, c)| c % p != 0).map(|(l, c)| (l, (c % p) as u8)).collect()
}

fn push(acc: &mut BTreeMap<Label, u32>, l: Label, c: u32, p: u32) {
    let e = acc.entry(l).or_insert(0);
    *e = (*e + c) % p;
}

fn act_into(expr: &FunctorExpr, a: &IMat, label: &[u8], p: u32, scale: u32, acc: &mut BTreeMap<Label, u32>) {
    use FunctorExpr as E;
    let (m, n) = (a.rows, a.cols);
    match expr {
        E::Sym(_) | E::Div(_) | E::Ext(_) => {
            let factors: Vec<&[u8]> = if n == 0 { Vec::new() } else { label.chunks(n).collect() };
            let k = factors.len();
            if k == 0 {
                push(acc, Vec::new(), scale, p);
                return;
            }
            let is_ext = matches!(expr, E::Ext(_));
            let max = if is_ext { 1 } else { u32::MAX };
            // Per source column j: ways to split a's column among the factors.
            let mut per_col: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
            for j in 0..n {
                let rs: Vec<u32> = factors.iter().map(|f| f[j] as u32).collect();
                let opts = tables(&rs, &a.column(j), max);
                if opts.is_empty() {
                    return;
                }
                per_col.push(opts);
            }
            for_each_choice(&per_col, |choice| {
                // choice[j] is a k x m table: factor i receives choice[j][i*m + t] at target t.
                let mut coeff = scale;
                let mut out: Label = Vec::with_capacity(k * m);
                for i in 0..k {
                    let mut row = vec![0u32; m];
                    for j in 0..n {
                        for t in 0..m {
                            row[t] += choice[j][i * m + t];
                        }
                    }
                    match expr {
                        E::Sym(_) => {
                            for j in 0..n {
                                coeff = coeff * multinomial_mod(choice[j][i * m..(i + 1) * m].iter().copied(), p) as u32 % p;
                            }
                        }
                        E::Div(_) => {
                            for t in 0..m {
                                coeff = coeff * multinomial_mod((0..n).map(|j| choice[j][i * m + t]), p) as u32 % p;
                            }
                        }
                        _ => {
                            if row.iter().any(|&x| x > 1) {
                                coeff = 0;
                            } else {
                                // Source wedge in increasing j; targets in that order.
                                let targets: Vec<usize> = (0..n)
                                    .filter(|&j| factors[i][j] == 1)
                                    .map(|j| (0..m).find(|&t| choice[j][i * m + t] == 1).unwrap())
                                    .collect();
                                if inversions(&targets) % 2 == 1 {
                                    coeff = (p - coeff % p) % p;
                                }
                            }
                        }
                    }
                    if coeff == 0 {
                        return;
                    }
                    out.extend(row.into_iter().map(|x| x as u8));
                }
                push(acc, out, coeff, p);
            });
        }
        E::Tensor(d) => {
            let d = *d as usize;
            let mut positions: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (k, &i) in label.iter().enumerate() {
                positions[i as usize].push(k);
            }
            let mut per_src: Vec<Vec<Vec<u8>>> = Vec::with_capacity(n);
            for j in 0..n {
                let col = a.column(j);
                if col.iter().sum::<u32>() as usize != positions[j].len() {
                    return;
                }
                per_src.push(multiset_permutations(&col));
            }
            for_each_choice(&per_src, |choice| {
                let mut out = vec![0u8; d];
                for j in 0..n {
                    for (k, &pos) in positions[j].iter().enumerate() {
                        out[pos] = choice[j][k];
                    }
                }
                push(acc, out, scale, p);
            });
        }
        E::TensorProduct(cs) => {
            let mut parts: Vec<(&FunctorExpr, &[u8], Vec<u32>)> = Vec::with_capacity(cs.len());
            let mut off = 0;
            for c in cs {
                let len = label_len(c, n);
                let l = &label[off..off + len];
                parts.push((c, l, label_weight(c, n, l, p)));
                off += len;
            }
            let mut per_col: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
            for j in 0..n {
                let rs: Vec<u32> = parts.iter().map(|x| x.2[j]).collect();
                let opts = tables(&rs, &a.column(j), u32::MAX);
                if opts.is_empty() {
                    return;
                }
                per_col.push(opts);
            }
            let k = cs.len();
            for_each_choice(&per_col, |choice| {
                // Build per-child matrices and multiply the children's outputs.
                let mut partial: Vec<(Label, u32)> = vec![(Vec::new(), scale)];
                for i in 0..k {
                    let mut ai = IMat::zeros(m, n);
                    for j in 0..n {
                        for t in 0..m {
                            ai.set(t, j, choice[j][i * m + t]);
                        }
                    }
                    let outs = act_label(parts[i].0, &ai, parts[i].1, p);
                    if outs.is_empty() {
                        return;
                    }
                    let mut next = Vec::with_capacity(partial.len() * outs.len());
                    for (pl, pc) in &partial {
                        for (ol, oc) in &outs {
                            let mut l = pl.clone();
                            l.extend_from_slice(ol);
                            next.push((l, pc * *oc as u32 % p));
                        }
                    }
                    partial = next;
                }
                for (l, c) in partial {
                    push(acc, l, c, p);
                }
            });
        }
        E::Twist(r, c) => {
            let q = p.pow(*r);
            if a.divisible_by(q) {
                act_into(c, &a.div(q), label, p, scale, acc);
            }
        }
        E::Dual(c) => {
            // act(F#, a) is the transpose of act(F, a^T).
            let at = a.transpose();
            let target_w = a.row_sums();
            for v in labels_of_weight(c, &target_w, p) {
                for (u, coeff) in act_label(c, &at, &v, p) {
                    if u == label {
                        push(acc, v.clone(), scale * coeff as u32 % p, p);
                    }
                }
            }
        }
        E::Precompose(g, c) => {
            let lines = g.total_dim();
            let fine = label_weight(c, lines * n, label, p);
            let mut per_col: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
            for j in 0..n {
                let rs: Vec<u32> = (0..lines).map(|l| fine[l * n + j]).collect();
                let opts = tables(&rs, &a.column(j), u32::MAX);
                if opts.is_empty() {
                    return;
                }
                per_col.push(opts);
            }
            for_each_choice(&per_col, |choice| {
                let blocks: Vec<IMat> = (0..lines)
                    .map(|l| {
                        let mut b = IMat::zeros(m, n);
                        for j in 0..n {
                            for t in 0..m {
                                b.set(t, j, choice[j][l * m + t]);
                            }
                        }
                        b
                    })
                    .collect();
                act_into(c, &IMat::block_diagonal(&blocks), label, p, scale, acc);
            });
        }
        E::Unit => push(acc, Vec::new(), scale, p),
        E::Compose(..) => panic!("composite functors have no module realization"),
    }
}

fn inversions(v: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                c += 1;
            }
        }
    }
    c
}

/// Labels of one weight space with a lookup index.
#[derive(Clone, Debug)]
pub struct WeightBasis {
    pub weight: Vec<u32>,
    pub labels: Vec<Label>,
    pub index: HashMap<Label, usize>,
}

impl WeightBasis {
    pub fn new(expr: &FunctorExpr, weight: &[u32], p: u32) -> Self {
        let labels = labels_of_weight(expr, weight, p);
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        WeightBasis { weight: weight.to_vec(), labels, index }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Matrix (dst.len x src.len) of act(a) from one weight space to another.
pub fn act_block(expr: &FunctorExpr, a: &IMat, src: &WeightBasis, dst: &WeightBasis, p: u32) -> SparseMatrix {
    let mut t = Vec::new();
    for (j, l) in src.labels.iter().enumerate() {
        for (out, c) in act_label(expr, a, l, p) {
            let i = *dst.index.get(&out).expect("action left the target weight space");
            t.push((i, j, c));
        }
    }
    SparseMatrix::from_triplets(p as u8, dst.len(), src.len(), t)
}

/// A functor evaluated at k^n with its basis, torus weights, grading and action.
pub struct Realization {
    expr: FunctorExpr,
    n: usize,
    p: u32,
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
    weights: Vec<Vec<u32>>,
    grading: Option<Vec<u32>>,
    blocks: BTreeMap<Vec<u32>, Vec<usize>>,
    cache: RwLock<HashMap<IMat, Arc<SparseMatrix>>>,
}

impl std::fmt::Debug for Realization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Realization({} at k^{}, p={}, dim {})", self.expr, self.n, self.p, self.dim())
    }
}

impl Realization {
    pub fn new(expr: &FunctorExpr, n: usize, p: u32) -> Result<Self, Error> {
        Self::with_budget(expr, n, p, DEFAULT_MAX_DIM)
    }

    pub fn with_budget(expr: &FunctorExpr, n: usize, p: u32, max_dim: usize) -> Result<Self, Error> {
        if !expr.is_realizable() {
            return Err(Error::Unsupported(format!("composite functor {expr} has no module realization")));
        }
        if n == 0 && expr.degree(p) > 0 {
            return Err(Error::Unsupported("ambient dimension must be positive".into()));
        }
        let predicted = graded_eval_dims(expr, &GradedSpace::ungraded(n), p)?.total_dim();
        if predicted > max_dim {
            return Err(Error::Capacity(format!("realization of {expr} at k^{n} has dimension {predicted} > {max_dim}")));
        }
        let d = expr.degree(p);
        let mut labels = Vec::with_capacity(predicted);
        let mut weights = Vec::with_capacity(predicted);
        let mut blocks = BTreeMap::new();
        for w in compositions(d, n) {
            let ls = labels_of_weight(expr, &w.0, p);
            if ls.is_empty() {
                continue;
            }
            let start = labels.len();
            blocks.insert(w.0.clone(), (start..start + ls.len()).collect());
            for l in ls {
                labels.push(l);
                weights.push(w.0.clone());
            }
        }
        let grading = expr.is_graded().then(|| labels.iter().map(|l| label_grading(expr, n, l, p)).collect());
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(Realization { expr: expr.clone(), n, p, labels, index, weights, grading, blocks, cache: RwLock::new(HashMap::new()) })
    }

    /// Rebuild a realization from a stored basis without enumerating labels:
    /// weights, blocks and grading are recomputed from the labels themselves.
    pub fn from_labels(expr: &FunctorExpr, n: usize, p: u32, labels: Vec<Label>) -> Result<Self, Error> {
        if !expr.is_realizable() {
            return Err(Error::Unsupported(format!("composite functor {expr} has no module realization")));
        }
        let d = expr.degree(p);
        let len = label_len(expr, n);
        let mut weights = Vec::with_capacity(labels.len());
        let mut blocks: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.len() != len {
                return Err(Error::Verification(format!("stored label {l:?} of {expr} has length {} instead of {len}", l.len())));
            }
            let w = label_weight(expr, n, l, p);
            if w.len() != n || w.iter().sum::<u32>() != d {
                return Err(Error::Verification(format!("stored label {l:?} of {expr} has weight {w:?}")));
            }
            blocks.entry(w.clone()).or_default().push(i);
            weights.push(w);
        }
        let grading = expr.is_graded().then(|| labels.iter().map(|l| label_grading(expr, n, l, p)).collect());
        let index: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        if index.len() != labels.len() {
            return Err(Error::Verification(format!("stored basis of {expr} repeats a label")));
        }
        Ok(Realization { expr: expr.clone(), n, p, labels, index, weights, grading, blocks, cache: RwLock::new(HashMap::new()) })
    }

    pub fn expr(&self) -> &FunctorExpr {
        &self.expr
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degree(&self) -> u32 {
        self.expr.degree(self.p)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, l: &[u8]) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn weights(&self) -> &[Vec<u32>] {
        &self.weights
    }

    pub fn grading(&self) -> Option<&[u32]> {
        self.grading.as_deref()
    }

    /// Weight -> basis indices (contiguous, ascending).
    pub fn weight_blocks(&self) -> &BTreeMap<Vec<u32>, Vec<usize>> {
        &self.blocks
    }

    pub fn weight_indices(&self, w: &[u32]) -> &[usize] {
        self.blocks.get(w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Span of the basis vectors of weight `lambda`.
    pub fn weight_space(&self, lambda: &[u32]) -> Subspace {
        let idx = self.weight_indices(lambda);
        let rows: Vec<Vec<u8>> = idx
            .iter()
            .map(|&i| {
                let mut v = vec![0u8; self.dim()];
                v[i] = 1;
                v
            })
            .collect();
        Subspace::span_vectors(self.p as u8, self.dim(), &rows)
    }

    /// Action of a square divided-power element of degree deg(expr), cached.
    pub fn act(&self, xi: &IMat) -> Arc<SparseMatrix> {
        assert_eq!((xi.rows, xi.cols), (self.n, self.n), "generator has the wrong size");
        if let Some(m) = self.cache.read().unwrap().get(xi) {
            return m.clone();
        }
        let src_w = xi.col_sums();
        let mut t = Vec::new();
        if xi.degree() == self.degree() {
            for &j in self.weight_indices(&src_w) {
                for (out, c) in act_label(&self.expr, xi, &self.labels[j], self.p) {
                    let i = self.index[&out];
                    t.push((i, j, c));
                }
            }
        }
        let m = Arc::new(SparseMatrix::from_triplets(self.p as u8, self.dim(), self.dim(), t));
        self.cache.write().unwrap().insert(xi.clone(), m.clone());
        m
    }

    pub fn act_dense(&self, xi: &IMat) -> Matrix {
        self.act(xi).to_dense()
    }

    /// Sub-realization spanned by the basis vectors of internal degree `t`.
    pub fn graded_indices(&self, t: u32) -> Vec<usize> {
        match &self.grading {
            Some(g) => (0..self.dim()).filter(|&i| g[i] == t).collect(),
            None if t == 0 => (0..self.dim()).collect(),
            None => Vec::new(),
        }
    }

    /// Degrees that occur in the grading (just 0 when ungraded).
    pub fn degrees(&self) -> Vec<u32> {
        match &self.grading {
            Some(g) => {
                let mut d: Vec<u32> = g.clone();
                d.sort_unstable();
                d.dedup();
                d
            }
            None => vec![0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn real(s: &str, n: usize, p: u32) -> Realization {
        Realization::new(&parse(s, p).unwrap(), n, p).unwrap()
    }

    #[test]
    fn tensor_square() {
        let r = real("T[2]", 2, 2);
        assert_eq!(r.dim(), 4);
        let mut ws: Vec<Vec<u32>> = r.weights().to_vec();
        ws.sort();
        assert_eq!(ws, vec![vec![0, 2], vec![1, 1], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(real("S[2]", 2, 2).dim(), 3);
        assert_eq!(real("tw(1, S[1])", 2, 2).dim(), 2);
        assert_eq!(real("L[2]", 2, 3).weight_indices(&[1, 1]).len(), 1);
        assert_eq!(real("S[3]", 3, 2).weight_indices(&[3, 0, 0]).len(), 1);
        assert_eq!(real("T[2]", 2, 2).weight_indices(&[1, 1]).len(), 2);
    }

    #[test]
    fn twist_action_on_identity() {
        // The divided square of e_12 acts on I^(1)(k^2) as e_12 acts on k^2.
        let r = real("tw(1, S[1])", 2, 2);
        let xi = IMat::from_pairs(2, &[(0, 1), (0, 1)]);
        let m = r.act_dense(&xi);
        let id = real("S[1]", 2, 2);
        let plain = id.act_dense(&IMat::from_pairs(2, &[(0, 1)]));
        assert_eq!(m, plain);
        assert!(r.act_dense(&IMat::from_pairs(2, &[(0, 1), (1, 1)])).is_zero());
    }

    #[test]
    fn exterior_sign() {
        // Swapping the two basis vectors sends x1^x2 to x2^x1 = -x1^x2.
        let r = real("L[2]", 2, 3);
        let swap = IMat::from_pairs(2, &[(0, 1), (1, 0)]);
        let m = r.act_dense(&swap);
        assert_eq!(m.get(0, 0), 2);
    }
}
