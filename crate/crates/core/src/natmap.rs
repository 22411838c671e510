//! Formal natural transformations between direct sums of functors.
//!
//! A [`NatMapExpr`] is built from atoms (multiplication, comultiplication, factor
//! permutations, the twist inclusion, summand injections and projections) and is
//! closed under composition, sums, scalars, tensor products and direct sums.
//! Maps are evaluated label by label at any ambient dimension, so the same formula
//! serves plain evaluation and evaluation at graded spaces W (x) k^n.

use std::collections::BTreeMap;
use std::fmt;

use polyext_linalg::SparseMatrix;

use crate::combinat::{binom_mod, Composition, GradedSpace, PowerKind};
use crate::expr::FunctorExpr;
use crate::realize::{label_len, Label, Realization, WeightBasis};
use crate::Error;

/// A direct sum of functors, one entry per summand.
pub type Obj = Vec<FunctorExpr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NatMapExpr {
    Identity(Obj),
    Zero { src: Obj, dst: Obj },
    /// `c * f`.
    Scalar(u8, Box<NatMapExpr>),
    /// X^mu -> X^mu' multiplying factors `at` and `at + 1`.
    Mult { kind: PowerKind, parts: Vec<u32>, at: usize },
    /// X^mu -> X^mu' splitting factor `at` into parts (a, mu_at - a).
    Comult { kind: PowerKind, parts: Vec<u32>, at: usize, first: u32 },
    /// Permutation of tensor factors: output factor i is input factor sigma[i].
    /// Factors are the parts of S/L/G, the positions of T[d], or the children of a product.
    Perm { obj: FunctorExpr, sigma: Vec<usize> },
    /// S^{mu(r)} -> S^{p^r mu}, x^e -> x^{p^r e}.
    InclTwist { p: u32, r: u32, parts: Vec<u32> },
    /// obj[index] -> obj.
    Inject { obj: Obj, index: usize },
    /// obj -> obj[index].
    Project { obj: Obj, index: usize },
    /// `f o g` (g applied first).
    Compose(Box<NatMapExpr>, Box<NatMapExpr>),
    Add(Box<NatMapExpr>, Box<NatMapExpr>),
    /// f (x) g on single-summand sources, extended summand-wise.
    Tensor(Box<NatMapExpr>, Box<NatMapExpr>),
    DirectSum(Box<NatMapExpr>, Box<NatMapExpr>),
    /// f(W (x) I).
    Pre(GradedSpace, Box<NatMapExpr>),
    /// f^(r) = f o I^(r).
    TwistMap(u32, Box<NatMapExpr>),
}

use NatMapExpr as N;

fn power(kind: PowerKind, parts: Vec<u32>) -> FunctorExpr {
    let c = Composition::new(parts);
    match kind {
        PowerKind::Sym => FunctorExpr::Sym(c),
        PowerKind::Ext => FunctorExpr::Ext(c),
        PowerKind::Div => FunctorExpr::Div(c),
    }
}

/// Tensor product of two functors, merging adjacent powers of the same kind.
/// Labels of the merged form equal the concatenated labels, so this is label-safe.
pub fn tensor_obj(a: &FunctorExpr, b: &FunctorExpr) -> FunctorExpr {
    use FunctorExpr as E;
    match (a, b) {
        (E::Sym(x), E::Sym(y)) => E::Sym(Composition::new([x.parts(), y.parts()].concat())),
        (E::Ext(x), E::Ext(y)) => E::Ext(Composition::new([x.parts(), y.parts()].concat())),
        (E::Div(x), E::Div(y)) => E::Div(Composition::new([x.parts(), y.parts()].concat())),
        (E::Unit, _) => b.clone(),
        (_, E::Unit) => a.clone(),
        (E::TensorProduct(xs), E::TensorProduct(ys)) => E::TensorProduct(xs.iter().chain(ys).cloned().collect()),
        (E::TensorProduct(xs), _) => E::TensorProduct(xs.iter().cloned().chain([b.clone()]).collect()),
        (_, E::TensorProduct(ys)) => E::TensorProduct([a.clone()].into_iter().chain(ys.iter().cloned()).collect()),
        _ => E::TensorProduct(vec![a.clone(), b.clone()]),
    }
}

fn merge_parts(parts: &[u32], at: usize) -> Vec<u32> {
    let mut out = parts[..at].to_vec();
    out.push(parts[at] + parts[at + 1]);
    out.extend_from_slice(&parts[at + 2..]);
    out
}

fn split_parts(parts: &[u32], at: usize, first: u32) -> Vec<u32> {
    let mut out = parts[..at].to_vec();
    out.push(first);
    out.push(parts[at] - first);
    out.extend_from_slice(&parts[at + 1..]);
    out
}

/// Factors of a permutable object and the permuted object.
fn permuted(obj: &FunctorExpr, sigma: &[usize]) -> Result<FunctorExpr, Error> {
    use FunctorExpr as E;
    let k = sigma.len();
    let mut seen = vec![false; k];
    for &s in sigma {
        if s >= k || seen[s] {
            return Err(Error::Unsupported(format!("{sigma:?} is not a permutation")));
        }
        seen[s] = true;
    }
    let bad = || Error::Unsupported(format!("permutation of {k} factors does not fit {obj}"));
    Ok(match obj {
        E::Sym(m) | E::Ext(m) | E::Div(m) => {
            if m.len() != k {
                return Err(bad());
            }
            let parts: Vec<u32> = sigma.iter().map(|&s| m.parts()[s]).collect();
            let c = Composition::new(parts);
            match obj {
                E::Sym(_) => E::Sym(c),
                E::Ext(_) => E::Ext(c),
                _ => E::Div(c),
            }
        }
        E::Tensor(d) => {
            if *d as usize != k {
                return Err(bad());
            }
            obj.clone()
        }
        E::TensorProduct(cs) => {
            if cs.len() != k {
                return Err(bad());
            }
            E::TensorProduct(sigma.iter().map(|&s| cs[s].clone()).collect())
        }
        _ => return Err(bad()),
    })
}

impl NatMapExpr {
    pub fn identity(obj: Obj) -> Self {
        N::Identity(obj)
    }

    pub fn mult(parts: &[u32], at: usize) -> Self {
        N::Mult { kind: PowerKind::Sym, parts: parts.to_vec(), at }
    }

    pub fn comult(parts: &[u32], at: usize, first: u32) -> Self {
        N::Comult { kind: PowerKind::Sym, parts: parts.to_vec(), at, first }
    }

    pub fn perm(obj: FunctorExpr, sigma: Vec<usize>) -> Self {
        N::Perm { obj, sigma }
    }

    pub fn scalar(c: u8, f: NatMapExpr) -> Self {
        N::Scalar(c, Box::new(f))
    }

    /// `f o g`, checking that g's target is f's source.
    pub fn compose(f: NatMapExpr, g: NatMapExpr) -> Result<Self, Error> {
        if f.src()? != g.dst()? {
            return Err(Error::Unsupported(format!("cannot compose: {} != {}", fmt_obj(&f.src()?), fmt_obj(&g.dst()?))));
        }
        Ok(N::Compose(Box::new(f), Box::new(g)))
    }

    pub fn add(f: NatMapExpr, g: NatMapExpr) -> Result<Self, Error> {
        if f.src()? != g.src()? || f.dst()? != g.dst()? {
            return Err(Error::Unsupported("cannot add maps with different source or target".into()));
        }
        Ok(N::Add(Box::new(f), Box::new(g)))
    }

    pub fn tensor(f: NatMapExpr, g: NatMapExpr) -> Self {
        N::Tensor(Box::new(f), Box::new(g))
    }

    pub fn direct_sum(f: NatMapExpr, g: NatMapExpr) -> Self {
        N::DirectSum(Box::new(f), Box::new(g))
    }

    pub fn src(&self) -> Result<Obj, Error> {
        Ok(match self {
            N::Identity(o) => o.clone(),
            N::Zero { src, .. } => src.clone(),
            N::Scalar(_, f) => f.src()?,
            N::Mult { kind, parts, at } | N::Comult { kind, parts, at, .. } => {
                if let N::Mult { .. } = self {
                    if at + 1 >= parts.len() {
                        return Err(Error::Unsupported(format!("mult at {at} needs two factors")));
                    }
                } else if let N::Comult { first, .. } = self {
                    if *at >= parts.len() || *first > parts[*at] {
                        return Err(Error::Unsupported("comultiplication does not fit".into()));
                    }
                }
                vec![power(*kind, parts.clone())]
            }
            N::Perm { obj, sigma } => {
                permuted(obj, sigma)?;
                vec![obj.clone()]
            }
            N::InclTwist { r, parts, .. } => vec![FunctorExpr::twist(*r, FunctorExpr::sym(parts))],
            N::Inject { obj, index } => vec![obj.get(*index).cloned().ok_or_else(|| Error::Unsupported("bad summand index".into()))?],
            N::Project { obj, .. } => obj.clone(),
            N::Compose(_, g) => g.src()?,
            N::Add(f, _) => f.src()?,
            N::Tensor(f, g) => {
                let (a, c) = (f.src()?, g.src()?);
                a.iter().flat_map(|x| c.iter().map(move |y| tensor_obj(x, y))).collect()
            }
            N::DirectSum(f, g) => [f.src()?, g.src()?].concat(),
            N::Pre(w, f) => f.src()?.into_iter().map(|s| FunctorExpr::precompose(w.clone(), s)).collect(),
            N::TwistMap(r, f) => f.src()?.into_iter().map(|s| FunctorExpr::twist(*r, s)).collect(),
        })
    }

    pub fn dst(&self) -> Result<Obj, Error> {
        Ok(match self {
            N::Identity(o) => o.clone(),
            N::Zero { dst, .. } => dst.clone(),
            N::Scalar(_, f) => f.dst()?,
            N::Mult { kind, parts, at } => {
                self.src()?;
                vec![power(*kind, merge_parts(parts, *at))]
            }
            N::Comult { kind, parts, at, first } => {
                self.src()?;
                vec![power(*kind, split_parts(parts, *at, *first))]
            }
            N::Perm { obj, sigma } => vec![permuted(obj, sigma)?],
            N::InclTwist { p, r, parts } => vec![FunctorExpr::Sym(Composition::new(parts.clone()).scale(p.pow(*r)))],
            N::Inject { obj, .. } => obj.clone(),
            N::Project { obj, index } => vec![obj.get(*index).cloned().ok_or_else(|| Error::Unsupported("bad summand index".into()))?],
            N::Compose(f, _) => f.dst()?,
            N::Add(f, _) => f.dst()?,
            N::Tensor(f, g) => {
                let (b, d) = (f.dst()?, g.dst()?);
                b.iter().flat_map(|x| d.iter().map(move |y| tensor_obj(x, y))).collect()
            }
            N::DirectSum(f, g) => [f.dst()?, g.dst()?].concat(),
            N::Pre(w, f) => f.dst()?.into_iter().map(|s| FunctorExpr::precompose(w.clone(), s)).collect(),
            N::TwistMap(r, f) => f.dst()?.into_iter().map(|s| FunctorExpr::twist(*r, s)).collect(),
        })
    }

    /// Image of one basis label of source summand `idx`, at ambient n.
    pub fn apply(&self, n: usize, p: u32, idx: usize, label: &[u8]) -> Vec<(usize, Label, u8)> {
        let mut acc: BTreeMap<(usize, Label), u32> = BTreeMap::new();
        self.apply_into(n, p, idx, label, 1, &mut acc);
        acc.into_iter().filter(|(_, c)| *c % p != 0).map(|((i, l), c)| (i, l, (c % p) as u8)).collect()
    }

    fn apply_into(&self, n: usize, p: u32, idx: usize, label: &[u8], scale: u32, acc: &mut BTreeMap<(usize, Label), u32>) {
        let mut push = |i: usize, l: Label, c: u32| {
            let e = acc.entry((i, l)).or_insert(0);
            *e = (*e + c) % p;
        };
        match self {
            N::Identity(_) => push(idx, label.to_vec(), scale),
            N::Zero { .. } => {}
            N::Scalar(c, f) => f.apply_into(n, p, idx, label, scale * *c as u32 % p, acc),
            N::Mult { kind, at, .. } => {
                let (pre, rest) = label.split_at(at * n);
                let (x, rest) = rest.split_at(n);
                let (y, post) = rest.split_at(n);
                let mut c = scale;
                let mut z = vec![0u8; n];
                match kind {
                    PowerKind::Sym => {
                        for v in 0..n {
                            z[v] = x[v] + y[v];
                        }
                    }
                    PowerKind::Div => {
                        for v in 0..n {
                            z[v] = x[v] + y[v];
                            c = c * binom_mod(z[v] as u64, x[v] as u64, p) as u32 % p;
                        }
                    }
                    PowerKind::Ext => {
                        for v in 0..n {
                            if x[v] + y[v] > 1 {
                                return;
                            }
                            z[v] = x[v] + y[v];
                        }
                        if shuffle_inversions(x, y) % 2 == 1 {
                            c = (p - c) % p;
                        }
                    }
                }
                if c != 0 {
                    push(0, [pre, &z, post].concat(), c);
                }
            }
            N::Comult { kind, parts, at, first } => {
                let (pre, rest) = label.split_at(at * n);
                let (x, post) = rest.split_at(n);
                let total = parts[*at];
                debug_assert_eq!(x.iter().map(|&v| v as u32).sum::<u32>(), total);
                let bound: Vec<u32> = x.iter().map(|&v| v as u32).collect();
                for c in sub_vectors(&bound, *first) {
                    let y: Vec<u8> = c.iter().map(|&v| v as u8).collect();
                    let z: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                    let mut coeff = scale;
                    match kind {
                        PowerKind::Sym => {
                            for v in 0..n {
                                coeff = coeff * binom_mod(x[v] as u64, y[v] as u64, p) as u32 % p;
                            }
                        }
                        PowerKind::Div => {}
                        PowerKind::Ext => {
                            if shuffle_inversions(&y, &z) % 2 == 1 {
                                coeff = (p - coeff) % p;
                            }
                        }
                    }
                    if coeff != 0 {
                        push(0, [pre, &y, &z, post].concat(), coeff);
                    }
                }
            }
            N::Perm { obj, sigma } => {
                let chunks = factor_chunks(obj, n, label);
                let out: Label = sigma.iter().flat_map(|&s| chunks[s].iter().copied()).collect();
                push(0, out, scale);
            }
            N::InclTwist { r, .. } => {
                let q = p.pow(*r);
                let out: Label = label.iter().map(|&v| u8::try_from(v as u32 * q).expect("exponent overflow")).collect();
                push(0, out, scale);
            }
            N::Inject { index, .. } => push(*index, label.to_vec(), scale),
            N::Project { index, .. } => {
                if idx == *index {
                    push(0, label.to_vec(), scale);
                }
            }
            N::Compose(f, g) => {
                for (i, l, c) in g.apply(n, p, idx, label) {
                    f.apply_into(n, p, i, &l, scale * c as u32 % p, acc);
                }
            }
            N::Add(f, g) => {
                f.apply_into(n, p, idx, label, scale, acc);
                g.apply_into(n, p, idx, label, scale, acc);
            }
            N::Tensor(f, g) => {
                let (fs, gs) = (f.src().expect("ill-typed map"), g.src().expect("ill-typed map"));
                let gd = g.dst().expect("ill-typed map").len();
                let (i, j) = (idx / gs.len(), idx % gs.len());
                let (a, b) = label.split_at(label_len(&fs[i], n));
                let left = f.apply(n, p, i, a);
                let right = g.apply(n, p, j, b);
                for (li, ll, lc) in &left {
                    for (ri, rl, rc) in &right {
                        let c = scale * *lc as u32 % p * *rc as u32 % p;
                        push(li * gd + ri, [ll.as_slice(), rl.as_slice()].concat(), c);
                    }
                }
            }
            N::DirectSum(f, g) => {
                let fs = f.src().expect("ill-typed map").len();
                if idx < fs {
                    f.apply_into(n, p, idx, label, scale, acc);
                } else {
                    let fd = f.dst().expect("ill-typed map").len();
                    for (i, l, c) in g.apply(n, p, idx - fs, label) {
                        push(fd + i, l, scale * c as u32 % p);
                    }
                }
            }
            N::Pre(w, f) => f.apply_into(w.total_dim() * n, p, idx, label, scale, acc),
            N::TwistMap(_, f) => f.apply_into(n, p, idx, label, scale, acc),
        }
    }

    /// Whether the map is built only from atoms that lift along the Frobenius twist.
    pub fn is_liftable(&self) -> bool {
        twist_lift(self, 1, 2).is_ok()
    }
}

/// Number of pairs (i in x, j in y) with i > j, for 0/1 vectors.
fn shuffle_inversions(x: &[u8], y: &[u8]) -> usize {
    let mut count = 0;
    let mut ones_y_below = 0;
    for v in 0..x.len() {
        if x[v] == 1 {
            count += ones_y_below;
        }
        if y[v] == 1 {
            ones_y_below += 1;
        }
    }
    count
}

/// All vectors c <= bound with |c| = total.
pub(crate) fn sub_vectors(bound: &[u32], total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; bound.len()];
    fn rec(i: usize, left: u32, bound: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == bound.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u32 = bound[i + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for c in lo..=bound[i].min(left) {
            cur[i] = c;
            rec(i + 1, left - c, bound, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total, bound, &mut cur, &mut out);
    out
}

fn factor_chunks<'a>(obj: &FunctorExpr, n: usize, label: &'a [u8]) -> Vec<&'a [u8]> {
    use FunctorExpr as E;
    match obj {
        E::Sym(_) | E::Ext(_) | E::Div(_) => label.chunks(n.max(1)).collect(),
        E::Tensor(_) => label.chunks(1).collect(),
        E::TensorProduct(cs) => {
            let mut out = Vec::with_capacity(cs.len());
            let mut off = 0;
            for c in cs {
                let len = label_len(c, n);
                out.push(&label[off..off + len]);
                off += len;
            }
            out
        }
        _ => vec![label],
    }
}

pub fn fmt_obj(o: &[FunctorExpr]) -> String {
    if o.is_empty() {
        return "0".into();
    }
    o.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" + ")
}

impl fmt::Display for NatMapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            N::Identity(o) => write!(f, "id[{}]", fmt_obj(o)),
            N::Zero { src, dst } => write!(f, "0[{} -> {}]", fmt_obj(src), fmt_obj(dst)),
            N::Scalar(c, g) => write!(f, "{c}*({g})"),
            N::Mult { kind, parts, at } => write!(f, "mult{}({parts:?}@{at})", kind_tag(*kind)),
            N::Comult { kind, parts, at, first } => write!(f, "comult{}({parts:?}@{at}:{first})", kind_tag(*kind)),
            N::Perm { obj, sigma } => write!(f, "perm{sigma:?}[{obj}]"),
            N::InclTwist { r, parts, .. } => write!(f, "incl_tw({r}, {parts:?})"),
            N::Inject { obj, index } => write!(f, "inj{index}[{}]", fmt_obj(obj)),
            N::Project { obj, index } => write!(f, "proj{index}[{}]", fmt_obj(obj)),
            N::Compose(a, b) => write!(f, "({a}) o ({b})"),
            N::Add(a, b) => write!(f, "{a} + {b}"),
            N::Tensor(a, b) => write!(f, "({a}) (x) ({b})"),
            N::DirectSum(a, b) => write!(f, "({a}) (+) ({b})"),
            N::Pre(w, a) => write!(f, "pre({w}, {a})"),
            N::TwistMap(r, a) => write!(f, "tw({r}, {a})"),
        }
    }
}

fn kind_tag(k: PowerKind) -> &'static str {
    match k {
        PowerKind::Sym => "",
        PowerKind::Ext => "_L",
        PowerKind::Div => "_G",
    }
}

/// Matrix of f between direct sums of realizations (block rows/cols in summand order).
pub fn nat_eval(f: &NatMapExpr, src: &[&Realization], dst: &[&Realization]) -> Result<SparseMatrix, Error> {
    let p = src.first().or(dst.first()).map(|r| r.p()).unwrap_or(2);
    let (fs, fd) = (f.src()?, f.dst()?);
    let se: Vec<FunctorExpr> = src.iter().map(|r| r.expr().clone()).collect();
    let de: Vec<FunctorExpr> = dst.iter().map(|r| r.expr().clone()).collect();
    if fs != se || fd != de {
        return Err(Error::Unsupported(format!(
            "map {} -> {} evaluated between {} and {}",
            fmt_obj(&fs),
            fmt_obj(&fd),
            fmt_obj(&se),
            fmt_obj(&de)
        )));
    }
    let n = src.iter().chain(dst).map(|r| r.ambient()).next().unwrap_or(1);
    if src.iter().chain(dst).any(|r| r.ambient() != n) {
        return Err(Error::Unsupported("realizations at different ambients".into()));
    }
    let soff = offsets(src.iter().map(|r| r.dim()));
    let doff = offsets(dst.iter().map(|r| r.dim()));
    let mut t = Vec::new();
    for (si, r) in src.iter().enumerate() {
        for (j, l) in r.labels().iter().enumerate() {
            for (di, out, c) in f.apply(n, p, si, l) {
                let i = dst[di].index_of(&out).ok_or_else(|| Error::Verification(format!("{f} left its target basis")))?;
                t.push((doff[di] + i, soff[si] + j, c));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(p as u8, *doff.last().unwrap(), *soff.last().unwrap(), t))
}

/// Evaluate f at k^n, building the realizations of its source and target.
pub fn nat_eval_at(f: &NatMapExpr, n: usize, p: u32) -> Result<(Vec<Realization>, Vec<Realization>, SparseMatrix), Error> {
    let src: Vec<Realization> = f.src()?.iter().map(|e| Realization::new(e, n, p)).collect::<Result<_, _>>()?;
    let dst: Vec<Realization> = f.dst()?.iter().map(|e| Realization::new(e, n, p)).collect::<Result<_, _>>()?;
    let m = nat_eval(f, &src.iter().collect::<Vec<_>>(), &dst.iter().collect::<Vec<_>>())?;
    Ok((src, dst, m))
}

/// Matrix of f between single weight spaces of one source and one target summand.
pub fn nat_eval_weight(f: &NatMapExpr, p: u32, si: usize, src: &WeightBasis, di: usize, dst: &WeightBasis) -> SparseMatrix {
    let n = src.weight.len();
    let mut t = Vec::new();
    for (j, l) in src.labels.iter().enumerate() {
        for (d, out, c) in f.apply(n, p, si, l) {
            if d == di {
                let i = *dst.index.get(&out).expect("map left the target weight space");
                t.push((i, j, c));
            }
        }
    }
    SparseMatrix::from_triplets(p as u8, dst.len(), src.len(), t)
}

pub(crate) fn offsets(dims: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for d in dims {
        out.push(out.last().unwrap() + d);
    }
    out
}

fn lift_obj(e: &FunctorExpr, q: u32) -> Result<FunctorExpr, Error> {
    use FunctorExpr as E;
    Ok(match e {
        E::Sym(m) => E::Sym(m.scale(q)),
        E::Tensor(d) => E::sym(&vec![q; *d as usize]),
        E::Unit => E::Unit,
        E::TensorProduct(cs) => E::TensorProduct(cs.iter().map(|c| lift_obj(c, q)).collect::<Result<_, _>>()?),
        _ => return Err(Error::NotLiftable(format!("{e} is not a sum of symmetric powers"))),
    })
}

/// The canonical lift f_r: S^{p^r lambda} -> S^{p^r mu}, defined on liftable atoms.
pub fn twist_lift(f: &NatMapExpr, r: u32, p: u32) -> Result<NatMapExpr, Error> {
    let q = p.pow(r);
    let lo = |o: &Obj| -> Result<Obj, Error> { o.iter().map(|e| lift_obj(e, q)).collect() };
    Ok(match f {
        N::Identity(o) => N::Identity(lo(o)?),
        N::Zero { src, dst } => N::Zero { src: lo(src)?, dst: lo(dst)? },
        N::Scalar(c, g) => N::Scalar(*c, Box::new(twist_lift(g, r, p)?)),
        N::Mult { kind: PowerKind::Sym, parts, at } => N::Mult { kind: PowerKind::Sym, parts: parts.iter().map(|x| x * q).collect(), at: *at },
        // Positions of T[d] become the factors of S[q,...,q].
        N::Perm { obj, sigma } => N::Perm { obj: lift_obj(obj, q)?, sigma: sigma.clone() },
        N::Inject { obj, index } => N::Inject { obj: lo(obj)?, index: *index },
        N::Project { obj, index } => N::Project { obj: lo(obj)?, index: *index },
        N::Compose(a, b) => N::Compose(Box::new(twist_lift(a, r, p)?), Box::new(twist_lift(b, r, p)?)),
        N::Add(a, b) => N::Add(Box::new(twist_lift(a, r, p)?), Box::new(twist_lift(b, r, p)?)),
        N::Tensor(a, b) => N::Tensor(Box::new(twist_lift(a, r, p)?), Box::new(twist_lift(b, r, p)?)),
        N::DirectSum(a, b) => N::DirectSum(Box::new(twist_lift(a, r, p)?), Box::new(twist_lift(b, r, p)?)),
        N::Mult { .. } => return Err(Error::NotLiftable("multiplication of exterior or divided powers".into())),
        N::Comult { .. } => return Err(Error::NotLiftable("comultiplication".into())),
        N::InclTwist { .. } => return Err(Error::NotLiftable("twist inclusion".into())),
        N::Pre(..) | N::TwistMap(..) => return Err(Error::NotLiftable(format!("{f}"))),
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::schur_basis;

    fn eval(f: &NatMapExpr, n: usize, p: u32) -> (Vec<Realization>, Vec<Realization>, SparseMatrix) {
        nat_eval_at(f, n, p).unwrap()
    }

    #[test]
    fn mult_on_tensor_square() {
        let f = NatMapExpr::mult(&[1, 1], 0);
        let (src, dst, m) = eval(&f, 2, 2);
        // x (x) y and y (x) x both go to xy.
        let xy = dst[0].index_of(&[1, 1]).unwrap();
        let a = src[0].index_of(&[1, 0, 0, 1]).unwrap();
        let b = src[0].index_of(&[0, 1, 1, 0]).unwrap();
        assert_eq!(m.get(xy, a), 1);
        assert_eq!(m.get(xy, b), 1);
    }

    #[test]
    fn swap_on_tensor_square() {
        let f = NatMapExpr::perm(FunctorExpr::Tensor(2), vec![1, 0]);
        let (src, _, m) = eval(&f, 2, 2);
        let a = src[0].index_of(&[0, 1]).unwrap();
        let b = src[0].index_of(&[1, 0]).unwrap();
        assert_eq!(m.get(b, a), 1);
        assert_eq!(m.get(a, a), 0);
    }

    #[test]
    fn atoms_are_natural() {
        let maps = vec![
            NatMapExpr::mult(&[1, 2], 0),
            NatMapExpr::comult(&[3], 0, 1),
            NatMapExpr::Mult { kind: PowerKind::Ext, parts: vec![1, 1], at: 0 },
            NatMapExpr::Comult { kind: PowerKind::Ext, parts: vec![2], at: 0, first: 1 },
            NatMapExpr::Mult { kind: PowerKind::Div, parts: vec![1, 2], at: 0 },
            NatMapExpr::Comult { kind: PowerKind::Div, parts: vec![3], at: 0, first: 2 },
            NatMapExpr::perm(FunctorExpr::sym(&[2, 1]), vec![1, 0]),
            NatMapExpr::perm(FunctorExpr::Tensor(3), vec![2, 0, 1]),
        ];
        for p in [2u32, 3] {
            for f in &maps {
                let (src, dst, m) = eval(f, 2, p);
                for a in schur_basis(2, 3) {
                    let lhs = m.mul(&src[0].act(&a));
                    let rhs = dst[0].act(&a).mul(&m);
                    assert_eq!(lhs.to_dense(), rhs.to_dense(), "{f} at p={p}");
                }
            }
        }
    }

    #[test]
    fn incl_twist_is_natural() {
        let f = NatMapExpr::InclTwist { p: 2, r: 1, parts: vec![1] };
        let (src, dst, m) = eval(&f, 2, 2);
        assert_eq!(dst[0].expr(), &FunctorExpr::sym(&[2]));
        for a in schur_basis(2, 2) {
            assert_eq!(m.mul(&src[0].act(&a)).to_dense(), dst[0].act(&a).mul(&m).to_dense());
        }
    }

    #[test]
    fn lifting_scales_parts() {
        let f = NatMapExpr::mult(&[1, 1], 0);
        let g = twist_lift(&f, 1, 2).unwrap();
        assert_eq!(g, NatMapExpr::mult(&[2, 2], 0));
        assert!(twist_lift(&NatMapExpr::comult(&[2], 0, 1), 1, 2).is_err());
    }
}
