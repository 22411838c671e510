//! Ext between strict polynomial functors.
//!
//! Targets are coresolved by sums of (graded or Sha-filtered) symmetric powers. Hom
//! from the source into each summand S^nu is computed by Yoneda as the dual of the
//! nu-weight space of the source, and the differentials are transported through the
//! Schur-algebra action, so no intertwiner solving is needed.

use std::collections::{BTreeMap, HashMap};

use polyext_linalg::SparseMatrix;

use crate::combinat::{compositions, e_space, tables, GradedSpace};
use crate::coresolve::Coresolution;
use crate::expr::FunctorExpr;
use crate::natmap::{twist_lift, NatMapExpr};
use crate::pcomplex::troesch_delta;
use crate::realize::{act_block, label_grading, Label, WeightBasis, DEFAULT_MAX_DIM};
use crate::schur::IMat;
use crate::Error;

/// How a block of a term is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// S^mu(V).
    Plain,
    /// S^mu(W (x) V); the degrees of W contribute to the internal grading.
    Graded,
    /// The Sha-degree `degree` summand of S^mu(Sha (x) V), sitting in row `row` of a
    /// Troesch bicomplex.
    Filtered { degree: u32, row: u32 },
}

/// S^parts evaluated on (lines (x) V), restricted according to `role`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub parts: Vec<u32>,
    pub lines: Vec<u32>,
    pub role: Role,
}

impl Block {
    fn flat_len(&self) -> usize {
        self.parts.len() * self.lines.len()
    }
}

/// An operation on one block of a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockOp {
    /// A natural map of the symmetric powers, applied on lines (x) V.
    Nat(NatMapExpr),
    /// The Troesch differential of level r, iterated `power` times.
    Troesch { r: u32, power: u32 },
}

/// `coef * op` applied to block `block` of term `src`, landing in term `dst`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermMap {
    pub src: usize,
    pub dst: usize,
    pub block: usize,
    pub op: BlockOp,
    pub coef: u8,
}

/// A complex whose terms are direct sums of tensor products of blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjComplex {
    pub p: u32,
    pub terms: Vec<Vec<Vec<Block>>>,
    pub maps: Vec<Vec<TermMap>>,
}

fn sign(k: usize, p: u32) -> u8 {
    if k % 2 == 0 || p == 2 {
        1
    } else {
        (p - 1) as u8
    }
}

impl InjComplex {
    pub fn from_coresolution(c: &Coresolution, p: u32) -> Self {
        let (lines, role) = match &c.lines {
            Some(l) => (l.clone(), Role::Graded),
            None => (vec![0], Role::Plain),
        };
        let terms = c
            .terms
            .iter()
            .map(|t| t.iter().map(|mu| vec![Block { parts: mu.clone(), lines: lines.clone(), role }]).collect())
            .collect();
        let maps = c
            .diffs
            .iter()
            .map(|d| d.iter().map(|(i, j, f)| TermMap { src: *i, dst: *j, block: 0, op: BlockOp::Nat(f.clone()), coef: 1 }).collect())
            .collect();
        InjComplex { p, terms, maps }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Totalization of the Troesch bicomplex T(J, r): row b of the column of S^lambda
    /// is the Sha-degree D(b) part of S^{p^r lambda}(Sha_r (x) I), with
    /// D(2i) = p^r i and D(2i+1) = p^r i + p^{r-1}. Horizontal maps are the canonical
    /// lifts of the differentials of J; vertical maps alternate d and d^{p-1}.
    pub fn twisted(c: &Coresolution, r: u32, p: u32) -> Result<Self, Error> {
        if c.lines.is_some() {
            return Err(Error::Unsupported("twisting a precomposed coresolution".into()));
        }
        if r == 0 {
            return Ok(Self::from_coresolution(c, p));
        }
        let q = p.pow(r);
        let lines: Vec<u32> = (0..q).collect();
        let row_degree = |b: u32| q * (b / 2) + if b % 2 == 1 { q / p } else { 0 };
        let mut terms: Vec<Vec<Vec<Block>>> = Vec::new();
        let mut index: HashMap<(usize, usize, u32), usize> = HashMap::new();
        for (a, summands) in c.terms.iter().enumerate() {
            for (i, lambda) in summands.iter().enumerate() {
                let top = (q - 1) * q * lambda.iter().sum::<u32>();
                let mut b = 0u32;
                while row_degree(b) <= top {
                    let n = a + b as usize;
                    if terms.len() <= n {
                        terms.resize(n + 1, Vec::new());
                    }
                    index.insert((a, i, b), terms[n].len());
                    let parts = lambda.iter().map(|x| x * q).collect();
                    terms[n].push(vec![Block { parts, lines: lines.clone(), role: Role::Filtered { degree: row_degree(b), row: b } }]);
                    b += 1;
                }
            }
        }
        let mut maps: Vec<Vec<TermMap>> = vec![Vec::new(); terms.len().saturating_sub(1)];
        for (a, entries) in c.diffs.iter().enumerate() {
            for (i, i2, f) in entries {
                let g = twist_lift(f, r, p)?;
                for b in 0u32.. {
                    let (Some(&s), Some(&d)) = (index.get(&(a, *i, b)), index.get(&(a + 1, *i2, b))) else {
                        if index.contains_key(&(a, *i, b)) {
                            continue;
                        }
                        break;
                    };
                    maps[a + b as usize].push(TermMap { src: s, dst: d, block: 0, op: BlockOp::Nat(g.clone()), coef: 1 });
                }
            }
        }
        for (&(a, i, b), &s) in &index {
            if let Some(&d) = index.get(&(a, i, b + 1)) {
                let power = if b % 2 == 0 { 1 } else { p - 1 };
                maps[a + b as usize].push(TermMap { src: s, dst: d, block: 0, op: BlockOp::Troesch { r, power }, coef: sign(a, p) });
            }
        }
        for m in &mut maps {
            m.sort_by_key(|t| (t.src, t.dst));
        }
        Ok(InjComplex { p, terms, maps })
    }

    /// Tensor product with the Koszul sign on the second factor's differential.
    pub fn tensor(&self, other: &InjComplex) -> Self {
        let p = self.p;
        let len = self.len() + other.len() - 1;
        let mut terms: Vec<Vec<Vec<Block>>> = vec![Vec::new(); len];
        let mut index = HashMap::new();
        for n in 0..len {
            for a in 0..self.len() {
                let Some(b) = n.checked_sub(a).filter(|&b| b < other.len()) else { continue };
                for (i, x) in self.terms[a].iter().enumerate() {
                    for (j, y) in other.terms[b].iter().enumerate() {
                        index.insert((a, i, b, j), terms[n].len());
                        terms[n].push([x.as_slice(), y.as_slice()].concat());
                    }
                }
            }
        }
        let mut maps: Vec<Vec<TermMap>> = vec![Vec::new(); len.saturating_sub(1)];
        for a in 0..self.len() {
            for b in 0..other.len() {
                if a + 1 < self.len() {
                    for t in &self.maps[a] {
                        for j in 0..other.terms[b].len() {
                            maps[a + b].push(TermMap { src: index[&(a, t.src, b, j)], dst: index[&(a + 1, t.dst, b, j)], ..t.clone() });
                        }
                    }
                }
                if b + 1 < other.len() {
                    for t in &other.maps[b] {
                        for (i, x) in self.terms[a].iter().enumerate() {
                            maps[a + b].push(TermMap {
                                src: index[&(a, i, b, t.src)],
                                dst: index[&(a, i, b + 1, t.dst)],
                                block: t.block + x.len(),
                                op: t.op.clone(),
                                coef: ((t.coef as u32 * sign(a, p) as u32) % p) as u8,
                            });
                        }
                    }
                }
            }
        }
        InjComplex { p, terms, maps }
    }
}

fn has_twist(e: &FunctorExpr) -> bool {
    use FunctorExpr as E;
    match e {
        E::Twist(r, c) => *r > 0 || has_twist(c),
        E::TensorProduct(cs) => cs.iter().any(has_twist),
        E::Dual(c) | E::Precompose(_, c) => has_twist(c),
        E::Compose(a, b) => has_twist(a) || has_twist(b),
        _ => false,
    }
}

/// Injective coresolution of a target in the catalog: tensor products of S, L, T, k,
/// precomposition by graded spaces and Frobenius twists of those.
pub fn coresolve(g: &FunctorExpr, p: u32) -> Result<InjComplex, Error> {
    use FunctorExpr as E;
    match g {
        E::Twist(0, c) => coresolve(c, p),
        E::Twist(r, c) => match &**c {
            E::Twist(s, c2) => coresolve(&E::twist(r + s, (**c2).clone()), p),
            _ => InjComplex::twisted(&Coresolution::of(c, p)?, *r, p),
        },
        E::TensorProduct(cs) if cs.iter().any(has_twist) => {
            let mut acc = InjComplex::from_coresolution(&Coresolution::of(&E::Unit, p)?, p);
            for c in cs {
                acc = acc.tensor(&coresolve(c, p)?);
            }
            Ok(acc)
        }
        E::Precompose(_, c) if has_twist(c) => Err(Error::Unsupported(format!("{g}: precomposition of a twisted target"))),
        _ => Ok(InjComplex::from_coresolution(&Coresolution::of(g, p)?, p)),
    }
}

/// Replace powers whose parts are all at most 1 by tensor products of the identity,
/// which are their own duals.
pub fn normalize(e: &FunctorExpr) -> FunctorExpr {
    use FunctorExpr as E;
    match e {
        E::Div(m) | E::Ext(m) if m.parts().iter().all(|&x| x <= 1) => E::Sym(m.clone()),
        E::TensorProduct(cs) => E::TensorProduct(cs.iter().map(normalize).collect()),
        E::Twist(r, c) => E::twist(*r, normalize(c)),
        E::Dual(c) => normalize(&c.sharp()),
        E::Precompose(w, c) => E::precompose(w.clone(), normalize(c)),
        E::Compose(a, b) => E::compose(normalize(a), normalize(b)),
        _ => e.clone(),
    }
}

fn coresolvable(e: &FunctorExpr) -> bool {
    use FunctorExpr as E;
    match e {
        E::Div(_) | E::Dual(_) | E::Compose(..) => false,
        E::TensorProduct(cs) => cs.iter().all(coresolvable),
        E::Twist(_, c) | E::Precompose(_, c) => coresolvable(c),
        _ => true,
    }
}

/// Choose between Ext(F, G) and Ext(G^#, F^#) so that the target can be coresolved.
pub fn orient(f: &FunctorExpr, g: &FunctorExpr) -> Result<(FunctorExpr, FunctorExpr), Error> {
    let (f, g) = (normalize(f), normalize(g));
    if coresolvable(&g) {
        return Ok((f, g));
    }
    let (f2, g2) = (normalize(&g.sharp()), normalize(&f.sharp()));
    if coresolvable(&g2) {
        return Ok((f2, g2));
    }
    Err(Error::Unsupported(format!("neither {g} nor the dual of {f} can be coresolved")))
}

/// Dimensions of Ext^s (with internal degree t), stored sparsely.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtTable {
    pub dims: BTreeMap<(u32, u32), usize>,
}

impl ExtTable {
    pub fn add(&mut self, s: u32, t: u32, n: usize) {
        if n > 0 {
            *self.dims.entry((s, t)).or_insert(0) += n;
        }
    }

    /// Dimensions by cohomological degree, summed over t.
    pub fn by_s(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for (&(s, _), &n) in &self.dims {
            *out.entry(s).or_insert(0) += n;
        }
        out
    }

    /// Dimensions by total degree s + t.
    pub fn by_total_degree(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for (&(s, t), &n) in &self.dims {
            *out.entry(s + t).or_insert(0) += n;
        }
        out
    }

    /// Dense vector of dims by s, up to the largest nonzero degree.
    pub fn dims_by_s(&self) -> Vec<usize> {
        let by = self.by_s();
        let top = by.keys().next_back().map_or(0, |&s| s as usize + 1);
        (0..top).map(|s| by.get(&(s as u32)).copied().unwrap_or(0)).collect()
    }

    pub fn dim(&self, s: u32) -> usize {
        self.by_s().get(&s).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Alternating sum over s.
    pub fn euler(&self) -> i64 {
        self.dims.iter().map(|(&(s, _), &n)| if s % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn is_graded(&self) -> bool {
        self.dims.keys().any(|&(_, t)| t != 0)
    }
}

/// One summand S^flat of a term together with the coordinates of Hom(F, S^flat).
#[derive(Clone, Debug)]
pub struct Piece {
    pub term: usize,
    /// Weights of every (block, factor, line) slot, concatenated.
    pub flat: Vec<u32>,
    pub offset: usize,
    pub dim: usize,
    nu: Vec<u32>,
    pos: Vec<usize>,
}

/// The cochain complex Hom(F, J) in Yoneda coordinates.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub p: u32,
    pub pieces: Vec<Vec<Piece>>,
    /// Internal degree of every coordinate.
    pub grades: Vec<Vec<u32>>,
    /// Differential out of each degree (rows: next degree).
    pub diffs: Vec<SparseMatrix>,
}

/// Per-factor compositions of a block over its lines, keeping slots divisible by `div`
/// and, for filtered blocks, Sha-degree exactly D. Returns (flat, internal degree).
fn block_shapes(b: &Block, div: u32) -> Vec<(Vec<u32>, u32)> {
    let nl = b.lines.len();
    let per: Vec<Vec<(Vec<u32>, u32)>> = b
        .parts
        .iter()
        .map(|&d| {
            compositions(d, nl)
                .into_iter()
                .filter(|c| c.0.iter().all(|&x| x % div == 0))
                .map(|c| {
                    let deg = c.0.iter().zip(&b.lines).map(|(x, l)| x * l).sum();
                    (c.0, deg)
                })
                .collect()
        })
        .collect();
    let bound = match b.role {
        Role::Filtered { degree, .. } => Some(degree),
        _ => None,
    };
    let mut out = Vec::new();
    fn rec(per: &[Vec<(Vec<u32>, u32)>], i: usize, cur: &mut Vec<u32>, deg: u32, bound: Option<u32>, out: &mut Vec<(Vec<u32>, u32)>) {
        if bound.is_some_and(|d| deg > d) {
            return;
        }
        if i == per.len() {
            if bound.is_none_or(|d| deg == d) {
                out.push((cur.clone(), deg));
            }
            return;
        }
        for (c, d) in &per[i] {
            let len = cur.len();
            cur.extend_from_slice(c);
            rec(per, i + 1, cur, deg + d, bound, out);
            cur.truncate(len);
        }
    }
    rec(&per, 0, &mut Vec::new(), 0, bound, &mut out);
    let graded = b.role == Role::Graded;
    out.into_iter().map(|(c, d)| (c, if graded { d } else { 0 })).collect()
}

fn term_shapes(blocks: &[Block], div: u32) -> Vec<(Vec<u32>, u32)> {
    let mut acc: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 0)];
    for b in blocks {
        let shapes = block_shapes(b, div);
        acc = acc
            .into_iter()
            .flat_map(|(f, t)| shapes.iter().map(move |(g, s)| ([f.as_slice(), g.as_slice()].concat(), t + s)))
            .collect();
    }
    acc
}

fn block_ranges(blocks: &[Block]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for b in blocks {
        out.push((start, start + b.flat_len()));
        start += b.flat_len();
    }
    out
}

/// Apply a block operation to a sub-label at ambient n (the block's factors have
/// length lines * n).
fn apply_op(op: &BlockOp, block: &Block, n: usize, sub: &[u8], p: u32) -> Vec<(Label, u8)> {
    match op {
        BlockOp::Nat(f) => f.apply(block.lines.len() * n, p, 0, sub).into_iter().map(|(_, l, c)| (l, c)).collect(),
        BlockOp::Troesch { r, power } => {
            let mut cur: BTreeMap<Label, u32> = BTreeMap::from([(sub.to_vec(), 1)]);
            for _ in 0..*power {
                let mut next: BTreeMap<Label, u32> = BTreeMap::new();
                for (l, c) in cur {
                    for (l2, c2) in troesch_delta(p, *r, n, &l) {
                        *next.entry(l2).or_insert(0) += c * c2 as u32 % p;
                    }
                }
                cur = next.into_iter().filter(|(_, c)| c % p != 0).map(|(l, c)| (l, c % p)).collect();
            }
            cur.into_iter().map(|(l, c)| (l, c as u8)).collect()
        }
    }
}

struct Cache<'a> {
    f: &'a FunctorExpr,
    p: u32,
    bases: HashMap<Vec<u32>, WeightBasis>,
    acts: HashMap<IMat, SparseMatrix>,
}

impl Cache<'_> {
    fn basis(&mut self, nu: &[u32]) -> &WeightBasis {
        let (f, p) = (self.f, self.p);
        self.bases.entry(nu.to_vec()).or_insert_with(|| WeightBasis::new(f, nu, p))
    }

    fn act(&mut self, a: IMat, src: &[u32], dst: &[u32]) -> &SparseMatrix {
        if !self.acts.contains_key(&a) {
            self.basis(src);
            self.basis(dst);
            let m = act_block(self.f, &a, &self.bases[src], &self.bases[dst], self.p);
            self.acts.insert(a.clone(), m);
        }
        &self.acts[&a]
    }
}

/// Hom(F, J) with differentials transported by the Yoneda lemma. Fails with a capacity
/// error when a degree has more than `max_dim` coordinates.
pub fn hom_complex(f: &FunctorExpr, j: &InjComplex, max_dim: usize) -> Result<HomComplex, Error> {
    let p = j.p;
    if !f.is_realizable() {
        return Err(Error::Unsupported(format!("{f}: composite source")));
    }
    let div = f.twist_divisor(p);
    let mut cache = Cache { f, p, bases: HashMap::new(), acts: HashMap::new() };
    let mut pieces: Vec<Vec<Piece>> = Vec::new();
    let mut grades: Vec<Vec<u32>> = Vec::new();
    for terms in &j.terms {
        let (mut ps, mut gs) = (Vec::new(), Vec::new());
        for (ti, blocks) in terms.iter().enumerate() {
            for (flat, t) in term_shapes(blocks, div) {
                let pos: Vec<usize> = (0..flat.len()).filter(|&i| flat[i] > 0).collect();
                let nu: Vec<u32> = pos.iter().map(|&i| flat[i]).collect();
                let wb = cache.basis(&nu);
                if wb.is_empty() {
                    continue;
                }
                let m = nu.len();
                gs.extend(wb.labels.iter().map(|l| t + label_grading(f, m, l, p)));
                ps.push(Piece { term: ti, flat, offset: gs.len() - wb.len(), dim: wb.len(), nu, pos });
                if gs.len() > max_dim {
                    return Err(Error::Capacity(format!("Hom({f}, J^{}) exceeds {max_dim} coordinates", pieces.len())));
                }
            }
        }
        pieces.push(ps);
        grades.push(gs);
    }
    let mut diffs = Vec::new();
    for k in 0..j.maps.len() {
        let mut trip: Vec<(usize, usize, u8)> = Vec::new();
        for tm in &j.maps[k] {
            let (sb, db) = (&j.terms[k][tm.src], &j.terms[k + 1][tm.dst]);
            let (sr, dr) = (block_ranges(sb), block_ranges(db));
            for sp in pieces[k].iter().filter(|x| x.term == tm.src) {
                for dp in pieces[k + 1].iter().filter(|x| x.term == tm.dst) {
                    if !compatible(sp, dp, &sr, &dr, sb, tm) {
                        continue;
                    }
                    transport(&mut cache, sp, dp, &sr, &dr, sb, tm, p, &mut trip);
                }
            }
        }
        let rows = grades[k + 1].len();
        let cols = grades[k].len();
        diffs.push(SparseMatrix::from_triplets(p as u8, rows, cols, trip));
    }
    for k in 1..diffs.len() {
        if !diffs[k].mul(&diffs[k - 1]).is_zero() {
            return Err(Error::Verification(format!("Hom({f}, J) is not a complex at degree {k}")));
        }
    }
    Ok(HomComplex { p, pieces, grades, diffs })
}

/// Blocks untouched by the map must have equal shapes; natural maps preserve the
/// weight of every line.
fn compatible(sp: &Piece, dp: &Piece, sr: &[(usize, usize)], dr: &[(usize, usize)], sb: &[Block], tm: &TermMap) -> bool {
    for (b, (&(s0, s1), &(d0, d1))) in sr.iter().zip(dr).enumerate() {
        if b != tm.block && sp.flat[s0..s1] != dp.flat[d0..d1] {
            return false;
        }
    }
    if let BlockOp::Nat(_) = tm.op {
        let nl = sb[tm.block].lines.len();
        let line_weights = |flat: &[u32]| -> Vec<u32> {
            let mut w = vec![0; nl];
            for (i, x) in flat.iter().enumerate() {
                w[i % nl] += x;
            }
            w
        };
        let ((s0, s1), (d0, d1)) = (sr[tm.block], dr[tm.block]);
        return line_weights(&sp.flat[s0..s1]) == line_weights(&dp.flat[d0..d1]);
    }
    true
}

/// Add the block of the Hom differential from `sp` to `dp`: the transpose of
/// sum_a c_a F(xi_a), where c_a is the coefficient of the diagonal monomial of `dp`
/// in the image of x^a.
#[allow(clippy::too_many_arguments)]
fn transport(
    cache: &mut Cache,
    sp: &Piece,
    dp: &Piece,
    sr: &[(usize, usize)],
    dr: &[(usize, usize)],
    sb: &[Block],
    tm: &TermMap,
    p: u32,
    trip: &mut Vec<(usize, usize, u8)>,
) {
    let (m, n) = (sp.nu.len(), dp.nu.len());
    let mut diag = vec![0u8; dp.flat.len() * n];
    for (k, &f) in dp.pos.iter().enumerate() {
        diag[f * n + k] = dp.nu[k] as u8;
    }
    let (s0, s1) = sr[tm.block];
    let (d0, d1) = dr[tm.block];
    let mut total: HashMap<usize, HashMap<usize, u32>> = HashMap::new();
    for a in tables(&sp.nu, &dp.nu, u32::MAX) {
        let mut label = vec![0u8; sp.flat.len() * n];
        for (k, &f) in sp.pos.iter().enumerate() {
            for c in 0..n {
                label[f * n + c] = a[k * n + c] as u8;
            }
        }
        if label[..s0 * n] != diag[..d0 * n] || label[s1 * n..] != diag[d1 * n..] {
            continue;
        }
        let want = &diag[d0 * n..d1 * n];
        let c: u32 = apply_op(&tm.op, &sb[tm.block], n, &label[s0 * n..s1 * n], p)
            .into_iter()
            .filter(|(l, _)| l.as_slice() == want)
            .map(|(_, c)| c as u32)
            .sum::<u32>()
            * tm.coef as u32
            % p;
        if c == 0 {
            continue;
        }
        let act = cache.act(IMat::from_data(m, n, a), &dp.nu, &sp.nu);
        for (i, j, v) in act.entries() {
            let e = total.entry(j).or_default().entry(i).or_insert(0);
            *e = (*e + c * v as u32) % p;
        }
    }
    for (j, row) in total {
        for (i, v) in row {
            if v != 0 {
                trip.push((dp.offset + j, sp.offset + i, v as u8));
            }
        }
    }
}

impl HomComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.len()).collect()
    }

    /// Cohomology dimensions, split by internal degree.
    pub fn cohomology(&self) -> ExtTable {
        let len = self.grades.len();
        // rank of each differential per internal degree
        let ranks: Vec<BTreeMap<u32, usize>> = self
            .diffs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let mut parts: BTreeMap<u32, Vec<(usize, usize, u8)>> = BTreeMap::new();
                for (i, j, v) in d.entries() {
                    parts.entry(self.grades[k][j]).or_default().push((i, j, v));
                }
                parts
                    .into_iter()
                    .map(|(t, trip)| {
                        let m = SparseMatrix::from_triplets(self.p as u8, d.rows(), d.cols(), trip);
                        (t, m.rank())
                    })
                    .collect()
            })
            .collect();
        let mut table = ExtTable::default();
        for k in 0..len {
            let mut by_t: BTreeMap<u32, usize> = BTreeMap::new();
            for &t in &self.grades[k] {
                *by_t.entry(t).or_insert(0) += 1;
            }
            for (t, n) in by_t {
                let out = if k < self.diffs.len() { ranks[k].get(&t).copied().unwrap_or(0) } else { 0 };
                let inc = if k > 0 { ranks[k - 1].get(&t).copied().unwrap_or(0) } else { 0 };
                table.add(k as u32, t, n - out - inc);
            }
        }
        table
    }
}

/// Ext*(F, G), flipping to Ext*(G^#, F^#) when G is not coresolvable.
pub fn ext(f: &FunctorExpr, g: &FunctorExpr, p: u32) -> Result<ExtTable, Error> {
    ext_with_budget(f, g, p, DEFAULT_MAX_DIM)
}

pub fn ext_with_budget(f: &FunctorExpr, g: &FunctorExpr, p: u32, max_dim: usize) -> Result<ExtTable, Error> {
    if f.degree(p) != g.degree(p) {
        return Ok(ExtTable::default());
    }
    let (f, g) = orient(f, g)?;
    let j = coresolve(&g, p)?;
    Ok(hom_complex(&f, &j, max_dim)?.cohomology())
}

/// Ext*(F^(r), G^(r)) through the totalized Troesch bicomplex of a coresolution of G.
/// Checks that Hom(F^(r), -) vanishes on the odd rows.
pub fn ext_twisted(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32) -> Result<ExtTable, Error> {
    ext_twisted_with_budget(f, g, r, p, DEFAULT_MAX_DIM)
}

pub fn ext_twisted_with_budget(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32, max_dim: usize) -> Result<ExtTable, Error> {
    if f.degree(p) != g.degree(p) {
        return Ok(ExtTable::default());
    }
    let (f, g) = orient(f, g)?;
    let (ft, gt) = (FunctorExpr::twist(r, f.clone()), FunctorExpr::twist(r, g.clone()));
    let j = coresolve(&gt, p)?;
    if r > 0 {
        let odd = odd_row_hom_dims(&ft, &j);
        if odd > 0 {
            return Err(Error::Verification(format!("Hom({ft}, T(J, {r})) has {odd} coordinates in odd rows")));
        }
    }
    Ok(hom_complex(&ft, &j, max_dim)?.cohomology())
}

/// Total dimension of Hom(F, -) on the odd rows of a twisted complex, counted from
/// weight spaces without any divisibility pruning.
pub fn odd_row_hom_dims(f: &FunctorExpr, j: &InjComplex) -> usize {
    let mut total = 0;
    let mut bases: HashMap<Vec<u32>, usize> = HashMap::new();
    for terms in &j.terms {
        for blocks in terms {
            if !blocks.iter().any(|b| matches!(b.role, Role::Filtered { row, .. } if row % 2 == 1)) {
                continue;
            }
            for (flat, _) in term_shapes(blocks, 1) {
                let nu: Vec<u32> = flat.into_iter().filter(|&x| x > 0).collect();
                total += *bases.entry(nu.clone()).or_insert_with(|| WeightBasis::new(f, &nu, j.p).len());
            }
        }
    }
    total
}

/// The second page E_2^{s,t} = Ext^s(F, G(E_r (x) I)), t the internal degree.
pub fn e2_page(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32) -> Result<ExtTable, Error> {
    ext(f, &FunctorExpr::precompose(e_space(p, r), g.clone()), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Collapse,
    NonCollapse,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseReport {
    pub f: FunctorExpr,
    pub g: FunctorExpr,
    pub r: u32,
    pub e2: ExtTable,
    pub abutment: ExtTable,
    pub e2_total: usize,
    pub abutment_total: usize,
    pub euler_e2: i64,
    pub euler_abutment: i64,
    pub verdict: Verdict,
}

/// Compare the second page with Ext*(F^(r), G^(r)). Equal Euler characteristics and
/// dim E_2 >= dim abutment hold for any spectral sequence; a violation is reported as a
/// verification error. Collapse iff the totals agree.
pub fn collapse_check(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32) -> Result<CollapseReport, Error> {
    let e2 = e2_page(f, g, r, p)?;
    let abutment = ext_twisted(f, g, r, p)?;
    let euler_e2: i64 = e2.dims.iter().map(|(&(s, t), &n)| if (s + t) % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
    let euler_abutment = abutment.euler();
    let (e2_total, abutment_total) = (e2.total(), abutment.total());
    if euler_e2 != euler_abutment {
        return Err(Error::Verification(format!("Euler characteristics differ for ({f}, {g}, r={r}): {euler_e2} vs {euler_abutment}")));
    }
    if e2_total < abutment_total {
        return Err(Error::Verification(format!("E2 is smaller than its abutment for ({f}, {g}, r={r}): {e2_total} < {abutment_total}")));
    }
    let verdict = if e2_total == abutment_total { Verdict::Collapse } else { Verdict::NonCollapse };
    Ok(CollapseReport { f: f.clone(), g: g.clone(), r, e2, abutment, e2_total, abutment_total, euler_e2, euler_abutment, verdict })
}

/// Whether E_2 vanishes in odd s, which forces collapse.
pub fn parity_collapse(f: &FunctorExpr, g: &FunctorExpr, r: u32, p: u32) -> Result<bool, Error> {
    Ok(e2_page(f, g, r, p)?.dims.keys().all(|&(s, _)| s % 2 == 0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    /// Degrees below this bound are compared.
    pub bound: u32,
    pub lower: ExtTable,
    pub upper: ExtTable,
    pub stable: bool,
}

/// Compare Ext^s(F^(r), G^(j+r)) with Ext^s(F^(r+1), G^(j+r+1)) for s < 2p^(r+j).
pub fn twist_stability_check(f: &FunctorExpr, g: &FunctorExpr, r: u32, j: u32, p: u32) -> Result<StabilityReport, Error> {
    let level = |r: u32| -> Result<ExtTable, Error> {
        if r == 0 && j == 0 {
            return ext(f, g, p);
        }
        let gt = FunctorExpr::twist(j, g.clone());
        ext_twisted(f, &gt, r, p)
    };
    let (lower, upper) = (level(r)?, level(r + 1)?);
    let bound = 2 * p.pow(r + j);
    let stable = (0..bound).all(|s| lower.dim(s) == upper.dim(s));
    Ok(StabilityReport { bound, lower, upper, stable })
}

/// Ext*(F(W (x) I), G) against Ext*(F, G(W (x) I)) (evenly graded W is its own dual up
/// to the sign of degrees). Returns both tables.
pub fn adjunction_check(f: &FunctorExpr, g: &FunctorExpr, w: &GradedSpace, p: u32) -> Result<(ExtTable, ExtTable), Error> {
    let left = ext(&FunctorExpr::precompose(w.clone(), f.clone()), g, p)?;
    let right = ext(f, &FunctorExpr::precompose(w.clone(), g.clone()), p)?;
    Ok((left, right))
}

/// Graded dims of Hom(F^(r), T(S^mu, r)^n) for every n, read off the twisted complex.
pub fn twisted_hom_dims(f: &FunctorExpr, mu: &[u32], r: u32, p: u32) -> Result<Vec<usize>, Error> {
    let j = InjComplex::twisted(&Coresolution::sym(mu), r, p)?;
    let ft = FunctorExpr::twist(r, f.clone());
    let mut dims = vec![0; j.len()];
    let mut bases: HashMap<Vec<u32>, usize> = HashMap::new();
    for (n, terms) in j.terms.iter().enumerate() {
        for blocks in terms {
            for (flat, _) in term_shapes(blocks, 1) {
                let nu: Vec<u32> = flat.into_iter().filter(|&x| x > 0).collect();
                dims[n] += *bases.entry(nu.clone()).or_insert_with(|| WeightBasis::new(&ft, &nu, p).len());
            }
        }
    }
    Ok(dims)
}
