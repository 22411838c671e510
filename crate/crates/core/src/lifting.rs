//! Twist compatibility of natural maps between sums of symmetric powers, and the
//! search for lifted differentials on scaled coresolutions.
//!
//! A natural map S^mu -> S^nu is stored by its Yoneda coordinates: for each monomial y
//! of S^mu(k^m) of weight nu (m = number of nonzero parts of nu), the coefficient of
//! the diagonal monomial prod_c x_c^{nu_c} in the image of y.

use std::collections::{BTreeMap, HashMap};

use polyext_linalg::{kernel, solve, Matrix, SparseMatrix};

use crate::combinat::compositions;
use crate::coresolve::Coresolution;
use crate::expr::FunctorExpr;
use crate::natmap::{twist_lift, NatMapExpr};
use crate::realize::{act_label, labels_of_weight, Label, Realization};
use crate::schur::IMat;
use crate::Error;

/// Yoneda coordinates of one natural map S^mu -> S^nu.
pub type Coords = BTreeMap<Label, u8>;

fn sym_parts(e: &FunctorExpr) -> Result<Vec<u32>, Error> {
    match e {
        FunctorExpr::Sym(m) => Ok(m.parts().to_vec()),
        FunctorExpr::Unit => Ok(Vec::new()),
        FunctorExpr::Tensor(d) => Ok(vec![1; *d as usize]),
        _ => Err(Error::Unsupported(format!("{e} is not a symmetric power"))),
    }
}

fn nonzero(parts: &[u32]) -> Vec<u32> {
    parts.iter().copied().filter(|&x| x > 0).collect()
}

/// The monomial prod_c x_c^{nu_c} of S^nu at ambient (number of nonzero parts).
pub fn diagonal_label(nu: &[u32]) -> Label {
    let m = nu.iter().filter(|&&x| x > 0).count();
    let mut out = vec![0u8; nu.len() * m];
    let mut c = 0;
    for (i, &x) in nu.iter().enumerate() {
        if x > 0 {
            out[i * m + c] = x as u8;
            c += 1;
        }
    }
    out
}

/// Basis of Hom(S^mu, S^nu) in Yoneda form.
pub fn yoneda_labels(mu: &[u32], nu: &[u32], p: u32) -> Vec<Label> {
    if mu.iter().sum::<u32>() != nu.iter().sum::<u32>() {
        return Vec::new();
    }
    labels_of_weight(&FunctorExpr::sym(mu), &nonzero(nu), p)
}

/// Yoneda coordinates of the (i, j) component of f.
pub fn yoneda_coords(f: &NatMapExpr, i: usize, j: usize, p: u32) -> Result<Coords, Error> {
    let (src, dst) = (f.src()?, f.dst()?);
    let (mu, nu) = (sym_parts(&src[i])?, sym_parts(&dst[j])?);
    let m = nonzero(&nu).len();
    let diag = diagonal_label(&nu);
    let mut out = Coords::new();
    for y in yoneda_labels(&mu, &nu, p) {
        let c: u32 = f.apply(m, p, i, &y).into_iter().filter(|(k, l, _)| *k == j && *l == diag).map(|(_, _, c)| c as u32).sum();
        if c % p != 0 {
            out.insert(y, (c % p) as u8);
        }
    }
    Ok(out)
}

/// Matrix of the natural map S^mu -> S^nu with the given coordinates, at ambient n.
/// The coefficient of x^a in phi(y) is the coordinate functional applied to xi_a y.
pub fn eval_from_yoneda(mu: &[u32], nu: &[u32], coords: &Coords, n: usize, p: u32) -> Result<SparseMatrix, Error> {
    let (fs, gs) = (FunctorExpr::sym(mu), FunctorExpr::sym(nu));
    let (src, dst) = (Realization::new(&fs, n, p)?, Realization::new(&gs, n, p)?);
    let nz: Vec<usize> = (0..nu.len()).filter(|&i| nu[i] > 0).collect();
    let mut trip = Vec::new();
    for (zi, z) in dst.labels().iter().enumerate() {
        let mut a = IMat::zeros(nz.len(), n);
        for (row, &i) in nz.iter().enumerate() {
            for c in 0..n {
                a.set(row, c, z[i * n + c] as u32);
            }
        }
        for (yi, y) in src.labels().iter().enumerate() {
            let v: u32 = act_label(&fs, &a, y, p).into_iter().map(|(l, c)| c as u32 * coords.get(&l).copied().unwrap_or(0) as u32).sum();
            if v % p != 0 {
                trip.push((zi, yi, (v % p) as u8));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(p as u8, dst.dim(), src.dim(), trip))
}

/// Outcome of the semantic twist-compatibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistCompat {
    pub compatible: bool,
    /// Yoneda coordinates of the descended map, per nonzero component (i, j).
    pub descended: BTreeMap<(usize, usize), Coords>,
    /// Two monomials of S^lambda(S^{p^r}) with the same product but different images.
    pub witness: Option<(usize, usize, Label, Label)>,
    /// Whether the canonical lift exists and equals the descended map.
    pub agrees_with_lift: Option<bool>,
}

/// Whether f maps the kernel of S^lambda(S^{p^r} V) -> S^{p^r lambda}(V) into the
/// corresponding kernel, and if so the induced map on S^{p^r lambda}.
pub fn check_twist_compat(f: &NatMapExpr, r: u32, p: u32) -> Result<TwistCompat, Error> {
    let q = p.pow(r);
    let (src, dst) = (f.src()?, f.dst()?);
    let mut descended = BTreeMap::new();
    for (i, se) in src.iter().enumerate() {
        let lambda = sym_parts(se)?;
        for (j, de) in dst.iter().enumerate() {
            let lam2 = sym_parts(de)?;
            if lambda.iter().sum::<u32>() != lam2.iter().sum::<u32>() {
                continue;
            }
            match descend(f, i, j, &lambda, &lam2, q, p) {
                Ok(coords) => {
                    if !coords.is_empty() {
                        descended.insert((i, j), coords);
                    }
                }
                Err((x1, x2)) => {
                    return Ok(TwistCompat { compatible: false, descended, witness: Some((i, j, x1, x2)), agrees_with_lift: None });
                }
            }
        }
    }
    let agrees_with_lift = match twist_lift(f, r, p) {
        Ok(g) => {
            let mut same = true;
            for (i, se) in src.iter().enumerate() {
                for (j, de) in dst.iter().enumerate() {
                    if sym_parts(se)?.iter().sum::<u32>() != sym_parts(de)?.iter().sum::<u32>() {
                        continue;
                    }
                    let lifted = yoneda_coords(&g, i, j, p)?;
                    same &= lifted == descended.get(&(i, j)).cloned().unwrap_or_default();
                }
            }
            Some(same)
        }
        Err(Error::NotLiftable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TwistCompat { compatible: true, descended, witness: None, agrees_with_lift })
}

/// Evaluate component (i, j) at U = S^q(k^m') on the weight q*lambda' part, and read
/// off the coordinate on each fiber of the multiplication map.
fn descend(f: &NatMapExpr, i: usize, j: usize, lambda: &[u32], lam2: &[u32], q: u32, p: u32) -> Result<Coords, (Label, Label)> {
    let target = nonzero(lam2);
    let m = target.len();
    let mons: Vec<Vec<u32>> = compositions(q, m).into_iter().map(|c| c.0).collect();
    let u = mons.len();
    let mon_index: HashMap<Vec<u32>, usize> = mons.iter().enumerate().map(|(k, b)| (b.clone(), k)).collect();
    let goal: Vec<u32> = target.iter().map(|x| x * q).collect();
    // the monomial of S^lambda'(U) whose product is the diagonal of S^{q lambda'}
    let mut zstar = vec![0u8; lam2.len() * u];
    let mut c = 0;
    for (k, &x) in lam2.iter().enumerate() {
        if x > 0 {
            let mut e = vec![0; m];
            e[c] = q;
            zstar[k * u + mon_index[&e]] = x as u8;
            c += 1;
        }
    }
    // per factor: every multiset of lambda_k monomials, with its V-weight
    let options: Vec<Vec<(Vec<u32>, Vec<u32>)>> = lambda
        .iter()
        .map(|&d| {
            compositions(d, u)
                .into_iter()
                .map(|cmp| {
                    let mut w = vec![0u32; m];
                    for (k, &x) in cmp.0.iter().enumerate() {
                        for (t, &b) in mons[k].iter().enumerate() {
                            w[t] += x * b;
                        }
                    }
                    (cmp.0, w)
                })
                .filter(|(_, w)| w.iter().zip(&goal).all(|(a, b)| a <= b))
                .collect()
        })
        .collect();
    let mut fibers: HashMap<Label, (u8, Label)> = HashMap::new();
    let mut stack: Vec<(usize, Vec<u8>, Vec<u32>, Label)> = vec![(0, Vec::new(), vec![0; m], Vec::new())];
    while let Some((k, label, w, prod)) = stack.pop() {
        if k == lambda.len() {
            if w != goal {
                continue;
            }
            let v: u32 = f.apply(u, p, i, &label).into_iter().filter(|(jj, l, _)| *jj == j && *l == zstar).map(|(_, _, c)| c as u32).sum();
            let v = (v % p) as u8;
            match fibers.get(&prod) {
                Some((old, x)) if *old != v => return Err((x.clone(), label)),
                Some(_) => {}
                None => {
                    fibers.insert(prod, (v, label));
                }
            }
            continue;
        }
        for (cmp, dw) in &options[k] {
            let w2: Vec<u32> = w.iter().zip(dw).map(|(a, b)| a + b).collect();
            if w2.iter().zip(&goal).any(|(a, b)| a > b) {
                continue;
            }
            let mut l2 = label.clone();
            l2.extend(cmp.iter().map(|&x| x as u8));
            let mut pr = prod.clone();
            pr.extend(dw.iter().map(|&x| x as u8));
            stack.push((k + 1, l2, w2, pr));
        }
    }
    Ok(fibers.into_iter().filter(|(_, (v, _))| *v != 0).map(|(y, (v, _))| (y, v)).collect())
}

/// Outcome of the lifting search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftResult {
    /// Yoneda coordinates of each lifted differential, keyed by (source, target) summand.
    Found { maps: Vec<BTreeMap<(usize, usize), Coords>>, nodes: usize },
    /// No compatible family within the searched part of the solution spaces.
    Exhausted { nodes: usize },
}

pub const DEFAULT_NODE_LIMIT: usize = 10_000;

/// Unknowns of one lifted differential: the Yoneda coordinates of every component.
struct Unknowns {
    slots: Vec<(usize, usize, Vec<Label>)>,
    offset: Vec<usize>,
    index: Vec<HashMap<Label, usize>>,
    len: usize,
}

impl Unknowns {
    fn new(src: &[Vec<u32>], dst: &[Vec<u32>], p: u32) -> Self {
        let mut slots = Vec::new();
        for (i, a) in src.iter().enumerate() {
            for (j, b) in dst.iter().enumerate() {
                let labels = yoneda_labels(a, b, p);
                if !labels.is_empty() {
                    slots.push((i, j, labels));
                }
            }
        }
        let mut offset = Vec::new();
        let mut len = 0;
        for s in &slots {
            offset.push(len);
            len += s.2.len();
        }
        let index = slots.iter().map(|s| s.2.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect()).collect();
        Unknowns { slots, offset, index, len }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.slots.iter().position(|s| s.0 == i && s.1 == j)
    }

    fn coords(&self, z: &[u8]) -> BTreeMap<(usize, usize), Coords> {
        let mut out = BTreeMap::new();
        for (s, (i, j, labels)) in self.slots.iter().enumerate() {
            let c: Coords = labels.iter().enumerate().filter(|(k, _)| z[self.offset[s] + k] != 0).map(|(k, l)| (l.clone(), z[self.offset[s] + k])).collect();
            out.insert((*i, *j), c);
        }
        out
    }
}

/// Search for lifts of the r-twisted differentials of J to the scaled terms S^{p^r lambda}
/// that restrict to the twisted differentials and square to zero. Each degree is solved
/// linearly given the previous one; solution spaces are enumerated canonical
/// representative first, then by free-variable assignments in lexicographic order,
/// backtracking up to `node_limit` nodes.
pub fn lifting_search(j: &Coresolution, r: u32, p: u32, node_limit: usize) -> Result<LiftResult, Error> {
    if j.lines.is_some() {
        return Err(Error::Unsupported("lifting precomposed coresolutions".into()));
    }
    let q = p.pow(r);
    let scaled: Vec<Vec<Vec<u32>>> = j.terms.iter().map(|t| t.iter().map(|m| m.iter().map(|x| x * q).collect()).collect()).collect();
    let unknowns: Vec<Unknowns> = (0..j.diffs.len()).map(|k| Unknowns::new(&scaled[k], &scaled[k + 1], p)).collect();
    let mut chosen: Vec<Vec<u8>> = Vec::new();
    let mut spaces: Vec<(Vec<u8>, Vec<Vec<u8>>, u64)> = Vec::new();
    let mut nodes = 0;
    let mut k = 0;
    while k < unknowns.len() {
        if spaces.len() == k {
            nodes += 1;
            if nodes > node_limit {
                return Ok(LiftResult::Exhausted { nodes });
            }
            let prev = if k > 0 { Some((&unknowns[k - 1], chosen[k - 1].as_slice())) } else { None };
            match affine_space(j, k, &unknowns[k], prev, &scaled, q, p)? {
                Some((part, dirs)) => spaces.push((part, dirs, 0)),
                None => {
                    // no lift at degree k for the current choice below: next choice at k-1
                    if k == 0 {
                        return Ok(LiftResult::Exhausted { nodes });
                    }
                    k -= 1;
                    chosen.pop();
                    if !advance(&mut spaces[k], p) {
                        spaces.pop();
                        loop {
                            if k == 0 {
                                return Ok(LiftResult::Exhausted { nodes });
                            }
                            k -= 1;
                            chosen.pop();
                            if advance(&mut spaces[k], p) {
                                break;
                            }
                            spaces.pop();
                        }
                    }
                    continue;
                }
            }
        }
        chosen.push(point(&spaces[k], p));
        k += 1;
    }
    let maps = chosen.iter().zip(&unknowns).map(|(z, u)| u.coords(z)).collect();
    Ok(LiftResult::Found { maps, nodes })
}

fn advance(space: &mut (Vec<u8>, Vec<Vec<u8>>, u64), p: u32) -> bool {
    let count = (p as u64).checked_pow(space.1.len() as u32).unwrap_or(u64::MAX);
    space.2 += 1;
    space.2 < count
}

/// The point of the affine space indexed by the counter: free coefficients read as
/// base-p digits, most significant first.
fn point(space: &(Vec<u8>, Vec<Vec<u8>>, u64), p: u32) -> Vec<u8> {
    let (part, dirs, idx) = space;
    let mut z: Vec<u32> = part.iter().map(|&x| x as u32).collect();
    let mut rest = *idx;
    for d in dirs.iter().rev() {
        let c = (rest % p as u64) as u32;
        rest /= p as u64;
        for (zi, &di) in z.iter_mut().zip(d) {
            *zi = (*zi + c * di as u32) % p;
        }
    }
    z.into_iter().map(|x| x as u8).collect()
}

/// Linear conditions on the degree-k lift: restriction to the twisted terms, and
/// composition to zero with the chosen degree-(k-1) lift.
#[allow(clippy::type_complexity)]
fn affine_space(
    j: &Coresolution,
    k: usize,
    un: &Unknowns,
    prev: Option<(&Unknowns, &[u8])>,
    scaled: &[Vec<Vec<u32>>],
    q: u32,
    p: u32,
) -> Result<Option<(Vec<u8>, Vec<Vec<u8>>)>, Error> {
    let mut rows: Vec<(Vec<u8>, u8)> = Vec::new();
    // restriction: phi_ij(q x) = psi_ij(x) for x of weight lambda'
    let diff = j.differential(k)?;
    for (s, (i, jj, _)) in un.slots.iter().enumerate() {
        let psi = yoneda_coords(&diff, *i, *jj, p)?;
        let (mu, nu) = (&j.terms[k][*i], &j.terms[k + 1][*jj]);
        for x in yoneda_labels(mu, nu, p) {
            let qx: Label = x.iter().map(|&e| (e as u32 * q) as u8).collect();
            let mut row = vec![0u8; un.len];
            row[un.offset[s] + un.index[s][&qx]] = 1;
            rows.push((row, psi.get(&x).copied().unwrap_or(0)));
        }
    }
    // composition: sum_j phi2_jl o phi1_ij = 0, linear in phi2
    if let Some((pu, pz)) = prev {
        for (i, mu) in scaled[k - 1].iter().enumerate() {
            for (l, nu) in scaled[k + 1].iter().enumerate() {
                let ys = yoneda_labels(mu, nu, p);
                if ys.is_empty() {
                    continue;
                }
                let m2 = nonzero(nu).len();
                let fs = FunctorExpr::sym(mu);
                for y in &ys {
                    let mut row = vec![0u32; un.len];
                    for (mid, lam) in scaled[k].iter().enumerate() {
                        let (Some(s1), Some(s2)) = (pu.slot(i, mid), un.slot(mid, l)) else { continue };
                        let lam_nz = nonzero(lam);
                        // phi1(y) = sum_a lambda1(xi_a y) x^a, then read lambda2 on x^a
                        for a in crate::combinat::tables(&lam_nz, &nonzero(nu), u32::MAX) {
                            let xi = IMat::from_data(lam_nz.len(), m2, a.clone());
                            let c1: u32 = act_label(&fs, &xi, y, p)
                                .into_iter()
                                .filter_map(|(lbl, c)| pu.index[s1].get(&lbl).map(|&idx| c as u32 * pz[pu.offset[s1] + idx] as u32))
                                .sum::<u32>()
                                % p;
                            if c1 == 0 {
                                continue;
                            }
                            let xa = monomial_label(lam, &a, m2);
                            if let Some(&idx) = un.index[s2].get(&xa) {
                                let e = &mut row[un.offset[s2] + idx];
                                *e = (*e + c1) % p;
                            }
                        }
                    }
                    rows.push((row.into_iter().map(|x| x as u8).collect(), 0));
                }
            }
        }
    }
    let a = Matrix::from_rows(p as u8, un.len, &rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
    let b: Vec<u8> = rows.iter().map(|r| r.1).collect();
    if un.len == 0 {
        return Ok(b.iter().all(|&x| x == 0).then(|| (Vec::new(), Vec::new())));
    }
    let Some(part) = solve(&a, &b) else { return Ok(None) };
    let dirs = kernel(&a).basis_vectors();
    Ok(Some((part, dirs)))
}

/// The monomial x^a of S^lambda at ambient m (zero parts give zero factors).
fn monomial_label(lambda: &[u32], a: &[u32], m: usize) -> Label {
    let mut out = vec![0u8; lambda.len() * m];
    let mut row = 0;
    for (i, &x) in lambda.iter().enumerate() {
        if x > 0 {
            for c in 0..m {
                out[i * m + c] = a[row * m + c] as u8;
            }
            row += 1;
        }
    }
    out
}
