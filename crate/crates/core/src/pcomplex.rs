//! p-complexes, their contractions, and Troesch p-complexes B_mu(r) = S^mu(Sha_r (x) I).
//!
//! Basis labels of B_mu(r)(k^n) are the Sym(mu) labels at ambient L*n (L = p^r lines),
//! with variable index l*n + j for line l (in degree l) and coordinate j.

use std::collections::{BTreeMap, HashMap};

use polyext_linalg::{kernel, SparseMatrix, Subspace};

use crate::combinat::{binom, binom_mod, compositions, exp_decompose, sha, Composition, PowerKind};
use crate::expr::FunctorExpr;
use crate::natmap::NatMapExpr;
use crate::realize::Label;
use crate::Error;

/// Largest total dimension a Troesch complex may have.
pub const DEFAULT_MAX_DIM: usize = 250_000;

/// Basis element of a term: (summand index, label).
pub type Elem = (usize, Label);

/// A graded object with a p-differential raising the degree by `step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PComplex {
    p: u32,
    step: u32,
    terms: BTreeMap<u32, Vec<Elem>>,
    delta: BTreeMap<u32, SparseMatrix>,
}

impl PComplex {
    /// Build from bases (sorted within each degree here) and a rule giving the
    /// differential of one basis element. Targets must lie in degree + step.
    pub fn from_rule(
        p: u32,
        step: u32,
        terms: BTreeMap<u32, Vec<Elem>>,
        rule: impl Fn(&Elem) -> Vec<(Elem, u8)>,
    ) -> Result<Self, Error> {
        let mut terms = terms;
        terms.retain(|_, b| !b.is_empty());
        for b in terms.values_mut() {
            b.sort();
        }
        let index: BTreeMap<u32, HashMap<&Elem, usize>> =
            terms.iter().map(|(&t, b)| (t, b.iter().enumerate().map(|(i, e)| (e, i)).collect())).collect();
        let mut delta = BTreeMap::new();
        for (&t, basis) in &terms {
            let Some(dst) = index.get(&(t + step)) else { continue };
            let mut trip = Vec::new();
            for (c, e) in basis.iter().enumerate() {
                for (f, v) in rule(e) {
                    let Some(&r) = dst.get(&f) else {
                        return Err(Error::Verification(format!("differential leaves degree {}", t + step)));
                    };
                    trip.push((r, c, v));
                }
            }
            delta.insert(t, SparseMatrix::from_triplets(p as u8, dst.len(), basis.len(), trip));
        }
        Ok(PComplex { p, step, terms, delta })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    /// Degrees carrying a nonzero term.
    pub fn degrees(&self) -> Vec<u32> {
        self.terms.keys().copied().collect()
    }

    pub fn basis(&self, t: u32) -> &[Elem] {
        self.terms.get(&t).map_or(&[], |b| b.as_slice())
    }

    pub fn dim(&self, t: u32) -> usize {
        self.basis(t).len()
    }

    pub fn total_dim(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// The differential out of degree t.
    pub fn delta(&self, t: u32) -> SparseMatrix {
        match self.delta.get(&t) {
            Some(m) => m.clone(),
            None => SparseMatrix::zeros(self.p as u8, self.dim(t + self.step), self.dim(t)),
        }
    }

    /// delta^s out of degree t.
    pub fn delta_power(&self, t: u32, s: u32) -> SparseMatrix {
        let mut m = SparseMatrix::identity(self.p as u8, self.dim(t));
        for k in 0..s {
            m = self.delta(t + k * self.step).mul(&m);
        }
        m
    }

    /// delta^p = 0 at every degree, as an exact matrix identity.
    pub fn check_nilpotent(&self) -> Result<(), Error> {
        for &t in self.terms.keys() {
            if !self.delta_power(t, self.p).is_zero() {
                return Err(Error::Verification(format!("delta^p is nonzero on degree {t}")));
            }
        }
        Ok(())
    }

    /// The contraction of the residue class `class` (mod step):
    /// C^c -> C^{c+s} -> C^{c+p} -> ... alternating delta^s and delta^(p-s).
    pub fn contract_class(&self, s: u32, class: u32) -> CochainComplex {
        assert!(s >= 1 && s < self.p, "contraction index must lie in [1, p)");
        if self.terms.is_empty() {
            return CochainComplex { p: self.p, degrees: Vec::new(), bases: Vec::new(), diffs: Vec::new() };
        }
        let top = self.max_degree();
        let mut degrees = Vec::new();
        let mut pos = 0u32;
        let mut t = class;
        while t <= top {
            degrees.push(t);
            let jump = if pos % 2 == 0 { s } else { self.p - s };
            t += jump * self.step;
            pos += 1;
        }
        let bases: Vec<Vec<Elem>> = degrees.iter().map(|&t| self.basis(t).to_vec()).collect();
        let diffs = degrees
            .windows(2)
            .map(|w| self.delta_power(w[0], (w[1] - w[0]) / self.step))
            .collect();
        CochainComplex { p: self.p, degrees, bases, diffs }
    }

    /// Contraction of the residue class 0.
    pub fn contract(&self, s: u32) -> CochainComplex {
        self.contract_class(s, 0)
    }
}

/// An ordinary cochain complex with explicit bases; `diffs[i]` maps term i to term i+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    pub p: u32,
    /// Internal degree of each term (for contractions, the p-complex degree).
    pub degrees: Vec<u32>,
    pub bases: Vec<Vec<Elem>>,
    pub diffs: Vec<SparseMatrix>,
}

impl CochainComplex {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Consecutive differentials compose to zero.
    pub fn is_complex(&self) -> bool {
        self.diffs.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Dimension of the cohomology at every position.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.diffs.iter().map(SparseMatrix::rank).collect();
        (0..self.len())
            .map(|i| {
                let out = ranks.get(i).copied().unwrap_or(0);
                let inc = if i > 0 { ranks[i - 1] } else { 0 };
                self.bases[i].len() - out - inc
            })
            .collect()
    }
}

/// Enumerate c <= e (entrywise) with |c| = ell, calling f on each.
fn for_each_sub(e: &[u8], ell: u32, f: &mut impl FnMut(&[u8])) {
    fn rec(e: &[u8], i: usize, left: u32, cur: &mut Vec<u8>, f: &mut impl FnMut(&[u8])) {
        if left == 0 {
            let mut full = cur.clone();
            full.resize(e.len(), 0);
            f(&full);
            return;
        }
        if i == e.len() {
            return;
        }
        let rest: u32 = e[i..].iter().map(|&x| x as u32).sum();
        if rest < left {
            return;
        }
        for k in 0..=(e[i] as u32).min(left) {
            cur.push(k as u8);
            rec(e, i + 1, left - k, cur, f);
            cur.pop();
        }
    }
    rec(e, 0, ell, &mut Vec::with_capacity(e.len()), f);
}

/// The piece phi_ell of Id * S(phi) on one monomial, for phi sending each basis
/// vector to a basis vector or to zero.
pub fn convolution_piece_monomial(e: &[u8], ell: u32, phi: impl Fn(usize) -> Option<usize>, p: u32) -> Vec<(Label, u8)> {
    let mut acc: BTreeMap<Label, u32> = BTreeMap::new();
    for_each_sub(e, ell, &mut |c| {
        let mut coef = 1u32;
        let mut out: Vec<u8> = e.iter().zip(c).map(|(&x, &y)| x - y).collect();
        for (v, &cv) in c.iter().enumerate() {
            if cv == 0 {
                continue;
            }
            let Some(w) = phi(v) else {
                return;
            };
            coef = coef * binom_mod(e[v] as u64, cv as u64, p) as u32 % p;
            out[w] += cv;
        }
        if coef != 0 {
            *acc.entry(out).or_insert(0) += coef;
        }
    });
    acc.into_iter().filter(|(_, v)| v % p != 0).map(|(l, v)| (l, (v % p) as u8)).collect()
}

/// The piece phi_ell of Id * S(phi) on S^deg(U), U = k^u, for an arbitrary linear phi
/// (matrix u x u acting on columns). Rows and columns indexed by `compositions(deg, u)`.
pub fn convolution_piece(phi: &SparseMatrix, ell: u32, deg: u32) -> SparseMatrix {
    let p = phi.p() as u32;
    let u = phi.cols();
    let basis: Vec<Vec<u8>> = compositions(deg, u).iter().map(|c| c.0.iter().map(|&x| x as u8).collect()).collect();
    let index: HashMap<&Vec<u8>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let cols = phi.transpose().row_lists();
    let mut trip = Vec::new();
    for (ci, e) in basis.iter().enumerate() {
        for_each_sub(e, ell, &mut |c| {
            let mut coef = 1u32;
            let mut poly: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
            poly.insert(e.iter().zip(c).map(|(&x, &y)| x - y).collect(), 1);
            for (v, &cv) in c.iter().enumerate() {
                if cv == 0 {
                    continue;
                }
                coef = coef * binom_mod(e[v] as u64, cv as u64, p) as u32 % p;
                for _ in 0..cv {
                    let mut next: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
                    for (m, a) in &poly {
                        for &(w, b) in &cols[v] {
                            let mut m2 = m.clone();
                            m2[w] += 1;
                            *next.entry(m2).or_insert(0) += a * b as u32 % p;
                        }
                    }
                    poly = next;
                }
            }
            for (m, a) in poly {
                let v = a * coef % p;
                if v != 0 {
                    trip.push((index[&m], ci, v as u8));
                }
            }
        });
    }
    SparseMatrix::from_triplets(p as u8, basis.len(), basis.len(), trip)
}

/// Translation operator rho^(s) on the lines of Sha_r: raises base-p digit s when it
/// is below p-1, zero otherwise.
pub fn rho(p: u32, s: u32, line: u32) -> Option<u32> {
    let q = p.pow(s);
    ((line / q) % p < p - 1).then_some(line + q)
}

/// The Troesch differential d = sum_s d^{r-1-s}_{p^{r-1-s}} (built from rho^(s)) on a
/// concatenated multi-factor label, each factor of length p^r * n.
pub fn troesch_delta(p: u32, r: u32, n: usize, label: &[u8]) -> Vec<(Label, u8)> {
    let lines = p.pow(r) as usize;
    let block = lines * n;
    let mut acc: BTreeMap<Label, u32> = BTreeMap::new();
    for s in 0..r {
        let ell = p.pow(r - 1 - s);
        let phi = |v: usize| {
            let (f, w) = (v / block, v % block);
            rho(p, s, (w / n) as u32).map(|l| f * block + l as usize * n + w % n)
        };
        for (l, c) in convolution_piece_monomial(label, ell, phi, p) {
            *acc.entry(l).or_insert(0) += c as u32;
        }
    }
    acc.into_iter().filter(|(_, v)| v % p != 0).map(|(l, v)| (l, (v % p) as u8)).collect()
}

/// Sha-degree of a concatenated label (factor length p^r * n).
pub fn troesch_grading(p: u32, r: u32, n: usize, label: &[u8]) -> u32 {
    let block = p.pow(r) as usize * n;
    label.iter().enumerate().map(|(v, &e)| e as u32 * ((v % block) / n) as u32).sum()
}

/// All labels of S^mu at ambient m.
fn sym_labels(mu: &[u32], m: usize) -> Vec<Label> {
    let mut out: Vec<Label> = vec![Vec::new()];
    for &d in mu {
        let parts = compositions(d, m);
        out = out
            .into_iter()
            .flat_map(|pre| {
                parts.iter().map(move |c| {
                    let mut l = pre.clone();
                    l.extend(c.0.iter().map(|&x| x as u8));
                    l
                })
            })
            .collect();
    }
    out
}

fn check_budget(mus: &[&[u32]], m: usize, max_dim: usize) -> Result<(), Error> {
    let mut total: u128 = 0;
    for mu in mus {
        let mut d: u128 = 1;
        for &x in mu.iter() {
            if x > 255 {
                return Err(Error::Capacity(format!("part {x} exceeds the label range")));
            }
            d = d.saturating_mul(binom(x as u64 + m as u64 - 1, x as u64));
        }
        total = total.saturating_add(d);
    }
    if total > max_dim as u128 {
        return Err(Error::Capacity(format!("Troesch complex of dimension {total} exceeds {max_dim}")));
    }
    Ok(())
}

/// Direct sum of B_{mu_i}(r)(k^n) over the given compositions, with the restricted
/// Troesch differential on each summand.
pub fn troesch_sum(mus: &[Composition], r: u32, n: usize, p: u32, max_dim: usize) -> Result<PComplex, Error> {
    if r == 0 {
        return Err(Error::Unsupported("Troesch complexes need r >= 1".into()));
    }
    let m = p.pow(r) as usize * n;
    check_budget(&mus.iter().map(|c| c.parts()).collect::<Vec<_>>(), m, max_dim)?;
    let mut terms: BTreeMap<u32, Vec<Elem>> = BTreeMap::new();
    for (i, mu) in mus.iter().enumerate() {
        for l in sym_labels(mu.parts(), m) {
            terms.entry(troesch_grading(p, r, n, &l)).or_default().push((i, l));
        }
    }
    PComplex::from_rule(p, p.pow(r - 1), terms, |(i, l)| {
        troesch_delta(p, r, n, l).into_iter().map(|(l2, c)| ((*i, l2), c)).collect()
    })
}

/// A Troesch p-complex B_mu(r) evaluated at k^n.
#[derive(Clone, Debug)]
pub struct TroeschComplex {
    pub p: u32,
    pub r: u32,
    pub n: usize,
    pub mu: Composition,
    pub complex: PComplex,
}

impl TroeschComplex {
    /// Exponential-formula layout of B_d(r): one S^lambda per composition of d over
    /// the lines of Sha_r, with its degree. Single-factor complexes only.
    pub fn layout(&self) -> Vec<(Composition, u32)> {
        exp_decompose(PowerKind::Sym, self.mu.weight(), &sha(self.p, self.r))
    }

    /// The subspace S^{nu(r)} of the degree-0 term when mu = p^r nu, else zero:
    /// monomials in the degree-0 line with every exponent divisible by p^r.
    pub fn expected_kernel(&self) -> Subspace {
        let q = self.p.pow(self.r);
        let basis = self.complex.basis(0);
        let vs: Vec<Vec<u8>> = if self.mu.divides(q) {
            basis
                .iter()
                .enumerate()
                .filter(|(_, (_, l))| l.iter().all(|&x| x as u32 % q == 0))
                .map(|(i, _)| {
                    let mut v = vec![0u8; basis.len()];
                    v[i] = 1;
                    v
                })
                .collect()
        } else {
            Vec::new()
        };
        Subspace::span_vectors(self.p as u8, basis.len(), &vs)
    }

    /// Expected kernel per residue class: S^{nu(r)} on class 0, zero elsewhere.
    pub fn verify(&self) -> PExactnessReport {
        verify_p_exactness(&self.complex, Some(&self.expected_kernel()))
    }
}

/// B_d(r)(k^n).
pub fn build_troesch(d: u32, r: u32, n: usize, p: u32) -> Result<TroeschComplex, Error> {
    build_troesch_with_budget(d, r, n, p, DEFAULT_MAX_DIM)
}

/// B_d(r)(k^n), refusing to build more than `max_dim` basis vectors.
pub fn build_troesch_with_budget(d: u32, r: u32, n: usize, p: u32, max_dim: usize) -> Result<TroeschComplex, Error> {
    let mu = Composition::new(vec![d]);
    let complex = troesch_sum(std::slice::from_ref(&mu), r, n, p, max_dim)?;
    complex.check_nilpotent()?;
    Ok(TroeschComplex { p, r, n, mu, complex })
}

/// B_mu(r)(k^n) with the differential restricted from B_|mu|(r)(V^{+len mu}).
pub fn build_troesch_mu(mu: &Composition, r: u32, n: usize, p: u32) -> Result<TroeschComplex, Error> {
    let complex = troesch_sum(std::slice::from_ref(mu), r, n, p, DEFAULT_MAX_DIM)?;
    complex.check_nilpotent()?;
    Ok(TroeschComplex { p, r, n, mu: mu.clone(), complex })
}

/// The weight-mu block of B_d(r)(V^{+m}) (t built at ambient m*n), relabelled as
/// B_mu(r)(V): variable (l, i*n + j) goes to factor i, variable (l, j).
pub fn summand_restrict(t: &TroeschComplex, n: usize, mu: &Composition) -> Result<PComplex, Error> {
    let m = mu.len();
    if t.n != m * n || t.mu.len() != 1 || mu.weight() != t.mu.weight() {
        return Err(Error::DegreeMismatch(mu.weight(), t.mu.weight()));
    }
    let lines = t.p.pow(t.r) as usize;
    let split = |l: &[u8]| -> Option<Label> {
        let mut out = vec![0u8; m * lines * n];
        let mut w = vec![0u32; m];
        for (v, &e) in l.iter().enumerate() {
            let (line, rest) = (v / (m * n), v % (m * n));
            let (i, j) = (rest / n, rest % n);
            out[i * lines * n + line * n + j] = e;
            w[i] += e as u32;
        }
        (w == mu.parts()).then_some(out)
    };
    let c = &t.complex;
    let mut terms: BTreeMap<u32, Vec<Elem>> = BTreeMap::new();
    let mut old: HashMap<Label, (u32, usize)> = HashMap::new();
    for deg in c.degrees() {
        for (i, (_, l)) in c.basis(deg).iter().enumerate() {
            if let Some(s) = split(l) {
                old.insert(s.clone(), (deg, i));
                terms.entry(deg).or_default().push((0, s));
            }
        }
    }
    let lists: BTreeMap<u32, Vec<Vec<(usize, u8)>>> = c.degrees().into_iter().map(|d| (d, c.delta(d).transpose().row_lists())).collect();
    PComplex::from_rule(t.p, c.step(), terms, |(_, l)| {
        let (deg, i) = old[l];
        let tgt = c.basis(deg + c.step());
        lists[&deg][i].iter().map(|&(r, v)| ((0, split(&tgt[r].1).expect("delta preserves the torus weight")), v)).collect()
    })
}

/// Outcome of a p-exactness check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PExactnessReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl PExactnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, on every residue class mod step, that ker(delta^s) on the first term is
/// the expected kernel (given for class 0; zero for the other classes) and that
/// C^{i-p+s} -> C^i -> C^{i+s} is exact at every later term, for all 1 <= s < p.
pub fn verify_p_exactness(c: &PComplex, expected: Option<&Subspace>) -> PExactnessReport {
    let p = c.p();
    let step = c.step();
    let mut rep = PExactnessReport::default();
    let top = c.max_degree();
    let classes: Vec<(u32, u32)> = (1..p).flat_map(|s| (0..step).map(move |k| (s, k))).collect();
    let results: Vec<(usize, Vec<String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = classes
            .iter()
            .map(|&(s, class)| {
                scope.spawn(move || {
                    let mut checks = 0;
                    let mut fails = Vec::new();
                    let mut t = class;
                    while t <= top {
                        checks += 1;
                        let ker = kernel(&c.delta_power(t, s).to_dense());
                        let want = if t == class {
                            match (class, expected) {
                                (0, Some(e)) => e.clone(),
                                _ => Subspace::zero(p as u8, c.dim(t)),
                            }
                        } else {
                            let back = p - s;
                            if t >= back * step {
                                let img = c.delta_power(t - back * step, back).to_dense();
                                Subspace::full(p as u8, img.cols()).image_under(&img)
                            } else {
                                Subspace::zero(p as u8, c.dim(t))
                            }
                        };
                        if ker != want {
                            fails.push(format!("degree {t}, s = {s}: kernel dim {} vs expected dim {}", ker.dim(), want.dim()));
                        }
                        t += step;
                    }
                    (checks, fails)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("exactness worker panicked")).collect()
    });
    for (k, f) in results {
        rep.checks += k;
        rep.failures.extend(f);
    }
    rep
}

/// T(S^mu, r) at k^n: T^{2i} = B_{p^r mu}(r)^{p^r i}, T^{2i+1} = B_{p^r mu}(r)^{p^r i + p^{r-1}},
/// differentials delta then delta^{p-1}.
pub fn t_complex(mu: &Composition, r: u32, n: usize, p: u32) -> Result<CochainComplex, Error> {
    let b = build_troesch_mu(&mu.scale(p.pow(r)), r, n, p)?;
    Ok(b.complex.contract(1))
}

/// The chain map iota: B_d(r)(V^(1)) -> B_{pd}(r+1)(V), x_v -> x_v^p on every
/// variable, keeping the line. Sends degree i to degree p*i.
#[derive(Clone, Debug)]
pub struct IotaMap {
    pub src: TroeschComplex,
    pub dst: TroeschComplex,
    /// Component out of each source degree.
    pub maps: BTreeMap<u32, SparseMatrix>,
}

pub fn iota_map(d: u32, r: u32, n: usize, p: u32) -> Result<IotaMap, Error> {
    let src = build_troesch(d, r, n, p)?;
    let dst = build_troesch(p * d, r + 1, n, p)?;
    let big = p.pow(r + 1) as usize * n;
    let mut maps = BTreeMap::new();
    for t in src.complex.degrees() {
        let tb = dst.complex.basis(p * t);
        let index: HashMap<&Label, usize> = tb.iter().enumerate().map(|(i, (_, l))| (l, i)).collect();
        let sb = src.complex.basis(t);
        let trip: Vec<(usize, usize, u8)> = sb
            .iter()
            .enumerate()
            .map(|(c, (_, l))| {
                let mut img = vec![0u8; big];
                for (v, &e) in l.iter().enumerate() {
                    img[v] = (e as u32 * p) as u8;
                }
                (index[&img], c, 1)
            })
            .collect();
        maps.insert(t, SparseMatrix::from_triplets(p as u8, tb.len(), sb.len(), trip));
    }
    Ok(IotaMap { src, dst, maps })
}

impl IotaMap {
    /// iota o delta = delta o iota on every degree, and each component is injective.
    pub fn verify(&self) -> Result<(), Error> {
        let p = self.src.p;
        let (s, d) = (&self.src.complex, &self.dst.complex);
        for (&t, m) in &self.maps {
            if m.rank() != m.cols() {
                return Err(Error::Verification(format!("iota is not injective in degree {t}")));
            }
            let after = self.maps.get(&(t + s.step()));
            let lhs = d.delta(p * t).mul(m);
            let rhs = match after {
                Some(a) => a.mul(&s.delta(t)),
                None => SparseMatrix::zeros(p as u8, lhs.rows(), lhs.cols()),
            };
            if lhs != rhs {
                return Err(Error::Verification(format!("iota does not commute with delta in degree {t}")));
            }
        }
        Ok(())
    }
}

/// A natural map between sums of symmetric powers evaluated on Sha_r (x) k^n.
#[derive(Clone, Debug)]
pub struct NatTroeschMap {
    pub src: PComplex,
    pub dst: PComplex,
    pub maps: BTreeMap<u32, SparseMatrix>,
}

fn sym_parts(obj: &[FunctorExpr]) -> Result<Vec<Composition>, Error> {
    obj.iter()
        .map(|e| match e {
            FunctorExpr::Sym(c) => Ok(c.clone()),
            other => Err(Error::Unsupported(format!("{other} is not a symmetric power"))),
        })
        .collect()
}

/// Evaluate g on the graded space Sha_r (x) k^n and check it commutes with delta.
pub fn nat_on_troesch(g: &NatMapExpr, r: u32, n: usize, p: u32) -> Result<NatTroeschMap, Error> {
    let (sp, dp) = (sym_parts(&g.src()?)?, sym_parts(&g.dst()?)?);
    let (sd, dd) = (
        sp.iter().map(|c| c.weight()).max().unwrap_or(0),
        dp.iter().map(|c| c.weight()).max().unwrap_or(0),
    );
    if sd != dd && !sp.is_empty() && !dp.is_empty() {
        return Err(Error::DegreeMismatch(sd, dd));
    }
    let src = troesch_sum(&sp, r, n, p, DEFAULT_MAX_DIM)?;
    let dst = troesch_sum(&dp, r, n, p, DEFAULT_MAX_DIM)?;
    let m = p.pow(r) as usize * n;
    let mut maps = BTreeMap::new();
    for t in src.degrees() {
        let tb = dst.basis(t);
        let index: HashMap<&Elem, usize> = tb.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut trip = Vec::new();
        for (c, (i, l)) in src.basis(t).iter().enumerate() {
            for (j, l2, v) in g.apply(m, p, *i, l) {
                let Some(&row) = index.get(&(j, l2)) else {
                    return Err(Error::Verification(format!("natural map leaves degree {t}")));
                };
                trip.push((row, c, v));
            }
        }
        maps.insert(t, SparseMatrix::from_triplets(p as u8, tb.len(), src.dim(t), trip));
    }
    let out = NatTroeschMap { src, dst, maps };
    out.verify()?;
    Ok(out)
}

impl NatTroeschMap {
    pub fn verify(&self) -> Result<(), Error> {
        let step = self.src.step();
        for (&t, m) in &self.maps {
            let lhs = self.dst.delta(t).mul(m);
            let rhs = match self.maps.get(&(t + step)) {
                Some(a) => a.mul(&self.src.delta(t)),
                None => SparseMatrix::zeros(self.src.p() as u8, lhs.rows(), lhs.cols()),
            };
            if lhs != rhs {
                return Err(Error::Verification(format!("map does not commute with delta in degree {t}")));
            }
        }
        Ok(())
    }
}

/// B_mu(r) as the tensor product of the p-complexes B_{mu_i}(r): the differential
/// acts on one factor at a time (no cross terms between factors).
pub fn tensor_troesch(mu: &Composition, r: u32, n: usize, p: u32) -> Result<PComplex, Error> {
    let m = p.pow(r) as usize * n;
    check_budget(&[mu.parts()], m, DEFAULT_MAX_DIM)?;
    let mut terms: BTreeMap<u32, Vec<Elem>> = BTreeMap::new();
    for l in sym_labels(mu.parts(), m) {
        terms.entry(troesch_grading(p, r, n, &l)).or_default().push((0, l));
    }
    let c = PComplex::from_rule(p, p.pow(r - 1), terms, |(_, l)| {
        let mut out = Vec::new();
        for f in 0..mu.len() {
            let part = &l[f * m..(f + 1) * m];
            for (img, v) in troesch_delta(p, r, n, part) {
                let mut full = l.clone();
                full[f * m..(f + 1) * m].copy_from_slice(&img);
                out.push(((0, full), v));
            }
        }
        out
    })?;
    c.check_nilpotent()?;
    Ok(c)
}

/// Side-by-side data for the restricted and tensor-product differentials on B_mu(r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialComparison {
    /// Degrees where the two differentials differ as matrices.
    pub differing_degrees: Vec<u32>,
    /// Cohomology dimensions of the class-0 contractions, per s in 1..p.
    pub restricted: Vec<Vec<usize>>,
    pub tensor: Vec<Vec<usize>>,
}

pub fn compare_differentials(mu: &Composition, r: u32, n: usize, p: u32) -> Result<DifferentialComparison, Error> {
    let a = build_troesch_mu(mu, r, n, p)?.complex;
    let b = tensor_troesch(mu, r, n, p)?;
    let differing_degrees = a.degrees().into_iter().filter(|&t| a.delta(t) != b.delta(t)).collect();
    let dims = |c: &PComplex| (1..p).map(|s| c.contract(s).cohomology_dims()).collect();
    Ok(DifferentialComparison { differing_degrees, restricted: dims(&a), tensor: dims(&b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_piece_examples() {
        // U = k^2, phi: u0 -> u1, n = 2: phi_1(u0^2) = 2 u0 u1 = 0 at p = 2.
        let phi = SparseMatrix::from_triplets(2, 2, 2, [(1, 0, 1)]);
        let m = convolution_piece(&phi, 1, 2);
        // Basis (0,2), (1,1), (2,0): the column of u0^2 vanishes, u0 u1 -> u1^2.
        assert!((0..3).all(|r| m.get(r, 2) == 0));
        assert_eq!(m.get(0, 1), 1);
        let phi3 = SparseMatrix::from_triplets(3, 2, 2, [(1, 0, 1)]);
        let m3 = convolution_piece(&phi3, 1, 2);
        assert_eq!(m3.nnz(), 2);
        assert_eq!(convolution_piece(&phi3, 0, 3), SparseMatrix::identity(3, 4));
    }

    #[test]
    fn rho_digits() {
        assert_eq!(rho(3, 0, 0), Some(1));
        assert_eq!(rho(3, 0, 2), None);
        assert_eq!(rho(2, 1, 1), Some(3));
        assert_eq!(rho(2, 1, 2), None);
    }

    #[test]
    fn small_troesch_is_nilpotent_and_exact() {
        let t = build_troesch(2, 1, 1, 2).unwrap();
        assert_eq!(t.complex.degrees(), vec![0, 1, 2]);
        assert!(t.verify().passed());
    }
}
