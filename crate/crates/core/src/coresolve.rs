//! Injective coresolutions by direct sums of symmetric powers, with natural-map
//! differentials: bar complexes, tensor products and precomposition.

use crate::combinat::{compositions, Composition, GradedSpace};
use crate::expr::FunctorExpr;
use crate::natmap::{nat_eval_at, NatMapExpr};
use crate::realize::Realization;
use crate::Error;

/// One nonzero component of a differential: (source summand, target summand, map).
pub type Entry = (usize, usize, NatMapExpr);

/// A cochain complex of sums of S^mu (optionally precomposed by a graded space)
/// coresolving `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coresolution {
    pub target: FunctorExpr,
    /// Parts of the symmetric powers summing to each term.
    pub terms: Vec<Vec<Vec<u32>>>,
    /// Degrees of the lines every term is precomposed with (tensor with k when absent).
    pub lines: Option<Vec<u32>>,
    /// Components of the differential out of each term but the last.
    pub diffs: Vec<Vec<Entry>>,
}

fn sign(k: usize, p: u32) -> u8 {
    if k % 2 == 0 || p == 2 {
        1
    } else {
        (p - 1) as u8
    }
}

fn scaled(c: u8, f: NatMapExpr) -> NatMapExpr {
    if c == 1 {
        f
    } else {
        NatMapExpr::scalar(c, f)
    }
}

impl Coresolution {
    /// S^mu is injective: the coresolution is itself.
    pub fn sym(parts: &[u32]) -> Self {
        Coresolution {
            target: FunctorExpr::sym(parts),
            terms: vec![vec![parts.to_vec()]],
            lines: None,
            diffs: Vec::new(),
        }
    }

    /// Degree-n part of the reduced bar complex of S*: term k is the sum over
    /// compositions of n into n-k positive parts, with differential
    /// sum_i (-1)^i (multiply factors i and i+1). Coresolves the exterior power.
    pub fn bar(n: u32, p: u32) -> Self {
        if n == 0 {
            let mut c = Self::sym(&[]);
            c.target = FunctorExpr::Unit;
            return c;
        }
        let positive = |len: u32| -> Vec<Vec<u32>> {
            compositions(n - len, len as usize).into_iter().map(|c| c.0.iter().map(|x| x + 1).collect()).collect()
        };
        let terms: Vec<Vec<Vec<u32>>> = (0..n).map(|k| positive(n - k)).collect();
        let diffs = (0..terms.len() - 1)
            .map(|k| {
                let mut out = Vec::new();
                for (i, mu) in terms[k].iter().enumerate() {
                    for at in 0..mu.len() - 1 {
                        let mut merged = mu[..at].to_vec();
                        merged.push(mu[at] + mu[at + 1]);
                        merged.extend_from_slice(&mu[at + 2..]);
                        let j = terms[k + 1].iter().position(|x| *x == merged).expect("merged composition is a term");
                        out.push((i, j, scaled(sign(at, p), NatMapExpr::mult(mu, at))));
                    }
                }
                out
            })
            .collect();
        Coresolution { target: FunctorExpr::ext(&[n]), terms, lines: None, diffs }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Summands of term k as functor expressions.
    pub fn term_exprs(&self, k: usize) -> Vec<FunctorExpr> {
        self.terms[k]
            .iter()
            .map(|mu| {
                let s = FunctorExpr::sym(mu);
                match &self.lines {
                    Some(l) => FunctorExpr::precompose(lines_space(l), s),
                    None => s,
                }
            })
            .collect()
    }

    /// The differential out of term k as one natural map between direct sums.
    pub fn differential(&self, k: usize) -> Result<NatMapExpr, Error> {
        let plain = |k: usize| -> Vec<FunctorExpr> { self.terms[k].iter().map(|m| FunctorExpr::sym(m)).collect() };
        let (src, dst) = (plain(k), plain(k + 1));
        let mut total = NatMapExpr::Zero { src: src.clone(), dst: dst.clone() };
        for (i, j, f) in &self.diffs[k] {
            let inj = NatMapExpr::Inject { obj: dst.clone(), index: *j };
            let proj = NatMapExpr::Project { obj: src.clone(), index: *i };
            let piece = NatMapExpr::compose(inj, NatMapExpr::compose(f.clone(), proj)?)?;
            total = NatMapExpr::add(total, piece)?;
        }
        Ok(match &self.lines {
            Some(l) => NatMapExpr::Pre(lines_space(l), Box::new(total)),
            None => total,
        })
    }

    /// Tensor product with Koszul sign d(x (x) y) = dx (x) y + (-1)^deg(x) x (x) dy.
    /// Summands merge: S^mu (x) S^nu = S^(mu, nu).
    pub fn tensor(&self, other: &Coresolution, p: u32) -> Result<Self, Error> {
        if self.lines.is_some() || other.lines.is_some() {
            return Err(Error::Unsupported("tensor product of precomposed coresolutions".into()));
        }
        let len = self.len() + other.len() - 1;
        let mut terms: Vec<Vec<Vec<u32>>> = vec![Vec::new(); len];
        let mut index = std::collections::HashMap::new();
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
        let mut diffs: Vec<Vec<Entry>> = vec![Vec::new(); len.saturating_sub(1)];
        for a in 0..self.len() {
            for b in 0..other.len() {
                let n = a + b;
                if a + 1 < self.len() {
                    for (i, i2, f) in &self.diffs[a] {
                        for (j, y) in other.terms[b].iter().enumerate() {
                            let g = NatMapExpr::tensor(f.clone(), NatMapExpr::identity(vec![FunctorExpr::sym(y)]));
                            diffs[n].push((index[&(a, *i, b, j)], index[&(a + 1, *i2, b, j)], g));
                        }
                    }
                }
                if b + 1 < other.len() {
                    for (j, j2, f) in &other.diffs[b] {
                        for (i, x) in self.terms[a].iter().enumerate() {
                            let g = NatMapExpr::tensor(NatMapExpr::identity(vec![FunctorExpr::sym(x)]), f.clone());
                            diffs[n].push((index[&(a, i, b, *j)], index[&(a, i, b + 1, *j2)], scaled(sign(a, p), g)));
                        }
                    }
                }
            }
        }
        let target = FunctorExpr::tensor(vec![self.target.clone(), other.target.clone()]);
        Ok(Coresolution { target, terms, lines: None, diffs })
    }

    /// Apply G -> G(W (x) I) termwise; terms stay injective by the exponential formula.
    pub fn precompose(&self, w: &GradedSpace) -> Self {
        let outer = w.lines();
        let mut lines: Vec<u32> = match &self.lines {
            // G(W2 (x) -) precomposed with W: line (l2, l) has degree d2 + d.
            Some(inner) => inner.iter().flat_map(|&d2| outer.iter().map(move |&d| d2 + d)).collect(),
            None => outer,
        };
        // Terms are symmetric in the lines, so any homogeneous ordering will do.
        lines.sort_unstable();
        Coresolution {
            target: FunctorExpr::precompose(w.clone(), self.target.clone()),
            terms: self.terms.clone(),
            lines: Some(lines),
            diffs: self.diffs.clone(),
        }
    }

    /// Coresolve a target built from S, L, T, k, tensor products and precomposition.
    pub fn of(g: &FunctorExpr, p: u32) -> Result<Self, Error> {
        use FunctorExpr as E;
        Ok(match g {
            E::Sym(m) => Self::sym(m.parts()),
            E::Tensor(d) => {
                let mut c = Self::sym(&vec![1; *d as usize]);
                c.target = g.clone();
                c
            }
            E::Unit => {
                let mut c = Self::sym(&[]);
                c.target = E::Unit;
                c
            }
            E::Ext(m) => {
                let mut acc = Self::of(&E::Unit, p)?;
                for &x in m.parts() {
                    acc = acc.tensor(&Self::bar(x, p), p)?;
                }
                acc.target = g.clone();
                acc
            }
            E::TensorProduct(cs) => {
                let mut acc = Self::of(&E::Unit, p)?;
                for c in cs {
                    acc = acc.tensor(&Self::of(c, p)?, p)?;
                }
                acc.target = g.clone();
                acc
            }
            E::Twist(0, c) => Self::of(c, p)?,
            E::Precompose(w, c) => {
                let mut out = Self::of(c, p)?.precompose(w);
                out.target = g.clone();
                out
            }
            E::Twist(..) => return Err(Error::Unsupported(format!("{g}: twisted targets need the Troesch totalization"))),
            E::Div(_) | E::Dual(_) => return Err(Error::Unsupported(format!("{g}: divided powers and duals are not coresolved directly"))),
            E::Compose(..) => return Err(Error::Unsupported(format!("{g}: composite functors"))),
        })
    }

    /// Evaluate at k^n: consecutive differentials compose to zero, the cohomology is
    /// the target in degree 0 and vanishes elsewhere. Returns the cohomology dims.
    pub fn verify(&self, n: usize, p: u32) -> Result<Vec<usize>, Error> {
        let dims: Vec<usize> = (0..self.len())
            .map(|k| self.term_exprs(k).iter().map(|e| Realization::new(e, n, p).map(|r| r.dim())).sum::<Result<usize, Error>>())
            .collect::<Result<_, _>>()?;
        let mats = (0..self.len().saturating_sub(1))
            .map(|k| nat_eval_at(&self.differential(k)?, n, p).map(|x| x.2))
            .collect::<Result<Vec<_>, Error>>()?;
        for k in 1..mats.len() {
            if !mats[k].mul(&mats[k - 1]).is_zero() {
                return Err(Error::Verification(format!("d o d != 0 at term {k} of the coresolution of {}", self.target)));
            }
        }
        let ranks: Vec<usize> = mats.iter().map(|m| m.rank()).collect();
        let coh: Vec<usize> = (0..self.len())
            .map(|k| dims[k] - ranks.get(k).copied().unwrap_or(0) - if k > 0 { ranks[k - 1] } else { 0 })
            .collect();
        let want = Realization::new(&self.target, n, p)?.dim();
        if coh[0] != want || coh[1..].iter().any(|&x| x != 0) {
            return Err(Error::Verification(format!("coresolution of {} has cohomology {coh:?}", self.target)));
        }
        Ok(coh)
    }
}

/// The graded space with one line in each listed degree.
pub fn lines_space(lines: &[u32]) -> GradedSpace {
    let mut w = GradedSpace::new(std::iter::empty());
    for &d in lines {
        w.add(d, 1);
    }
    w
}

/// All compositions of n into exactly `len` positive parts.
pub fn positive_compositions(n: u32, len: usize) -> Vec<Composition> {
    if len == 0 || (len as u32) > n {
        return Vec::new();
    }
    compositions(n - len as u32, len).into_iter().map(|c| Composition::new(c.0.iter().map(|x| x + 1).collect::<Vec<_>>())).collect()
}
