//! Acceptance suite. Each criterion recomputes its quantities and compares them
//! exactly against an independent oracle; nothing is compared up to tolerance.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{catalog, catalog_of_degree};
use crate::combinat::{e_space, GradedSpace};
use crate::coresolve::{positive_compositions, Coresolution};
use crate::expr::FunctorExpr;
use crate::ext::{adjunction_check, collapse_check, ext, ext_twisted, orient, twist_stability_check, twisted_hom_dims, Verdict};
use crate::graded::graded_eval_dims;
use crate::hom::{fr_hom_iso_check, hom_dim, hom_space, hom_space_bruteforce};
use crate::lifting::{check_twist_compat, eval_from_yoneda};
use crate::linalg::{kernel, rref, solve, BitMatrix, Matrix, SparseMatrix};
use crate::natmap::{nat_eval_at, twist_lift};
use crate::pcomplex::{build_troesch, iota_map};
use crate::realize::Realization;
use crate::Error;

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn() -> Result<String, String>;

/// Every criterion in run order: (id, name, check).
pub const CRITERIA: &[(&str, &str, Check)] = &[
    ("1", "Troesch complexes are p-exact coresolutions or p-acyclic", troesch_validity),
    ("2", "Troesch summand layout of B_6(1) at p=2 and B_3(1) at p=3", troesch_shapes),
    ("3", "odd rows of Hom(F^(1), T(S^mu, 1)) vanish", odd_vanishing),
    ("4", "Ext(I^(r), I^(r)) = E_r", twisted_identity),
    ("5", "Ext(I^(2), S^(2^(2-j))(j)) at p=2", twisted_symmetric_powers),
    ("6", "Ext(I^(1), G^2) at p=2 through the duality flip", divided_square),
    ("7", "total dim Ext(T^2(1), T^2(1)) = 2 p^2", tensor_square),
    ("8", "twisted Ext equals graded Hom and evaluation on E_1", graded_cross_validation),
    ("9", "twisting spectral sequence collapse sweep, degree <= 3, p=2, r=1", collapse_sweep),
    ("10", "bar differentials are twist compatible and lift to the same matrices", bar_twist_compat),
    ("11", "iota commutes with the p-differentials and is injective", iota_maps),
    ("12", "Poincare series of S^j(S^2)(E_1), stated generator list", poincare_stated),
    ("12b", "Poincare series of S^j(S^2)(E_1), generators a basis of S^2(E_1)", poincare_corrected),
    ("13", "property suites", property_suites),
];

/// Criteria whose literal statement disagrees with an exact computation. Criterion
/// 12 lists generators in degrees 0 and 4 twice, while S^2(E_1) has one line in each
/// of degrees 0, 2 and 4; 12b checks the corrected list.
pub const EXPECTED_FAILURES: &[&str] = &["12"];

/// Whether a result is as expected: passed, or failed and listed in EXPECTED_FAILURES.
pub fn as_expected(r: &CriterionResult) -> bool {
    r.passed != EXPECTED_FAILURES.contains(&r.id)
}

/// Run one criterion by id.
pub fn run_criterion(id: &str) -> Option<CriterionResult> {
    CRITERIA.iter().find(|c| c.0 == id).map(run_one)
}

/// Run every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(run_one).collect()
}

fn run_one(c: &(&'static str, &'static str, Check)) -> CriterionResult {
    let start = Instant::now();
    let out = (c.2)();
    let millis = start.elapsed().as_millis();
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id: c.0, name: c.1, passed, detail, millis }
}

fn ck<T>(r: Result<T, Error>, ctx: impl Display) -> Result<T, String> {
    r.map_err(|e| format!("{ctx}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Map over items on all cores, keeping input order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let mut out: Vec<(usize, U)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= items.len() {
                            break local;
                        }
                        local.push((i, f(&items[i])));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    out.sort_by_key(|x| x.0);
    out.into_iter().map(|x| x.1).collect()
}

fn first_error(results: Vec<Result<usize, String>>) -> Result<usize, String> {
    results.into_iter().sum()
}

fn graded_of(t: &BTreeMap<u32, usize>) -> GradedSpace {
    let mut g = GradedSpace::default();
    for (&s, &n) in t {
        g.add(s, n);
    }
    g
}

fn troesch_validity() -> Result<String, String> {
    let cases = [(2u32, 1u32, 1u32), (2, 1, 2), (2, 1, 3), (2, 2, 1), (3, 1, 1), (3, 1, 2)];
    let jobs: Vec<(u32, u32, u32, usize, u32)> = cases
        .iter()
        .flat_map(|&(p, r, d)| [1usize, 2].into_iter().flat_map(move |n| [d * p.pow(r), d].map(|w| (p, r, d, n, w))))
        .collect();
    let checks = first_error(par_map(&jobs, |&(p, r, _, n, w)| {
        let ctx = format!("B_{w}({r}) at N={n}, p={p}");
        let t = ck(build_troesch(w, r, n, p), &ctx)?;
        ck(t.complex.check_nilpotent(), &ctx)?;
        let rep = t.verify();
        ensure(rep.passed(), || format!("{ctx}: {}", rep.failures.join("; ")))?;
        Ok(rep.checks)
    }))?;
    Ok(format!("{} complexes, {checks} exactness checks", jobs.len()))
}

/// Display name of one summand: "S2 S1" for S^2 (x) S^1, "T3" for all-ones parts.
fn summand_name(parts: &[u32]) -> String {
    let nz: Vec<u32> = parts.iter().copied().filter(|&x| x > 0).collect();
    if nz.len() > 1 && nz.iter().all(|&x| x == 1) {
        return format!("T{}", nz.len());
    }
    nz.iter().map(|x| format!("S{x}")).collect::<Vec<_>>().join(" ")
}

fn troesch_shapes() -> Result<String, String> {
    let stated: [(u32, u32, &[&[&str]]); 2] = [
        (2, 6, &[&["S6"], &["S5 S1"], &["S4 S2"], &["S3 S3"], &["S2 S4"], &["S1 S5"], &["S6"]]),
        (
            3,
            3,
            &[&["S3"], &["S2 S1"], &["S2 S1", "S1 S2"], &["S3", "T3"], &["S2 S1", "S1 S2"], &["S1 S2"], &["S3"]],
        ),
    ];
    let mut terms = 0;
    for (p, d, want) in stated {
        for n in [1usize, 2] {
            let t = ck(build_troesch(d, 1, n, p), format!("B_{d}(1) at p={p}"))?;
            let mut by_degree: BTreeMap<u32, Vec<String>> = BTreeMap::new();
            let mut dims: BTreeMap<u32, usize> = BTreeMap::new();
            for (lam, deg) in t.layout() {
                by_degree.entry(deg).or_default().push(summand_name(lam.parts()));
                let r = ck(Realization::new(&FunctorExpr::Sym(lam.nonzero()), n, p), "summand")?;
                *dims.entry(deg).or_default() += r.dim();
            }
            let got: Vec<Vec<String>> = by_degree
                .into_values()
                .map(|mut v| {
                    v.sort();
                    v
                })
                .collect();
            let want: Vec<Vec<String>> = want
                .iter()
                .map(|v| {
                    let mut v: Vec<String> = v.iter().map(|s| s.to_string()).collect();
                    v.sort();
                    v
                })
                .collect();
            ensure(got == want, || format!("B_{d}(1) at p={p}: layout {got:?}, expected {want:?}"))?;
            for (&deg, &dim) in &dims {
                ensure(t.complex.dim(deg) == dim, || {
                    format!("B_{d}(1) at p={p}, N={n}: degree {deg} has dim {} but the layout gives {dim}", t.complex.dim(deg))
                })?;
            }
            ensure(t.complex.degrees() == dims.keys().copied().collect::<Vec<_>>(), || format!("B_{d}(1): degree range"))?;
            terms += want.len();
        }
    }
    Ok(format!("{terms} degrees match"))
}

fn odd_vanishing() -> Result<String, String> {
    let jobs: Vec<(u32, FunctorExpr, Vec<u32>)> = [2u32, 3]
        .into_iter()
        .flat_map(|p| {
            catalog(3).into_iter().flat_map(move |f| {
                let d = f.degree(p);
                (1..=d as usize).flat_map(move |len| positive_compositions(d, len)).map(move |mu| (p, f.clone(), mu.0))
            })
        })
        .collect();
    let checks = first_error(par_map(&jobs, |(p, f, mu)| {
        let ctx = format!("F={f}, mu={mu:?}, p={p}");
        let dims = ck(twisted_hom_dims(f, mu, 1, *p), &ctx)?;
        ensure(dims.iter().skip(1).step_by(2).all(|&x| x == 0), || format!("{ctx}: odd rows {dims:?}"))?;
        // with odd rows zero the differential vanishes, so even rows are the Ext groups
        let t = ck(ext_twisted(f, &FunctorExpr::sym(mu), 1, *p), &ctx)?;
        let even: BTreeMap<u32, usize> =
            dims.iter().enumerate().filter(|&(s, &n)| s % 2 == 0 && n > 0).map(|(s, &n)| (s as u32, n)).collect();
        ensure(even == t.by_s(), || format!("{ctx}: Hom rows {dims:?} but Ext {:?}", t.by_s()))?;
        Ok(1)
    }))?;
    Ok(format!("{checks} (F, mu, p) triples"))
}

fn even_ones(top: u32, step: u32) -> Vec<usize> {
    (0..top).map(|s| usize::from(s % step == 0)).collect()
}

fn twisted_identity() -> Result<String, String> {
    let i = FunctorExpr::id();
    for (p, r) in [(2u32, 1u32), (2, 2), (3, 1)] {
        let t = ck(ext_twisted(&i, &i, r, p), format!("p={p}, r={r}"))?;
        let top = 2 * p.pow(r);
        let mut got = t.dims_by_s();
        ensure(got.len() <= top as usize, || format!("p={p}, r={r}: nonzero above 2p^r - 2: {got:?}"))?;
        got.resize(top as usize, 0);
        ensure(got == even_ones(top, 2), || format!("p={p}, r={r}: {got:?}"))?;
    }
    Ok("(2,1), (2,2), (3,1)".into())
}

fn twisted_symmetric_powers() -> Result<String, String> {
    let (p, r) = (2u32, 2u32);
    let f = FunctorExpr::twist(r, FunctorExpr::id());
    for j in 0..=r {
        let g = FunctorExpr::twist(j, FunctorExpr::sym(&[p.pow(r - j)]));
        let t = ck(ext(&f, &g, p), format!("j={j}"))?;
        let top = 2 * p.pow(r);
        let mut got = t.dims_by_s();
        ensure(got.len() <= top as usize, || format!("j={j}: nonzero at or above 2p^r: {got:?}"))?;
        got.resize(top as usize, 0);
        ensure(got == even_ones(top, 2 * p.pow(r - j)), || format!("j={j}: {got:?}"))?;
    }
    Ok("j = 0, 1, 2".into())
}

fn divided_square() -> Result<String, String> {
    let p = 2;
    let (f, g) = (FunctorExpr::twist(1, FunctorExpr::id()), FunctorExpr::div(&[2]));
    let (f2, g2) = ck(orient(&f, &g), "orient")?;
    ensure(f2 == FunctorExpr::sym(&[2]) && g2 == f, || format!("flip gave ({f2}, {g2})"))?;
    let got = ck(ext(&f, &g, p), "Ext")?.dims_by_s();
    ensure(got == vec![0, 0, 1], || format!("{got:?}"))?;
    Ok("Ext^2 = F_2, else 0".into())
}

fn tensor_square() -> Result<String, String> {
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let t2 = FunctorExpr::Tensor(2);
        let t = ck(ext_twisted(&t2, &t2, 1, p), format!("p={p}"))?;
        let want = 2 * (p * p) as usize;
        ensure(t.total() == want, || format!("p={p}: total {} instead of {want}", t.total()))?;
        out.push(format!("p={p}: {want}"));
    }
    Ok(out.join(", "))
}

fn graded_cross_validation() -> Result<String, String> {
    let p = 2;
    let e1 = e_space(p, 1);
    let jobs: Vec<(FunctorExpr, Vec<u32>)> = catalog(3)
        .into_iter()
        .flat_map(|f| {
            let d = f.degree(p);
            (1..=d as usize).flat_map(move |len| positive_compositions(d, len)).map(move |mu| (f.clone(), mu.0))
        })
        .collect();
    let sym_checks = first_error(par_map(&jobs, |(f, mu)| {
        let ctx = format!("F={f}, mu={mu:?}");
        let twisted = ck(ext_twisted(f, &FunctorExpr::sym(mu), 1, p), &ctx)?;
        let n = f.degree(p) as usize;
        let src = ck(Realization::new(f, n, p), &ctx)?;
        let dst = ck(Realization::new(&FunctorExpr::precompose(e1.clone(), FunctorExpr::sym(mu)), n, p), &ctx)?;
        // E_1 sits in degrees 0 and 2, so Hom degrees are already Ext degrees
        let hom = ck(hom_space(&src, &dst), &ctx)?.graded_dims();
        ensure(graded_of(&twisted.by_s()) == hom, || format!("{ctx}: Ext {:?}, graded Hom {hom}", twisted.by_s()))?;
        Ok(1)
    }))?;
    let cat = catalog(3);
    let eval_checks = first_error(par_map(&cat, |f| {
        let d = f.degree(p);
        let t = ck(ext(&FunctorExpr::twist(1, FunctorExpr::div(&[d])), &FunctorExpr::twist(1, f.clone()), p), f)?;
        let want = ck(graded_eval_dims(f, &e1, p), f)?;
        ensure(graded_of(&t.by_s()) == want, || format!("G^{d}(1) against {f}(1): Ext {:?}, F(E_1) {want}", t.by_s()))?;
        Ok(1)
    }))?;
    Ok(format!("{sym_checks} symmetric targets, {eval_checks} divided-power sources"))
}

fn collapse_sweep() -> Result<String, String> {
    let (p, r) = (2, 1);
    let pairs: Vec<(FunctorExpr, FunctorExpr)> = (1..=3)
        .flat_map(|d| {
            let cat = catalog_of_degree(d);
            cat.iter().flat_map(|f| cat.iter().map(move |g| (f.clone(), g.clone()))).collect::<Vec<_>>()
        })
        .collect();
    let results = par_map(&pairs, |(f, g)| match collapse_check(f, g, r, p) {
        Ok(rep) => Ok(Some(rep)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(format!("({f}, {g}): {e}")),
    });
    let (mut ok, mut skipped) = (0, Vec::new());
    for ((f, g), res) in pairs.iter().zip(results) {
        match res? {
            None => skipped.push(format!("({f}, {g})")),
            Some(rep) => {
                ensure(rep.euler_e2 == rep.euler_abutment, || format!("({f}, {g}): Euler {} vs {}", rep.euler_e2, rep.euler_abutment))?;
                ensure(rep.e2_total == rep.abutment_total && rep.verdict == Verdict::Collapse, || {
                    format!("({f}, {g}): E_2 total {}, abutment {}, {:?}", rep.e2_total, rep.abutment_total, rep.verdict)
                })?;
                ok += 1;
            }
        }
    }
    Ok(format!("{ok} pairs collapse; outside the coresolvable class: {}", if skipped.is_empty() { "none".into() } else { skipped.join(" ") }))
}

fn sym_parts(e: &FunctorExpr) -> Option<Vec<u32>> {
    match e {
        FunctorExpr::Sym(m) => Some(m.parts().to_vec()),
        _ => None,
    }
}

/// Largest dim(src) * dim(dst) at which descended and lifted matrices are compared.
const MATRIX_COMPARE_LIMIT: usize = 40_000;

fn bar_twist_compat() -> Result<String, String> {
    let jobs: Vec<(u32, u32, u32)> =
        [2u32, 3].into_iter().flat_map(|p| [1u32, 2].into_iter().flat_map(move |r| (1..=4).map(move |n| (p, r, n)))).collect();
    let results = par_map(&jobs, |&(p, r, n)| -> Result<(usize, usize), String> {
        let bar = Coresolution::bar(n, p);
        let (mut maps, mut matrices) = (0, 0);
        for k in 0..bar.diffs.len() {
            let ctx = format!("bar {n}, d^{k}, p={p}, r={r}");
            let d = ck(bar.differential(k), &ctx)?;
            let t = ck(check_twist_compat(&d, r, p), &ctx)?;
            ensure(t.compatible, || format!("{ctx}: not compatible, witness {:?}", t.witness))?;
            ensure(t.agrees_with_lift == Some(true), || format!("{ctx}: descended map differs from the lift"))?;
            maps += 1;
            // component by component, as matrices at ambient 2
            let q = p.pow(r);
            for (i, j, f) in &bar.diffs[k] {
                let c = ck(check_twist_compat(f, r, p), &ctx)?;
                let (src, dst) = (ck(f.src(), &ctx)?, ck(f.dst(), &ctx)?);
                let (Some(mu), Some(nu)) = (sym_parts(&src[0]), sym_parts(&dst[0])) else {
                    return Err(format!("{ctx}: component ({i}, {j}) is not between symmetric powers"));
                };
                let (mu, nu): (Vec<u32>, Vec<u32>) = (mu.iter().map(|x| x * q).collect(), nu.iter().map(|x| x * q).collect());
                let size: usize = mu.iter().chain(&nu).map(|&x| x as usize + 1).product();
                if size > MATRIX_COMPARE_LIMIT {
                    continue;
                }
                let coords = c.descended.get(&(0, 0)).ok_or_else(|| format!("{ctx}: component ({i}, {j}) did not descend"))?;
                let from = ck(eval_from_yoneda(&mu, &nu, coords, 2, p), &ctx)?;
                let lifted = ck(twist_lift(f, r, p).and_then(|l| nat_eval_at(&l, 2, p)), &ctx)?.2;
                ensure(from.to_dense() == lifted.to_dense(), || format!("{ctx}: component ({i}, {j}) matrices differ"))?;
                matrices += 1;
            }
        }
        Ok((maps, matrices))
    });
    let (mut maps, mut matrices) = (0, 0);
    for r in results {
        let (a, b) = r?;
        maps += a;
        matrices += b;
    }
    Ok(format!("{maps} differentials compatible, {matrices} component matrices equal"))
}

fn iota_maps() -> Result<String, String> {
    let mut count = 0;
    for (p, r, d) in [(2u32, 1u32, 1u32), (2, 1, 2), (3, 1, 1)] {
        for n in [1usize, 2] {
            let ctx = format!("(p,r,d)=({p},{r},{d}), N={n}");
            ck(iota_map(d, r, n, p).and_then(|m| m.verify()), &ctx)?;
            count += 1;
        }
    }
    Ok(format!("{count} maps"))
}

/// Coefficients of the free commutative algebra on generators of the given
/// degrees, restricted to monomials of length j: independent monomial enumeration.
pub fn monomial_series(generators: &[u32], j: u32) -> GradedSpace {
    fn go(gens: &[u32], from: usize, left: u32, deg: u32, out: &mut GradedSpace) {
        if left == 0 {
            out.add(deg, 1);
            return;
        }
        for i in from..gens.len() {
            go(gens, i, left - 1, deg + gens[i], out);
        }
    }
    let mut out = GradedSpace::default();
    go(generators, 0, j, 0, &mut out);
    out
}

fn poincare_against(generators: &[u32]) -> Result<String, String> {
    let p = 2;
    let e1 = e_space(p, 1);
    let mut mismatches = Vec::new();
    for j in 0..=3u32 {
        let expr = FunctorExpr::compose(FunctorExpr::sym(&[j]), FunctorExpr::sym(&[2]));
        let got = ck(graded_eval_dims(&expr, &e1, p), format!("j={j}"))?;
        let want = monomial_series(generators, j);
        if got != want {
            mismatches.push(format!("j={j}: computed {got}, generators give {want}"));
        }
    }
    if mismatches.is_empty() {
        Ok("j = 0..3 agree".into())
    } else {
        Err(mismatches.join("; "))
    }
}

fn poincare_stated() -> Result<String, String> {
    // first degrees of the stated generators: 4i (i < 2), 4j (j < 2), 2(k + l) (k < l < 2)
    let mut gens: Vec<u32> = (0..2).map(|i| 4 * i).collect();
    gens.extend((0..2).map(|j| 4 * j));
    gens.extend((0..2u32).flat_map(|k| (k + 1..2).map(move |l| 2 * (k + l))));
    poincare_against(&gens)
}

fn poincare_corrected() -> Result<String, String> {
    // products e_k e_l (k <= l) of the lines of E_1
    let lines = e_space(2, 1).lines();
    let gens: Vec<u32> = (0..lines.len()).flat_map(|k| (k..lines.len()).map(|l| lines[k] + lines[l]).collect::<Vec<_>>()).collect();
    poincare_against(&gens)
}

fn property_suites() -> Result<String, String> {
    let suites: [(&str, Check); 7] = [
        ("linalg", linalg_suite),
        ("hom oracle", hom_oracle_suite),
        ("exponential", exponential_suite),
        ("tensor endomorphisms", tensor_endomorphism_suite),
        ("twisted Hom", twisted_hom_suite),
        ("adjunction", adjunction_suite),
        ("twist stability", stability_suite),
    ];
    let results = par_map(&suites, |(name, f)| f().map(|d| format!("{name}: {d}")).map_err(|e| format!("{name}: {e}")));
    Ok(results.into_iter().collect::<Result<Vec<_>, _>>()?.join("; "))
}

/// Number of random matrices in the linear algebra suite.
pub const LINALG_CASES: usize = 10_000;

fn linalg_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    for case in 0..LINALG_CASES {
        let p = [2u8, 3, 5][rng.gen_range(0..3)];
        let (rows, cols) = (rng.gen_range(0..=8), rng.gen_range(1..=9));
        let data: Vec<u8> = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        let m = Matrix::from_data(p, rows, cols, data).map_err(|e| e.to_string())?;
        let ctx = || format!("case {case}: {m:?}");
        let e = rref(&m);
        ensure(e.rank == m.rank(), ctx)?;
        ensure(rref(&e.matrix).matrix == e.matrix, ctx)?;
        let k = kernel(&m);
        ensure(k.dim() + e.rank == cols, ctx)?;
        ensure(k.basis_vectors().iter().all(|v| m.mul_vec(v).iter().all(|&x| x == 0)), ctx)?;
        ensure(SparseMatrix::from_dense(&m).rank() == e.rank, ctx)?;
        if p == 2 {
            ensure(BitMatrix::from_matrix(&m).rref().len() == e.rank, ctx)?;
        }
        let x: Vec<u8> = (0..cols).map(|_| rng.gen_range(0..p)).collect();
        let b = m.mul_vec(&x);
        let y = solve(&m, &b).ok_or_else(ctx)?;
        ensure(m.mul_vec(&y) == b, ctx)?;
    }
    Ok(format!("{LINALG_CASES} random matrices"))
}

fn hom_oracle_suite() -> Result<String, String> {
    let jobs: Vec<(u32, FunctorExpr, FunctorExpr, usize)> = [2u32, 3]
        .into_iter()
        .flat_map(|p| {
            let cat = catalog(3);
            cat.iter()
                .flat_map(|f| cat.iter().map(move |g| (f.clone(), g.clone())))
                .filter(move |(f, g)| f.degree(p) == g.degree(p))
                .flat_map(move |(f, g)| ((f.degree(p) as usize).max(1)..=3).map(move |n| (p, f.clone(), g.clone(), n)))
                .collect::<Vec<_>>()
        })
        .collect();
    let n = first_error(par_map(&jobs, |(p, f, g, n)| {
        let ctx = format!("Hom({f}, {g}) at k^{n}, p={p}");
        let (fr, gr) = (ck(Realization::new(f, *n, *p), &ctx)?, ck(Realization::new(g, *n, *p), &ctx)?);
        let fast = ck(hom_space(&fr, &gr), &ctx)?;
        let slow = ck(hom_space_bruteforce(&fr, &gr), &ctx)?;
        ensure(fast.space == slow.space, || ctx.clone())?;
        Ok(1)
    }))?;
    Ok(format!("{n} Hom spaces equal the brute force"))
}

/// Coefficient of x^d in prod over lines of W of the power series of X:
/// 1/(1 - y^deg x) for S and G, (1 + y^deg x) for L. Returns a graded space.
fn series_coefficient(kind: char, d: u32, w: &GradedSpace) -> GradedSpace {
    // poly[k] = graded dims of the x^k coefficient
    let mut poly: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); d as usize + 1];
    poly[0].insert(0, 1);
    for line in w.lines() {
        let mut next: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); d as usize + 1];
        for (k, coef) in poly.iter().enumerate() {
            let max_power = if kind == 'L' { 1 } else { d as usize };
            for m in 0..=max_power.min(d as usize - k) {
                for (&deg, &c) in coef {
                    *next[k + m].entry(deg + m as u32 * line).or_default() += c;
                }
            }
        }
        poly = next;
    }
    graded_of(&poly[d as usize])
}

fn power(kind: char, d: u32) -> FunctorExpr {
    match kind {
        'S' => FunctorExpr::sym(&[d]),
        'L' => FunctorExpr::ext(&[d]),
        _ => FunctorExpr::div(&[d]),
    }
}

fn exponential_suite() -> Result<String, String> {
    let p = 2;
    let mut checks = 0;
    let spaces = [GradedSpace::ungraded(3), e_space(2, 1), e_space(3, 1), GradedSpace::new([(0, 1), (1, 2), (3, 1)])];
    for kind in ['S', 'L', 'G'] {
        for d in 1..=6u32 {
            let x = power(kind, d);
            let dim = |e: &FunctorExpr, n: usize| -> Result<usize, String> {
                Ok(ck(Realization::new(e, n, p), format!("{e} at k^{n}"))?.dim())
            };
            // X^d(k^(a+b)) = sum_i X^i(k^a) (x) X^(d-i)(k^b)
            for (a, b) in [(1usize, 1usize), (1, 2), (2, 2)] {
                let whole = dim(&x, a + b)?;
                let mut split = 0;
                for i in 0..=d {
                    let left = if i == 0 { 1 } else { dim(&power(kind, i), a)? };
                    let right = if i == d { 1 } else { dim(&power(kind, d - i), b)? };
                    split += left * right;
                }
                ensure(whole == split, || format!("{kind}^{d}(k^{}) = {whole}, split {split}", a + b))?;
                checks += 1;
            }
            // graded evaluation against the generating function and the labelled realization
            for w in &spaces {
                let want = series_coefficient(kind, d, w);
                let got = ck(graded_eval_dims(&x, w, p), format!("{x} on {w}"))?;
                ensure(got == want, || format!("{x} on {w}: {got} vs series {want}"))?;
                let r = ck(Realization::new(&FunctorExpr::precompose(w.clone(), x.clone()), 1, p), format!("{x} on {w}"))?;
                let mut hist = GradedSpace::default();
                for &t in r.grading().unwrap_or(&[]) {
                    hist.add(t, 1);
                }
                ensure(hist == want, || format!("{x} on {w}: realization {hist} vs series {want}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} identities"))
}

fn tensor_endomorphism_suite() -> Result<String, String> {
    for p in [2u32, 3] {
        for d in 1..=4u32 {
            let t = ck(Realization::new(&FunctorExpr::Tensor(d), d as usize, p), "T^d")?;
            let dim = ck(hom_space(&t, &t), "End(T^d)")?.dim();
            let fact: usize = (1..=d as usize).product();
            ensure(dim == fact, || format!("dim End(T^{d}) = {dim} at p={p}, expected {fact}"))?;
        }
    }
    Ok("dim End(T^d) = d! for d <= 4, p = 2, 3".into())
}

fn twisted_hom_suite() -> Result<String, String> {
    let mut checks = 0;
    // Hom(F, G) = Hom(F^(1), G^(1))
    for (p, max) in [(2u32, 2u32), (3, 1)] {
        let cat = catalog(max);
        for f in &cat {
            for g in cat.iter().filter(|g| g.degree(p) == f.degree(p)) {
                let (a, b) = ck(fr_hom_iso_check(f, g, 1, p), format!("({f}, {g})"))?;
                ensure(a == b, || format!("Hom({f}, {g}) = {a} but twisted {b} at p={p}"))?;
                checks += 1;
            }
        }
    }
    // Hom(F^(1), S^mu) is Hom(F, S^(mu/p)) when p divides mu, else zero
    for (p, max) in [(2u32, 2u32), (3, 1)] {
        for f in catalog(max) {
            let d = f.degree(p);
            let tw = FunctorExpr::twist(1, f.clone());
            for len in 1..=2 {
                for mu in positive_compositions(p * d, len) {
                    let got = ck(hom_dim(&tw, &FunctorExpr::Sym(mu.clone()), p), format!("({tw}, S{mu})"))?;
                    let want = match mu.div(p) {
                        Some(m) => ck(hom_dim(&f, &FunctorExpr::Sym(m), p), format!("({f}, S{mu}/p)"))?,
                        None => 0,
                    };
                    ensure(got == want, || format!("Hom({tw}, S{mu}) = {got}, expected {want} at p={p}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} Hom comparisons"))
}

fn adjunction_suite() -> Result<String, String> {
    let mut checks = 0;
    for p in [2u32, 3] {
        let spaces = [GradedSpace::ungraded(1), e_space(p, 1), GradedSpace::new([(0, 1), (2, 2)])];
        let cat = catalog(2);
        for f in &cat {
            for g in cat.iter().filter(|g| g.degree(p) == f.degree(p)) {
                for w in &spaces {
                    match adjunction_check(f, g, w, p) {
                        Ok((a, b)) => ensure(a == b, || format!("({f}, {g}) on W={w}, p={p}: {:?} vs {:?}", a.dims, b.dims))?,
                        Err(Error::Unsupported(_)) => continue,
                        Err(e) => return Err(format!("({f}, {g}) on W={w}, p={p}: {e}")),
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} table pairs"))
}

fn stability_suite() -> Result<String, String> {
    let mut jobs: Vec<(u32, u32, FunctorExpr, FunctorExpr)> = Vec::new();
    for r in [0u32, 1] {
        let cat = catalog(2);
        for f in &cat {
            for g in cat.iter().filter(|g| g.degree(2) == f.degree(2)) {
                jobs.push((2, r, f.clone(), g.clone()));
            }
        }
        jobs.push((3, r, FunctorExpr::id(), FunctorExpr::id()));
    }
    let results = par_map(&jobs, |(p, r, f, g)| match twist_stability_check(f, g, *r, 0, *p) {
        Ok(rep) => {
            ensure(rep.stable, || format!("({f}, {g}), r={r}, p={p}: {:?} vs {:?} below {}", rep.lower, rep.upper, rep.bound))?;
            Ok(1)
        }
        Err(Error::Unsupported(_)) => Ok(0),
        Err(e) => Err(format!("({f}, {g}), r={r}, p={p}: {e}")),
    });
    Ok(format!("{} pairs stable", first_error(results)?))
}
