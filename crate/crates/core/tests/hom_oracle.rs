//! Intertwiner solver against a full-Schur-basis brute force and against
//! weight-space counts.

use polyext::catalog::catalog;
use polyext::combinat::compositions;
use polyext::expr::{parse, FunctorExpr};
use polyext::hom::{fr_hom_iso_check, hom_space, hom_space_bruteforce, hom_twist_vanishing};
use polyext::realize::Realization;

#[test]
fn incremental_matches_bruteforce() {
    for p in [2u32, 3] {
        let cat = catalog(3);
        for f in &cat {
            for g in &cat {
                let d = f.degree(p);
                if d != g.degree(p) {
                    continue;
                }
                for n in (d as usize).max(1)..=3 {
                    let fr = Realization::new(f, n, p).unwrap();
                    let gr = Realization::new(g, n, p).unwrap();
                    let fast = hom_space(&fr, &gr).unwrap();
                    let slow = hom_space_bruteforce(&fr, &gr).unwrap();
                    assert_eq!(fast.space, slow.space, "Hom({f}, {g}) at k^{n}, p={p}");
                }
            }
        }
    }
}

#[test]
fn weight_space_formula() {
    // dim Hom(Gamma^lambda, F) = dim F(k^n)_lambda, and dim Hom(F, S^mu) = dim F#(k^n)_mu.
    for p in [2u32, 3] {
        for f in catalog(3) {
            let d = f.degree(p);
            let n = d as usize;
            let fr = Realization::new(&f, n, p).unwrap();
            let dual = Realization::new(&FunctorExpr::dual(f.clone()), n, p).unwrap();
            for lam in compositions(d, n) {
                let gamma = Realization::new(&FunctorExpr::Div(lam.clone()), n, p).unwrap();
                let sym = Realization::new(&FunctorExpr::Sym(lam.clone()), n, p).unwrap();
                assert_eq!(hom_space(&gamma, &fr).unwrap().dim(), fr.weight_indices(&lam.0).len(), "Hom(G{lam}, {f})");
                assert_eq!(hom_space(&fr, &sym).unwrap().dim(), dual.weight_indices(&lam.0).len(), "Hom({f}, S{lam})");
            }
        }
    }
}

#[test]
fn tensor_power_endomorphisms_are_the_group_algebra() {
    for p in [2u32, 3] {
        for d in 1..=4u32 {
            let t = Realization::new(&FunctorExpr::Tensor(d), d as usize, p).unwrap();
            assert_eq!(hom_space(&t, &t).unwrap().dim() as u128, (1..=d as u128).product::<u128>(), "T[{d}] p={p}");
        }
    }
}

#[test]
fn frobenius_twist_hom_isomorphism() {
    let p = 2;
    for (f, g) in [("I", "I"), ("T[2]", "S[2]"), ("S[2]", "L[2]"), ("G[2]", "T[2]")] {
        let (a, b) = fr_hom_iso_check(&parse(f, p).unwrap(), &parse(g, p).unwrap(), 1, p).unwrap();
        assert_eq!(a, b, "Hom({f}, {g})");
    }
    let (a, b) = fr_hom_iso_check(&parse("I", 3).unwrap(), &parse("I", 3).unwrap(), 1, 3).unwrap();
    assert_eq!((a, b), (1, 1));
}

#[test]
fn twisted_hom_vanishes_off_divisible_weights() {
    for p in [2u32, 3] {
        let i1 = parse("tw(1, I)", p).unwrap();
        for mu in compositions(p, 2) {
            let divisible = mu.0.iter().all(|x| x % p == 0);
            assert_eq!(hom_twist_vanishing(&i1, &mu, p).unwrap(), !divisible, "mu={mu} p={p}");
        }
    }
}
