use polyext::expr::parse;
use polyext::realize::Realization;
use polyext::schur::{schur_basis, schur_product, IMat};
use polyext::linalg::SparseMatrix;

/// act(a) act(b) must equal the Schur-algebra product expanded in the standard basis.
fn check_rep(text: &str, n: usize, p: u32) {
    let e = parse(text, p).unwrap();
    let r = Realization::new(&e, n, p).unwrap();
    let d = e.degree(p);
    let basis = schur_basis(n, d);
    for a in &basis {
        for b in &basis {
            let lhs = r.act(a).mul(&r.act(b));
            let mut rhs = SparseMatrix::zeros(p as u8, r.dim(), r.dim());
            for (c, k) in schur_product(a, b, p) {
                rhs = rhs.add(&r.act(&c).scale(k));
            }
            assert_eq!(lhs.to_dense(), rhs.to_dense(), "{text} at k^{n}: a={a:?} b={b:?}");
        }
    }
    // The diagonal idempotents sum to the identity.
    let mut sum = SparseMatrix::zeros(p as u8, r.dim(), r.dim());
    for w in r.weight_blocks().keys() {
        sum = sum.add(&r.act(&IMat::diagonal(w)));
    }
    assert_eq!(sum.to_dense(), SparseMatrix::identity(p as u8, r.dim()).to_dense(), "{text}");
}

#[test]
fn representations_small_degree() {
    for p in [2u32, 3] {
        for t in ["S[2]", "G[2]", "L[2]", "T[2]", "S[1,1]", "L[1,1]", "S[1] * L[1]", "dual(S[2])", "tw(1, S[1])"] {
            check_rep(t, 2, p);
        }
    }
}

#[test]
fn representations_degree_three() {
    for p in [2u32, 3] {
        for t in ["S[3]", "G[3]", "L[3]", "T[3]", "S[2] * L[1]", "G[2,1]", "L[2,1]", "dual(G[2] * S[1])"] {
            check_rep(t, 2, p);
        }
    }
    check_rep("L[3]", 3, 2);
    check_rep("G[2] * S[1]", 3, 3);
}

#[test]
fn representations_twisted_and_graded() {
    check_rep("tw(1, S[2])", 2, 2);
    check_rep("tw(1, L[2])", 2, 2);
    check_rep("pre(E1, S[2])", 2, 2);
    check_rep("pre(E1, L[2])", 2, 2);
    check_rep("pre(Sha1, G[2])", 2, 2);
    check_rep("pre({0:1,3:2}, S[1] * L[1])", 2, 3);
}
