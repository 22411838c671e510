use polyext_linalg::{kernel, rref, ConstraintRefiner, IncrementalSolver, Matrix, SparseMatrix, Subspace};
use proptest::prelude::*;

fn matrix(p: u8, max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (0..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..p, r * c).prop_map(move |d| Matrix::from_data(p, r, c, d).unwrap())
    })
}

fn any_p() -> impl Strategy<Value = u8> {
    prop_oneof![Just(2u8), Just(3u8), Just(5u8)]
}

fn matrix_any_p() -> impl Strategy<Value = Matrix> {
    any_p().prop_flat_map(|p| matrix(p, 8, 9))
}

fn shaped(p: u8, r: usize, c: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(0..p, r * c).prop_map(move |d| Matrix::from_data(p, r, c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rref_is_idempotent(m in matrix_any_p()) {
        let e = rref(&m);
        let e2 = rref(&e.matrix);
        prop_assert_eq!(&e2.matrix, &e.matrix);
        prop_assert_eq!(e2.rank, e.rank);
        prop_assert_eq!(&e2.pivots, &e.pivots);
    }

    #[test]
    fn rref_preserves_row_space(m in matrix_any_p()) {
        let e = rref(&m);
        prop_assert_eq!(Subspace::span(&m), Subspace::span(&e.matrix));
        for i in e.rank..e.matrix.rows() {
            prop_assert!(e.matrix.row(i).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rank_nullity(m in matrix_any_p()) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
    }

    #[test]
    fn kernel_is_sound(m in matrix_any_p()) {
        let k = kernel(&m);
        for v in k.basis_vectors() {
            prop_assert!(m.mul_vec(&v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn kronecker_mixed_product(
        (a, b, c, d) in any_p().prop_flat_map(|p| (1usize..4, 1usize..4, 1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(move |(r1, k1, c1, r2, k2, c2)| (shaped(p, r1, k1), shaped(p, r2, k2), shaped(p, k1, c1), shaped(p, k2, c2))))
    ) {
        let lhs = &a.kronecker(&b) * &c.kronecker(&d);
        let rhs = (&a * &c).kronecker(&(&b * &d));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn intersection_dimension_formula(
        (a, b) in any_p().prop_flat_map(|p| (1usize..7).prop_flat_map(move |n| (matrix_cols(p, n), matrix_cols(p, n))))
    ) {
        let sa = Subspace::span(&a);
        let sb = Subspace::span(&b);
        let i = sa.intersect(&sb).unwrap();
        let s = sa.sum(&sb).unwrap();
        prop_assert_eq!(sa.dim() + sb.dim(), i.dim() + s.dim());
        prop_assert!(sa.contains_subspace(&i) && sb.contains_subspace(&i));
        prop_assert!(s.contains_subspace(&sa) && s.contains_subspace(&sb));
    }

    #[test]
    fn incremental_solver_agrees_with_kernel(m in matrix_any_p()) {
        let mut s = IncrementalSolver::new(m.p(), m.cols());
        for i in 0..m.rows() {
            let row: Vec<(usize, u8)> = m.row(i).iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, x)).collect();
            s.add_sparse(&row);
        }
        prop_assert_eq!(s.rank(), m.rank());
        prop_assert_eq!(s.kernel(), kernel(&m));
    }

    #[test]
    fn refiner_agrees_with_kernel(m in matrix_any_p(), patience in 1usize..4) {
        let cs: Vec<Vec<(usize, u8)>> = (0..m.rows())
            .map(|i| m.row(i).iter().enumerate().map(|(j, &x)| (j, x)).collect())
            .collect();
        let (s, _) = ConstraintRefiner::refine_stream(&Subspace::full(m.p(), m.cols()), &cs, patience);
        prop_assert_eq!(s, kernel(&m));
    }

    #[test]
    fn sparse_matches_dense(
        (a, b) in any_p().prop_flat_map(|p| (1usize..6, 1usize..6, 1usize..6).prop_flat_map(move |(r, k, c)| (shaped(p, r, k), shaped(p, k, c))))
    ) {
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        prop_assert_eq!(sa.mul(&sb).to_dense(), &a * &b);
        prop_assert_eq!(sa.rank(), a.rank());
    }

    #[test]
    fn coordinates_reconstruct(m in matrix_any_p(), coeffs in proptest::collection::vec(0u8..5, 8)) {
        let s = Subspace::span(&m);
        let p = m.p();
        let mut v = vec![0u8; m.cols()];
        for i in 0..s.dim() {
            let c = coeffs[i] % p;
            for (x, &b) in v.iter_mut().zip(s.basis().row(i)) {
                *x = ((*x as u16 + c as u16 * b as u16) % p as u16) as u8;
            }
        }
        let got = s.coordinates(&v).unwrap();
        let want: Vec<u8> = (0..s.dim()).map(|i| coeffs[i] % p).collect();
        prop_assert_eq!(got, want);
    }
}

fn matrix_cols(p: u8, n: usize) -> impl Strategy<Value = Matrix> {
    (0usize..=n).prop_flat_map(move |r| shaped(p, r, n))
}

#[test]
fn rref_examples() {
    let e = rref(&Matrix::from_rows(2, 2, &[vec![1, 1], vec![1, 1]]));
    assert_eq!(e.rank, 1);
    assert_eq!(e.matrix, Matrix::from_rows(2, 2, &[vec![1, 1], vec![0, 0]]));
    // Exhaustive row-space oracle over F_2^2: the row space of [[1,1],[1,1]] is {00, 11}.
    let s = Subspace::span(&e.matrix);
    let members: Vec<[u8; 2]> = [[0, 0], [0, 1], [1, 0], [1, 1]].into_iter().filter(|v| s.contains(v)).collect();
    assert_eq!(members, vec![[0, 0], [1, 1]]);
}

#[test]
fn intersection_example_enumerated() {
    let a = Subspace::span_vectors(2, 2, &[vec![1, 0], vec![0, 1]]);
    let b = Subspace::span_vectors(2, 2, &[vec![1, 1]]);
    let i = a.intersect(&b).unwrap();
    let members: Vec<[u8; 2]> = [[0, 0], [0, 1], [1, 0], [1, 1]].into_iter().filter(|v| i.contains(v)).collect();
    assert_eq!(members, vec![[0, 0], [1, 1]]);
}

#[test]
fn kronecker_with_unit() {
    let a = Matrix::from_i64(3, 2, 3, &[1, 2, 0, 2, 1, 1]);
    assert_eq!(a.kronecker(&Matrix::identity(3, 1)), a);
}
