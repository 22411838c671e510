//! Printing and parsing functor expressions.

use polyext::combinat::GradedSpace;
use polyext::expr::{parse, FunctorExpr};
use proptest::prelude::*;

fn space() -> impl Strategy<Value = GradedSpace> {
    prop::collection::btree_map(0u32..6, 1usize..3, 1..4).prop_map(GradedSpace::new)
}

fn parts() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..4, 1..4)
}

fn expr() -> impl Strategy<Value = FunctorExpr> {
    let leaf = prop_oneof![
        parts().prop_map(|v| FunctorExpr::sym(&v)),
        parts().prop_map(|v| FunctorExpr::ext(&v)),
        parts().prop_map(|v| FunctorExpr::div(&v)),
        (2u32..5).prop_map(FunctorExpr::Tensor),
        Just(FunctorExpr::Unit),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (1u32..3, inner.clone()).prop_map(|(r, e)| FunctorExpr::twist(r, e)),
            inner.clone().prop_map(FunctorExpr::dual),
            (space(), inner.clone()).prop_map(|(w, e)| FunctorExpr::precompose(w, e)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(FunctorExpr::tensor),
            (inner.clone(), inner).prop_map(|(o, i)| FunctorExpr::compose(o, i)),
        ]
    })
}

/// Surround every punctuation character with spaces.
fn spaced(s: &str) -> String {
    s.chars().flat_map(|c| if c.is_ascii_punctuation() { vec![' ', c, ' '] } else { vec![c] }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printing_reparses_to_the_same_expression(e in expr(), p in prop::sample::select(vec![2u32, 3])) {
        let printed = e.to_string();
        let back = parse(&printed, p).unwrap();
        prop_assert_eq!(back.to_string(), printed.clone());
        prop_assert_eq!(parse(&spaced(&printed), p).unwrap().to_string(), printed);
    }
}
