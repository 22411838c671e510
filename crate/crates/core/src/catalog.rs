//! The small catalog of functors used by sweeps and checks: S, L, G, T and
//! their products with I, up to a given degree.

use crate::expr::FunctorExpr;

/// Catalog functors of exactly degree d (d <= 3 is the intended range).
pub fn catalog_of_degree(d: u32) -> Vec<FunctorExpr> {
    use FunctorExpr as E;
    match d {
        0 => vec![E::Unit],
        1 => vec![E::id()],
        _ => {
            let mut out = vec![E::sym(&[d]), E::ext(&[d]), E::div(&[d])];
            if d >= 3 {
                for base in [E::sym(&[d - 1]), E::ext(&[d - 1]), E::div(&[d - 1])] {
                    out.push(E::tensor(vec![base, E::id()]));
                }
            }
            out.push(E::Tensor(d));
            out
        }
    }
}

/// All catalog functors of degree 1..=max_degree.
pub fn catalog(max_degree: u32) -> Vec<FunctorExpr> {
    (1..=max_degree).flat_map(catalog_of_degree).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(catalog_of_degree(1).len(), 1);
        assert_eq!(catalog_of_degree(2).len(), 4);
        assert_eq!(catalog_of_degree(3).len(), 7);
        assert!(catalog(3).iter().all(|f| f.degree(2) <= 3));
    }
}
