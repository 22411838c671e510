//! Graded dimension counting: evaluate a functor expression on a graded space.

use std::collections::BTreeMap;

use crate::combinat::{GradedSpace, PowerKind};
use crate::expr::FunctorExpr;
use crate::Error;

/// Graded dimensions of `expr(w)`, by monomial counting with torus-weight degrees.
pub fn graded_eval_dims(expr: &FunctorExpr, w: &GradedSpace, p: u32) -> Result<GradedSpace, Error> {
    use FunctorExpr as E;
    Ok(match expr {
        E::Sym(m) => power_product(PowerKind::Sym, m.parts(), w),
        E::Div(m) => power_product(PowerKind::Div, m.parts(), w),
        E::Ext(m) => power_product(PowerKind::Ext, m.parts(), w),
        E::Tensor(d) => (0..*d).fold(GradedSpace::ungraded(1), |acc, _| acc.tensor(w)),
        E::TensorProduct(cs) => {
            let mut acc = GradedSpace::ungraded(1);
            for c in cs {
                acc = acc.tensor(&graded_eval_dims(c, w, p)?);
            }
            acc
        }
        E::Twist(r, c) => graded_eval_dims(c, &w.twist(p, *r), p)?,
        E::Dual(c) => graded_eval_dims(c, w, p)?,
        E::Precompose(v, c) => graded_eval_dims(c, &v.tensor(w), p)?,
        E::Unit => GradedSpace::ungraded(1),
        E::Compose(o, i) => {
            let inner = graded_eval_dims(i, w, p)?;
            graded_eval_dims(o, &inner, p)?
        }
    })
}

fn power_product(kind: PowerKind, parts: &[u32], w: &GradedSpace) -> GradedSpace {
    parts.iter().fold(GradedSpace::ungraded(1), |acc, &m| acc.tensor(&power(kind, m, w)))
}

/// Graded dimensions of X^m(w) for X in {S, Lambda, Gamma}.
fn power(kind: PowerKind, m: u32, w: &GradedSpace) -> GradedSpace {
    // poly[k] = graded dims of the weight-k piece, built line by line.
    let m = m as usize;
    let mut poly: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); m + 1];
    poly[0].insert(0, 1);
    for deg in w.lines() {
        let mut next: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); m + 1];
        for (k, piece) in poly.iter().enumerate() {
            let max_c = match kind {
                PowerKind::Ext => 1.min(m - k),
                _ => m - k,
            };
            for c in 0..=max_c {
                for (&t, &n) in piece {
                    *next[k + c].entry(t + deg * c as u32).or_insert(0) += n;
                }
            }
        }
        poly = next;
    }
    GradedSpace::new(poly[m].iter().map(|(&t, &n)| (t, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{binom, e_space};
    use crate::expr::parse;

    #[test]
    fn ungraded_symmetric_powers() {
        for n in 1..5usize {
            for d in 0..5u32 {
                let g = graded_eval_dims(&FunctorExpr::sym(&[d]), &GradedSpace::ungraded(n), 2).unwrap();
                assert!(g.is_concentrated_in_zero());
                assert_eq!(g.total_dim() as u128, binom(n as u64 + d as u64 - 1, d as u64));
            }
        }
    }

    #[test]
    fn degree_seven_element() {
        // e1^e2 (x) e1 e1 e2 with deg e1 = 1, deg e2 = 2 lives in degree 1+2+1+1+2 = 7.
        let e = parse("L[2] * S[3]", 2).unwrap();
        let g = graded_eval_dims(&e, &GradedSpace::new([(1, 1), (2, 1)]), 2).unwrap();
        assert_eq!(g.dim_in(7), 1);
        assert_eq!(g.total_dim(), 4);
    }

    #[test]
    fn composite_matches_brute_force() {
        // S^2(S^2(w)) for w = E_1 at p = 2: S^2(w) has basis degrees 0, 2, 4.
        let inner = GradedSpace::new([(0, 1), (2, 1), (4, 1)]);
        let mut brute = GradedSpace::default();
        let lines = inner.lines();
        for i in 0..lines.len() {
            for j in i..lines.len() {
                brute.add(lines[i] + lines[j], 1);
            }
        }
        let e = parse("comp(S[2], S[2])", 2).unwrap();
        assert_eq!(graded_eval_dims(&e, &e_space(2, 1), 2).unwrap(), brute);
    }
}
