//! Catalog specifications for sweeps: `deg<=D` optionally followed by `:KINDS`, a
//! comma-separated subset of `S`, `L`, `G` (single powers), `T` (tensor powers)
//! and `x` (tensor products of powers with at least two factors). The identity is
//! always included; a product of identities is written as a tensor power.
//! `deg<=3` generates S3, L3, G3, S2*I, L2*I, G2*I, T3 and the lower degrees.

use polyext::expr::FunctorExpr;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogSpec {
    pub max_degree: u32,
    pub powers: Vec<char>,
    pub tensor_powers: bool,
    pub products: bool,
}

impl CatalogSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("catalog spec {text:?}: expected deg<=D[:S,L,G,T,x]"));
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = t.strip_prefix("deg<=").ok_or_else(bad)?;
        let (deg, kinds) = match rest.split_once(':') {
            Some((d, k)) => (d, Some(k)),
            None => (rest, None),
        };
        let max_degree: u32 = deg.parse().map_err(|_| bad())?;
        let kinds: Vec<char> = match kinds {
            None => vec!['S', 'L', 'G', 'T', 'x'],
            Some(k) => k
                .split(',')
                .map(|s| match s {
                    "S" | "L" | "G" | "T" | "x" => Ok(s.chars().next().unwrap()),
                    _ => Err(bad()),
                })
                .collect::<Result<_, _>>()?,
        };
        Ok(CatalogSpec {
            max_degree,
            powers: ['S', 'L', 'G'].into_iter().filter(|c| kinds.contains(c)).collect(),
            tensor_powers: kinds.contains(&'T'),
            products: kinds.contains(&'x'),
        })
    }

    fn power(&self, kind: char, a: u32) -> FunctorExpr {
        match (kind, a) {
            (_, 1) => FunctorExpr::id(),
            ('S', _) => FunctorExpr::sym(&[a]),
            ('L', _) => FunctorExpr::ext(&[a]),
            _ => FunctorExpr::div(&[a]),
        }
    }

    /// Functors of exactly degree d, in a fixed order.
    pub fn of_degree(&self, d: u32) -> Vec<FunctorExpr> {
        if d == 1 {
            return vec![FunctorExpr::id()];
        }
        let mut out: Vec<FunctorExpr> = self.powers.iter().map(|&k| self.power(k, d)).collect();
        if self.products {
            for parts in partitions(d).into_iter().filter(|p| p.len() >= 2 && p[0] >= 2) {
                for factors in self.factor_choices(&parts) {
                    out.push(FunctorExpr::tensor(factors));
                }
            }
        }
        if self.tensor_powers {
            out.push(FunctorExpr::Tensor(d));
        }
        out
    }

    /// All ways of choosing a power kind for each part, nondecreasing in kind
    /// within runs of equal parts so each multiset of factors appears once.
    fn factor_choices(&self, parts: &[u32]) -> Vec<Vec<FunctorExpr>> {
        let mut out = Vec::new();
        let mut pick = vec![0usize; parts.len()];
        fn go(spec: &CatalogSpec, parts: &[u32], i: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<FunctorExpr>>) {
            if i == parts.len() {
                out.push(parts.iter().zip(pick.iter()).map(|(&a, &k)| spec.power(spec.powers.get(k).copied().unwrap_or('S'), a)).collect());
                return;
            }
            if parts[i] == 1 {
                pick[i] = 0;
                return go(spec, parts, i + 1, pick, out);
            }
            let start = if i > 0 && parts[i - 1] == parts[i] { pick[i - 1] } else { 0 };
            for k in start..spec.powers.len() {
                pick[i] = k;
                go(spec, parts, i + 1, pick, out);
            }
        }
        go(self, parts, 0, &mut pick, &mut out);
        out
    }

    pub fn functors(&self) -> Vec<FunctorExpr> {
        (1..=self.max_degree).flat_map(|d| self.of_degree(d)).collect()
    }

    /// All ordered pairs of functors of equal degree.
    pub fn pairs(&self) -> Vec<(FunctorExpr, FunctorExpr)> {
        (1..=self.max_degree)
            .flat_map(|d| {
                let fs = self.of_degree(d);
                fs.iter().flat_map(|f| fs.iter().map(move |g| (f.clone(), g.clone()))).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// Partitions of d as nonincreasing part lists, in reverse lexicographic order.
fn partitions(d: u32) -> Vec<Vec<u32>> {
    fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for a in (1..=left.min(max)).rev() {
            cur.push(a);
            go(left - a, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyext::catalog::catalog;

    #[test]
    fn default_spec_is_the_catalog() {
        assert_eq!(CatalogSpec::parse("deg<=3").unwrap().functors(), catalog(3));
        assert_eq!(CatalogSpec::parse(" deg <= 2 ").unwrap().functors(), catalog(2));
    }

    #[test]
    fn kinds_filter_and_degree_four() {
        let s = CatalogSpec::parse("deg<=2:S,T").unwrap();
        assert_eq!(s.functors(), vec![FunctorExpr::id(), FunctorExpr::sym(&[2]), FunctorExpr::Tensor(2)]);
        let four = CatalogSpec::parse("deg<=4:S,L,x").unwrap().of_degree(4);
        let names: Vec<String> = four.iter().map(|f| f.to_string()).collect();
        // S4, L4; S3*I, L3*I; S2*S2, S2*L2, L2*L2; S2*I*I, L2*I*I
        assert_eq!(names.len(), 9, "{names:?}");
        assert_eq!(partitions(4), vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn bad_specs_are_rejected() {
        for s in ["deg3", "deg<=x", "deg<=3:Q", "deg<=3:"] {
            assert!(CatalogSpec::parse(s).is_err(), "{s}");
        }
    }
}
