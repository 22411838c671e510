//! Compositions, graded spaces, exponential-formula indexing and counting mod p.

use std::collections::BTreeMap;
use std::fmt;

/// A finite sequence of nonnegative integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(pub Vec<u32>);

impl Composition {
    pub fn new(parts: impl Into<Vec<u32>>) -> Self {
        Composition(parts.into())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn scale(&self, m: u32) -> Composition {
        Composition(self.0.iter().map(|&x| x * m).collect())
    }

    /// True iff `d` divides every part.
    pub fn divides(&self, d: u32) -> bool {
        self.0.iter().all(|&x| x % d == 0)
    }

    /// Divide every part by `d` if possible.
    pub fn div(&self, d: u32) -> Option<Composition> {
        self.divides(d).then(|| Composition(self.0.iter().map(|&x| x / d).collect()))
    }

    /// The composition with zero parts removed.
    pub fn nonzero(&self) -> Composition {
        Composition(self.0.iter().copied().filter(|&x| x > 0).collect())
    }
}

impl From<Vec<u32>> for Composition {
    fn from(v: Vec<u32>) -> Self {
        Composition(v)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All n-tuples of nonnegative integers of weight d, in lexicographic order.
pub fn compositions(d: u32, n: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        let n = cur.len();
        if i + 1 == n {
            cur[i] = left;
            out.push(Composition(cur.clone()));
            return;
        }
        for x in 0..=left {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
    }
    if n == 0 {
        if d == 0 {
            out.push(Composition(Vec::new()));
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Finite-dimensional graded vector space: degree -> dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedSpace {
    dims: BTreeMap<u32, usize>,
}

impl GradedSpace {
    pub fn new(dims: impl IntoIterator<Item = (u32, usize)>) -> Self {
        let mut g = GradedSpace::default();
        for (d, n) in dims {
            g.add(d, n);
        }
        g
    }

    /// The ungraded space k^n, concentrated in degree 0.
    pub fn ungraded(n: usize) -> Self {
        GradedSpace::new([(0, n)])
    }

    pub fn add(&mut self, degree: u32, n: usize) {
        if n > 0 {
            *self.dims.entry(degree).or_insert(0) += n;
        }
    }

    pub fn dims(&self) -> &BTreeMap<u32, usize> {
        &self.dims
    }

    pub fn dim_in(&self, degree: u32) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Degrees of a homogeneous basis, one entry per basis line, ascending.
    pub fn lines(&self) -> Vec<u32> {
        self.dims.iter().flat_map(|(&d, &n)| std::iter::repeat(d).take(n)).collect()
    }

    /// Frobenius twist: multiply every degree by p^r.
    pub fn twist(&self, p: u32, r: u32) -> GradedSpace {
        let q = p.pow(r);
        GradedSpace::new(self.dims.iter().map(|(&d, &n)| (d * q, n)))
    }

    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let mut g = GradedSpace::default();
        for (&a, &x) in &self.dims {
            for (&b, &y) in &other.dims {
                g.add(a + b, x * y);
            }
        }
        g
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> GradedSpace {
        let mut g = self.clone();
        for (&d, &n) in &other.dims {
            g.add(d, n);
        }
        g
    }

    pub fn is_concentrated_in_zero(&self) -> bool {
        self.dims.keys().all(|&d| d == 0)
    }
}

impl fmt::Display for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, n)) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}:{n}")?;
        }
        write!(f, "}}")
    }
}

/// One line in each degree 0..p^r-1.
pub fn sha(p: u32, r: u32) -> GradedSpace {
    GradedSpace::new((0..p.pow(r)).map(|i| (i, 1)))
}

/// One line in each even degree 0,2,...,2(p^r-1).
pub fn e_space(p: u32, r: u32) -> GradedSpace {
    GradedSpace::new((0..p.pow(r)).map(|i| (2 * i, 1)))
}

/// Exterior, symmetric or divided powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerKind {
    Sym,
    Ext,
    Div,
}

/// Summands of X^d(W (x) V) = sum over mu of X^mu(V), one part per basis line of W
/// (lines in ascending degree). Each summand carries degree sum deg_i mu_i.
/// Summands are listed by ascending degree, lexicographically within a degree.
pub fn exp_decompose(_kind: PowerKind, d: u32, w: &GradedSpace) -> Vec<(Composition, u32)> {
    let lines = w.lines();
    let mut out: Vec<(Composition, u32)> = compositions(d, lines.len())
        .into_iter()
        .map(|mu| {
            let deg = mu.0.iter().zip(&lines).map(|(&m, &l)| m * l).sum();
            (mu, deg)
        })
        .collect();
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    out
}

/// Binomial coefficient C(n, k) reduced mod p, via Lucas' theorem.
pub fn binom_mod(n: u64, k: u64, p: u32) -> u8 {
    if k > n {
        return 0;
    }
    let p64 = p as u64;
    let (mut n, mut k) = (n, k);
    let mut acc: u64 = 1;
    while n > 0 || k > 0 {
        let (a, b) = (n % p64, k % p64);
        if b > a {
            return 0;
        }
        acc = acc * small_binom_mod(a, b, p64) % p64;
        n /= p64;
        k /= p64;
    }
    acc as u8
}

fn small_binom_mod(a: u64, b: u64, p: u64) -> u64 {
    // a < p, so every factor below is invertible mod p.
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Multinomial coefficient (sum parts)! / prod(parts!) mod p.
pub fn multinomial_mod(parts: impl IntoIterator<Item = u32>, p: u32) -> u8 {
    let mut total: u64 = 0;
    let mut acc: u32 = 1;
    for x in parts {
        if x == 0 {
            continue;
        }
        total += x as u64;
        acc = acc * binom_mod(total, x as u64, p) as u32 % p;
        if acc == 0 {
            return 0;
        }
    }
    acc as u8
}

/// Exact binomial coefficient as u128 (for dimension formulas).
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All nonnegative integer matrices (row-major) with the given row and column sums,
/// entries bounded by `max_entry`. Enumeration order is deterministic.
pub fn tables(row_sums: &[u32], col_sums: &[u32], max_entry: u32) -> Vec<Vec<u32>> {
    let r = row_sums.len();
    let c = col_sums.len();
    let total_r: u32 = row_sums.iter().sum();
    let total_c: u32 = col_sums.iter().sum();
    let mut out = Vec::new();
    if total_r != total_c {
        return out;
    }
    if r == 0 || c == 0 {
        if total_r == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; r * c];
    let mut col_left = col_sums.to_vec();
    fill_row(0, row_sums, &mut col_left, &mut cur, max_entry, &mut out, c);
    out
}

fn fill_row(i: usize, rows: &[u32], col_left: &mut [u32], cur: &mut [u32], max: u32, out: &mut Vec<Vec<u32>>, c: usize) {
    if i == rows.len() {
        if col_left.iter().all(|&x| x == 0) {
            out.push(cur.to_vec());
        }
        return;
    }
    // Remaining row capacity must be able to absorb what is left in the columns.
    let rest: u32 = rows[i..].iter().sum();
    if col_left.iter().sum::<u32>() != rest {
        return;
    }
    fill_cell(i, 0, rows[i], rows, col_left, cur, max, out, c);
}

#[allow(clippy::too_many_arguments)]
fn fill_cell(i: usize, j: usize, left: u32, rows: &[u32], col_left: &mut [u32], cur: &mut [u32], max: u32, out: &mut Vec<Vec<u32>>, c: usize) {
    if j + 1 == c {
        if left > col_left[j] || left > max {
            return;
        }
        cur[i * c + j] = left;
        col_left[j] -= left;
        fill_row(i + 1, rows, col_left, cur, max, out, c);
        col_left[j] += left;
        cur[i * c + j] = 0;
        return;
    }
    let cap_rest: u32 = col_left[j + 1..].iter().map(|&x| x.min(max)).sum();
    let lo = left.saturating_sub(cap_rest);
    let hi = left.min(col_left[j]).min(max);
    for x in lo..=hi {
        cur[i * c + j] = x;
        col_left[j] -= x;
        fill_cell(i, j + 1, left - x, rows, col_left, cur, max, out, c);
        col_left[j] += x;
    }
    cur[i * c + j] = 0;
}

/// All distinct orderings of a multiset given as counts per symbol, lexicographic.
pub fn multiset_permutations(counts: &[u32]) -> Vec<Vec<u8>> {
    let total: u32 = counts.iter().sum();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(total as usize);
    let mut left = counts.to_vec();
    fn rec(left: &mut [u32], cur: &mut Vec<u8>, total: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == total {
            out.push(cur.clone());
            return;
        }
        for s in 0..left.len() {
            if left[s] > 0 {
                left[s] -= 1;
                cur.push(s as u8);
                rec(left, cur, total, out);
                cur.pop();
                left[s] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, total as usize, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_examples() {
        assert_eq!(compositions(0, 2), vec![Composition::new(vec![0, 0])]);
        assert_eq!(
            compositions(2, 2),
            vec![Composition::new(vec![0, 2]), Composition::new(vec![1, 1]), Composition::new(vec![2, 0])]
        );
        assert_eq!(compositions(6, 2).len(), 7);
        for d in 0..6u32 {
            for n in 1..5usize {
                assert_eq!(compositions(d, n).len() as u128, binom((d as u64) + n as u64 - 1, n as u64 - 1));
            }
        }
    }

    #[test]
    fn graded_examples() {
        assert_eq!(sha(2, 1), GradedSpace::new([(0, 1), (1, 1)]));
        assert_eq!(e_space(2, 1), GradedSpace::new([(0, 1), (2, 1)]));
        assert_eq!(sha(3, 0), GradedSpace::ungraded(1));
        assert_eq!(e_space(5, 0), GradedSpace::ungraded(1));
        assert_eq!(sha(3, 2).total_dim(), 9);
    }

    #[test]
    fn exp_decompose_examples() {
        let got = exp_decompose(PowerKind::Sym, 3, &sha(2, 1));
        let want: Vec<(Composition, u32)> = vec![
            (Composition::new(vec![3, 0]), 0),
            (Composition::new(vec![2, 1]), 1),
            (Composition::new(vec![1, 2]), 2),
            (Composition::new(vec![0, 3]), 3),
        ];
        assert_eq!(got, want);
        assert_eq!(exp_decompose(PowerKind::Ext, 0, &sha(2, 1)), vec![(Composition::new(vec![0, 0]), 0)]);
        assert_eq!(
            exp_decompose(PowerKind::Sym, 1, &e_space(2, 1)),
            vec![(Composition::new(vec![1, 0]), 0), (Composition::new(vec![0, 1]), 2)]
        );
    }

    #[test]
    fn lucas() {
        for p in [2u32, 3, 5, 7] {
            for n in 0..40u64 {
                for k in 0..=n {
                    assert_eq!(binom_mod(n, k, p) as u128, binom(n, k) % p as u128, "C({n},{k}) mod {p}");
                }
            }
        }
        assert_eq!(multinomial_mod([1, 1], 2), 0);
        assert_eq!(multinomial_mod([2, 1], 3), 0);
        assert_eq!(multinomial_mod([2, 1], 2), 1);
    }

    #[test]
    fn table_counts() {
        // 2x2 tables with margins (2,1),(1,2): entries (a, 2-a; 1-a, a) with a in {0,1}.
        assert_eq!(tables(&[2, 1], &[1, 2], u32::MAX).len(), 2);
        assert_eq!(tables(&[1, 1], &[1, 1], 1).len(), 2);
        assert_eq!(tables(&[], &[], 5), vec![Vec::<u32>::new()]);
        assert_eq!(multiset_permutations(&[2, 1]).len(), 3);
    }
}
