//! Functor expressions and their textual grammar.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := factor ('*' factor)*
//! factor := 'S[' ints ']' | 'L[' ints ']' | 'G[' ints ']' | 'T[' int ']'
//!         | 'I' | 'k' | 'tw(' int ',' expr ')' | 'dual(' expr ')'
//!         | 'pre(' space ',' expr ')' | 'comp(' expr ',' expr ')' | '(' expr ')'
//! space  := 'E' int | 'Sha' int | 'k^' int | '{' int ':' int (',' int ':' int)* '}'
//! ```
//!
//! `I` abbreviates `S[1]`, `k` is the constant functor of degree 0, and
//! `comp(f, g)` is the composite f o g (supported by graded dimension counting only).

use std::fmt;

use crate::combinat::{e_space, sha, Composition, GradedSpace};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctorExpr {
    Sym(Composition),
    Ext(Composition),
    Div(Composition),
    /// The d-th tensor power.
    Tensor(u32),
    TensorProduct(Vec<FunctorExpr>),
    Twist(u32, Box<FunctorExpr>),
    Dual(Box<FunctorExpr>),
    /// `child(W (x) I)`.
    Precompose(GradedSpace, Box<FunctorExpr>),
    /// The constant functor k in degree 0.
    Unit,
    /// `outer o inner`.
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
}

use FunctorExpr as E;

impl FunctorExpr {
    pub fn sym(parts: &[u32]) -> Self {
        E::Sym(Composition::new(parts.to_vec()))
    }

    pub fn ext(parts: &[u32]) -> Self {
        E::Ext(Composition::new(parts.to_vec()))
    }

    pub fn div(parts: &[u32]) -> Self {
        E::Div(Composition::new(parts.to_vec()))
    }

    /// The identity functor I = S^1.
    pub fn id() -> Self {
        Self::sym(&[1])
    }

    pub fn twist(r: u32, e: FunctorExpr) -> Self {
        E::Twist(r, Box::new(e))
    }

    pub fn dual(e: FunctorExpr) -> Self {
        E::Dual(Box::new(e))
    }

    pub fn precompose(w: GradedSpace, e: FunctorExpr) -> Self {
        E::Precompose(w, Box::new(e))
    }

    pub fn tensor(children: Vec<FunctorExpr>) -> Self {
        E::TensorProduct(children)
    }

    pub fn compose(outer: FunctorExpr, inner: FunctorExpr) -> Self {
        E::Compose(Box::new(outer), Box::new(inner))
    }

    /// Polynomial degree.
    pub fn degree(&self, p: u32) -> u32 {
        match self {
            E::Sym(m) | E::Ext(m) | E::Div(m) => m.weight(),
            E::Tensor(d) => *d,
            E::TensorProduct(cs) => cs.iter().map(|c| c.degree(p)).sum(),
            E::Twist(r, c) => p.pow(*r) * c.degree(p),
            E::Dual(c) | E::Precompose(_, c) => c.degree(p),
            E::Unit => 0,
            E::Compose(o, i) => o.degree(p) * i.degree(p),
        }
    }

    /// Whether any Precompose node is present (the realization is graded).
    pub fn is_graded(&self) -> bool {
        match self {
            E::Precompose(..) => true,
            E::TensorProduct(cs) => cs.iter().any(|c| c.is_graded()),
            E::Twist(_, c) | E::Dual(c) => c.is_graded(),
            E::Compose(o, i) => o.is_graded() || i.is_graded(),
            _ => false,
        }
    }

    /// Whether the expression can be realized as a module (no general composite).
    pub fn is_realizable(&self) -> bool {
        match self {
            E::Compose(..) => false,
            E::TensorProduct(cs) => cs.iter().all(|c| c.is_realizable()),
            E::Twist(_, c) | E::Dual(c) | E::Precompose(_, c) => c.is_realizable(),
            _ => true,
        }
    }

    /// Largest power p^r dividing every torus weight that occurs (u32::MAX for degree 0 leaves).
    pub fn twist_divisor(&self, p: u32) -> u32 {
        match self {
            E::Unit => u32::MAX,
            E::Sym(m) | E::Ext(m) | E::Div(m) if m.weight() == 0 => u32::MAX,
            E::Tensor(0) => u32::MAX,
            E::Twist(r, c) => c.twist_divisor(p).saturating_mul(p.pow(*r)),
            E::Dual(c) | E::Precompose(_, c) => c.twist_divisor(p),
            E::TensorProduct(cs) => cs.iter().map(|c| c.twist_divisor(p)).min().unwrap_or(u32::MAX),
            _ => 1,
        }
    }

    /// Apply the duality F -> F^#, pushing it to the leaves.
    pub fn sharp(&self) -> FunctorExpr {
        match self {
            E::Sym(m) => E::Div(m.clone()),
            E::Div(m) => E::Sym(m.clone()),
            E::Ext(m) => E::Ext(m.clone()),
            E::Tensor(d) => E::Tensor(*d),
            E::Unit => E::Unit,
            E::TensorProduct(cs) => E::TensorProduct(cs.iter().map(|c| c.sharp()).collect()),
            E::Twist(r, c) => E::twist(*r, c.sharp()),
            E::Dual(c) => (**c).clone(),
            E::Precompose(w, c) => E::precompose(w.clone(), c.sharp()),
            E::Compose(..) => E::dual(self.clone()),
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn ints(f: &mut fmt::Formatter<'_>, m: &Composition) -> fmt::Result {
            for (i, x) in m.parts().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            E::Sym(m) => {
                write!(f, "S[")?;
                ints(f, m)?;
                write!(f, "]")
            }
            E::Ext(m) => {
                write!(f, "L[")?;
                ints(f, m)?;
                write!(f, "]")
            }
            E::Div(m) => {
                write!(f, "G[")?;
                ints(f, m)?;
                write!(f, "]")
            }
            E::Tensor(d) => write!(f, "T[{d}]"),
            E::TensorProduct(cs) => {
                if cs.is_empty() {
                    return write!(f, "k");
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    if matches!(c, E::TensorProduct(_)) {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
            E::Twist(r, c) => write!(f, "tw({r}, {c})"),
            E::Dual(c) => write!(f, "dual({c})"),
            E::Precompose(w, c) => write!(f, "pre({w}, {c})"),
            E::Unit => write!(f, "k"),
            E::Compose(o, i) => write!(f, "comp({o}, {i})"),
        }
    }
}

/// Parse an expression. `p` is needed to expand the spaces `E<r>` and `Sha<r>`.
pub fn parse(text: &str, p: u32) -> Result<FunctorExpr, Error> {
    let mut ps = Parser { s: text.as_bytes(), pos: 0, p };
    let e = ps.expr()?;
    ps.ws();
    if ps.pos != ps.s.len() {
        return Err(ps.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a graded space in the grammar's `space` syntax.
pub fn parse_space(text: &str, p: u32) -> Result<GradedSpace, Error> {
    let mut ps = Parser { s: text.as_bytes(), pos: 0, p };
    let w = ps.space()?;
    ps.ws();
    if ps.pos != ps.s.len() {
        return Err(ps.err("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    p: u32,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, message: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// A keyword followed by its opening bracket, whitespace allowed between them.
    fn call(&mut self, name: &str, open: &str) -> bool {
        let save = self.pos;
        if self.eat(name) && self.eat(open) {
            return true;
        }
        self.pos = save;
        false
    }

    fn expect(&mut self, tok: &str) -> Result<(), Error> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{tok}'")))
        }
    }

    fn int(&mut self) -> Result<u32, Error> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { offset: start, message: "integer out of range".into() })
    }

    fn ints(&mut self) -> Result<Vec<u32>, Error> {
        let mut v = vec![self.int()?];
        while self.eat(",") {
            v.push(self.int()?);
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<FunctorExpr, Error> {
        let first = self.factor()?;
        let mut rest = Vec::new();
        while self.eat("*") {
            rest.push(self.factor()?);
        }
        if rest.is_empty() {
            Ok(first)
        } else {
            let mut all = vec![first];
            all.extend(rest);
            Ok(E::TensorProduct(all))
        }
    }

    fn factor(&mut self) -> Result<FunctorExpr, Error> {
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input"));
        };
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.call("tw", "(") {
            let r = self.int()?;
            self.expect(",")?;
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(E::twist(r, e));
        }
        if self.call("dual", "(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(E::dual(e));
        }
        if self.call("pre", "(") {
            let w = self.space()?;
            self.expect(",")?;
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(E::precompose(w, e));
        }
        if self.call("comp", "(") {
            let o = self.expr()?;
            self.expect(",")?;
            let i = self.expr()?;
            self.expect(")")?;
            return Ok(E::compose(o, i));
        }
        for (tok, kind) in [("S", 0), ("L", 1), ("G", 2)] {
            if self.call(tok, "[") {
                let v = self.ints()?;
                self.expect("]")?;
                let m = Composition::new(v);
                return Ok(match kind {
                    0 => E::Sym(m),
                    1 => E::Ext(m),
                    _ => E::Div(m),
                });
            }
        }
        if self.call("T", "[") {
            let d = self.int()?;
            self.expect("]")?;
            return Ok(E::Tensor(d));
        }
        if c == b'I' {
            self.pos += 1;
            return Ok(E::id());
        }
        if c == b'k' {
            self.pos += 1;
            return Ok(E::Unit);
        }
        Err(self.err("unknown symbol"))
    }

    fn space(&mut self) -> Result<GradedSpace, Error> {
        if self.eat("Sha") {
            let r = self.int()?;
            return Ok(sha(self.p, r));
        }
        if self.eat("E") {
            let r = self.int()?;
            return Ok(e_space(self.p, r));
        }
        if self.call("k", "^") {
            let n = self.int()?;
            return Ok(GradedSpace::ungraded(n as usize));
        }
        if self.eat("{") {
            let mut g = GradedSpace::default();
            if self.eat("}") {
                return Ok(g);
            }
            loop {
                let d = self.int()?;
                self.expect(":")?;
                let n = self.int()?;
                g.add(d, n as usize);
                if self.eat("}") {
                    return Ok(g);
                }
                self.expect(",")?;
            }
        }
        Err(self.err("expected a graded space (E<r>, Sha<r>, k^<n> or {deg:dim,...})"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("S[2,1]", 2).unwrap(), E::sym(&[2, 1]));
        assert_eq!(
            parse("tw(1, T[2]) * L[2]", 2).unwrap(),
            E::TensorProduct(vec![E::twist(1, E::Tensor(2)), E::ext(&[2])])
        );
        assert_eq!(parse("pre(E1, S[3])", 2).unwrap(), E::precompose(e_space(2, 1), E::sym(&[3])));
        assert_eq!(parse(" dual( G[ 2 ] ) ", 3).unwrap(), E::dual(E::div(&[2])));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse("S[2,", 2) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("X[1]", 2), Err(Error::Parse { offset: 0, .. })));
        assert!(parse("S[1] )", 2).is_err());
    }

    #[test]
    fn degrees() {
        let e = parse("tw(1, T[2]) * L[2]", 2).unwrap();
        assert_eq!(e.degree(2), 6);
        assert_eq!(parse("comp(S[3], S[2])", 2).unwrap().degree(2), 6);
        assert_eq!(E::Unit.degree(3), 0);
    }
}
