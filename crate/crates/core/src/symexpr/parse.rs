//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 't' | 'x'k | 'y'k | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt
//! ```
//!
//! Exponents must reduce to rational constants. The parser returns the raw
//! tree (subtraction as `Sum(a, Neg(b))`, division as `Product(a, Inv(b))`);
//! call [`Expr::simplify`] for the canonical form.

use num_rational::Rational64;
use thiserror::Error;

use super::{Coord, Expr, Func, Node, Num, MAX_INDEX};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` at offset {offset} is out of range for dimension {n}")]
    IndexOutOfRange { name: String, offset: usize, n: usize },
    #[error("exponent at offset {offset} is not a rational constant")]
    NonConstantExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::IndexOutOfRange { offset, .. }
            | ParseError::NonConstantExponent { offset } => *offset,
        }
    }
}

/// Parses `src` for a chart of dimension `n` (variables `x1..xn`, `y1..yn`).
pub fn parse_expr(src: &str, n: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::raw(Node::Neg(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::raw(Node::Sum(terms)) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                factors.push(Expr::raw(Node::Inv(self.unary()?)));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::raw(Node::Product(factors)) })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(match inner.as_const() {
                Some(c) => Expr::constant(c.neg()),
                None => Expr::raw(Node::Neg(inner)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exponent = self.unary()?.simplify();
        let e = exponent.as_const().and_then(Num::as_rational).ok_or(ParseError::NonConstantExponent { offset: at })?;
        Ok(Expr::raw(Node::Pow(base, e)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let int_len = digits(self);
        let mut frac_len = 0;
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac_len = digits(self);
        }
        if int_len + frac_len == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        let mantissa_end = self.pos;
        let mut exp10: i64 = 0;
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let es = self.pos;
            if digits(self) == 0 {
                self.pos = save;
            } else {
                let v: i64 = std::str::from_utf8(&self.src[es..self.pos]).unwrap().parse().unwrap_or(i64::MAX);
                exp10 = if neg { -v } else { v };
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mantissa: String =
            std::str::from_utf8(&self.src[start..mantissa_end]).unwrap().chars().filter(|c| *c != '.').collect();
        let exact = mantissa.parse::<i64>().ok().and_then(|m| {
            let scale = exp10.checked_sub(frac_len as i64)?;
            let pow = 10i64.checked_pow(u32::try_from(scale.unsigned_abs()).ok()?)?;
            if scale >= 0 {
                Some(Rational64::from_integer(m.checked_mul(pow)?))
            } else {
                Some(Rational64::new(m, pow))
            }
        });
        let num = match exact {
            Some(r) => Num::Rat(r),
            None => {
                let v: f64 = text
                    .parse()
                    .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{text}`") })?;
                Num::real(v)
                    .ok_or(ParseError::Syntax { offset: start, message: format!("number `{text}` overflows") })?
            }
        };
        Ok(Expr::constant(num))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(f) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.syntax(format!("expected `(` after `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax("expected `)`"));
            }
            return Ok(Expr::raw(Node::Func(f, arg)));
        }
        if name == "t" {
            return Ok(Expr::t());
        }
        let unknown = || ParseError::UnknownIdentifier { name: name.to_string(), offset: start };
        let (head, idx) = name.split_at(1);
        if !(head == "x" || head == "y") || idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let k: usize = idx.parse().map_err(|_| unknown())?;
        if k == 0 || k > self.n || k > MAX_INDEX + 1 {
            return Err(ParseError::IndexOutOfRange { name: name.to_string(), offset: start, n: self.n });
        }
        Ok(Expr::var(if head == "x" { Coord::Space(k - 1) } else { Coord::Fiber(k - 1) }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_mapping() {
        let e = parse_expr("sin(x1)^2", 2).unwrap();
        match e.node() {
            Node::Pow(b, p) => {
                assert_eq!(*p, Rational64::from_integer(2));
                assert!(matches!(b.node(), Node::Func(Func::Sin, a) if *a == Expr::x(0)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = parse_expr("2*t + y1", 1).unwrap();
        match e.node() {
            Node::Sum(ts) => {
                assert_eq!(ts.len(), 2);
                assert!(matches!(ts[0].node(), Node::Product(fs) if fs[0] == Expr::int(2) && fs[1] == Expr::t()));
                assert_eq!(ts[1], Expr::y(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_expr("sin(", 1).unwrap_err().offset(), 4);
        assert!(matches!(parse_expr("sin(", 1), Err(ParseError::Syntax { offset: 4, .. })));
        assert_eq!(parse_expr("t + z2", 2), Err(ParseError::UnknownIdentifier { name: "z2".into(), offset: 4 }));
        assert_eq!(parse_expr("x3", 2), Err(ParseError::IndexOutOfRange { name: "x3".into(), offset: 0, n: 2 }));
        assert!(matches!(parse_expr("x0", 2), Err(ParseError::IndexOutOfRange { .. })));
        assert_eq!(parse_expr("t^x1", 1), Err(ParseError::NonConstantExponent { offset: 2 }));
        assert!(matches!(parse_expr("(t", 1), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("t t", 1), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("sin t", 1), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(parse_expr("0.25", 1).unwrap(), Expr::ratio(1, 4));
        assert_eq!(parse_expr("1e-3", 1).unwrap(), Expr::ratio(1, 1000));
        assert_eq!(parse_expr("2.5E2", 1).unwrap(), Expr::int(250));
        assert_eq!(parse_expr("-3", 1).unwrap(), Expr::int(-3));
        assert!(matches!(parse_expr("1e400", 1), Err(ParseError::Syntax { .. })));
        let big = parse_expr("1e30", 1).unwrap();
        assert_eq!(big.as_const().unwrap().to_f64(), 1e30);
    }

    #[test]
    fn rational_exponents() {
        let e = parse_expr("x1^(1/2) * x1^-1", 1).unwrap().simplify();
        assert_eq!(e, Expr::x(0).pow(Rational64::new(-1, 2)));
    }
}
