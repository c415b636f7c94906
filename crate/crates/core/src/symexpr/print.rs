//! Printer emitting the same DSL the parser reads.

use std::fmt::{self, Write};

use num_traits::Signed;

use super::{Expr, Node, Num};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn num_prec(c: &Num) -> u8 {
    match c {
        Num::Rat(r) if !r.is_integer() => PRODUCT,
        _ if c.is_negative() => UNARY,
        _ => ATOM,
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) => num_prec(c),
        Node::Var(_) | Node::Func(..) => ATOM,
        Node::Sum(_) => SUM,
        Node::Product(_) | Node::Inv(_) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Pow(..) => POWER,
    }
}

fn write_at(out: &mut impl Write, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        out.write_char('(')?;
        write_expr(out, e)?;
        out.write_char(')')
    } else {
        write_expr(out, e)
    }
}

/// The term with its sign flipped, if it prints with a leading minus.
fn negated(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Neg(x) => Some(x.clone()),
        Node::Const(c) if c.is_negative() => Some(Expr::constant(c.neg())),
        Node::Product(fs) => match fs[0].as_const() {
            Some(c) if c.is_negative() => {
                let mut rest = fs.clone();
                let flipped = c.neg();
                if flipped.is_one() {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::constant(flipped);
                }
                Some(if rest.len() == 1 { rest.pop().unwrap() } else { Expr::raw(Node::Product(rest)) })
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_exponent(out: &mut impl Write, e: &num_rational::Rational64) -> fmt::Result {
    if e.is_integer() && !e.is_negative() {
        write!(out, "{}", e.numer())
    } else if e.is_integer() {
        write!(out, "({})", e.numer())
    } else {
        write!(out, "({}/{})", e.numer(), e.denom())
    }
}

fn write_expr(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(out, "{c}"),
        Node::Var(v) => write!(out, "{v}"),
        Node::Func(f, a) => {
            write!(out, "{}(", f.name())?;
            write_expr(out, a)?;
            out.write_char(')')
        }
        Node::Neg(x) => {
            out.write_char('-')?;
            write_at(out, x, UNARY)
        }
        Node::Inv(x) => {
            out.write_str("1/")?;
            write_at(out, x, UNARY)
        }
        Node::Pow(b, p) => {
            write_at(out, b, ATOM)?;
            out.write_char('^')?;
            write_exponent(out, p)
        }
        Node::Sum(ts) => {
            write_at(out, &ts[0], SUM)?;
            for t in &ts[1..] {
                match negated(t) {
                    Some(pos) => {
                        out.write_str(" - ")?;
                        write_at(out, &pos, PRODUCT)?;
                    }
                    None => {
                        out.write_str(" + ")?;
                        write_at(out, t, PRODUCT)?;
                    }
                }
            }
            Ok(())
        }
        Node::Product(fs) => {
            let mut numer: Vec<&Expr> = Vec::new();
            let mut denom: Vec<Expr> = Vec::new();
            let mut coef: Option<&Num> = None;
            for (i, f) in fs.iter().enumerate() {
                match f.node() {
                    Node::Const(c) if i == 0 => coef = Some(c),
                    Node::Pow(b, p) if p.is_negative() => denom.push(b.pow(-p)),
                    Node::Inv(x) => denom.push(x.clone()),
                    _ => numer.push(f),
                }
            }
            let mut first = true;
            match coef {
                Some(c) if c.is_one() => {}
                Some(c) if c.neg().is_one() && !numer.is_empty() => out.write_char('-')?,
                Some(c) => {
                    write!(out, "{c}")?;
                    first = false;
                }
                None => {}
            }
            for f in &numer {
                if !first {
                    out.write_char('*')?;
                }
                write_at(out, f, UNARY)?;
                first = false;
            }
            if first {
                out.write_char('1')?;
            }
            for d in &denom {
                out.write_char('/')?;
                write_at(out, d, POWER)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    #[test]
    fn readable_output() {
        let x = Expr::x(0);
        let e = Expr::int(2) * &x - Expr::t().sin() / Expr::y(1).square();
        let s = e.to_string();
        assert!(s.contains(" - "), "{s}");
        assert_eq!(parse_expr(&s, 2).unwrap().simplify(), e);
        assert_eq!((-&x).to_string(), "-x1");
        assert_eq!(x.pow(num_rational::Rational64::new(1, 2)).to_string(), "x1^(1/2)");
        assert_eq!((Expr::ratio(3, 4) * &x).to_string(), "3/4*x1");
    }

    #[test]
    fn raw_round_trip() {
        for src in ["-(x1 + t)^3", "1/(2*x1) - -3", "(x1^2)^(1/2)", "--t", "sqrt(y1)^(-1/3)*exp(-t)"] {
            let e = parse_expr(src, 1).unwrap();
            let back = parse_expr(&e.to_string(), 1).unwrap();
            assert_eq!(back.simplify(), e.simplify(), "{src} -> {e}");
        }
    }
}
