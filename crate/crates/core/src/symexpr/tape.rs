//! Straight-line evaluation of expression DAGs.
//!
//! A [`Tape`] flattens the distinct nodes reachable from a set of roots into
//! topological order once; each evaluation is then a single pass over a slot
//! vector, so shared subtrees are computed once per point.

use num_rational::Rational64;
use rustc_hash::FxHashMap;
use thiserror::Error;

use super::{Coord, Expr, Func, Node, Num};
use crate::scalar::{Scalar, ScalarError};

/// Evaluation failure, naming the offending subtree.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("{kind} in `{subtree}`")]
pub struct EvalError {
    pub kind: ScalarError,
    pub subtree: String,
}

#[derive(Clone, Debug)]
enum Op {
    Const(Num),
    Var(Coord),
    Sum(Vec<u32>),
    Product(Vec<u32>),
    Pow(u32, Rational64),
    Neg(u32),
    Inv(u32),
    Func(Func, u32),
}

#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    exprs: Vec<Expr>,
    roots: Vec<u32>,
    max_index: Option<usize>,
}

impl Tape {
    pub fn new(roots: &[Expr]) -> Tape {
        let mut slot: FxHashMap<u64, u32> = FxHashMap::default();
        let mut ops = Vec::new();
        let mut exprs = Vec::new();
        let mut max_index: Option<usize> = None;
        for r in roots {
            max_index = max_index.max(r.max_index());
        }
        // iterative post-order
        let mut stack: Vec<(Expr, bool)> = roots.iter().rev().map(|r| (r.clone(), false)).collect();
        while let Some((e, expanded)) = stack.pop() {
            if slot.contains_key(&e.id()) {
                continue;
            }
            if !expanded {
                stack.push((e.clone(), true));
                for c in e.node().children().iter().rev() {
                    if !slot.contains_key(&c.id()) {
                        stack.push((c.clone(), false));
                    }
                }
                continue;
            }
            let s = |x: &Expr| slot[&x.id()];
            let op = match e.node() {
                Node::Const(c) => Op::Const(*c),
                Node::Var(v) => Op::Var(*v),
                Node::Sum(ts) => Op::Sum(ts.iter().map(s).collect()),
                Node::Product(fs) => Op::Product(fs.iter().map(s).collect()),
                Node::Pow(b, p) => Op::Pow(s(b), *p),
                Node::Neg(x) => Op::Neg(s(x)),
                Node::Inv(x) => Op::Inv(s(x)),
                Node::Func(f, a) => Op::Func(*f, s(a)),
            };
            slot.insert(e.id(), ops.len() as u32);
            ops.push(op);
            exprs.push(e);
        }
        let roots = roots.iter().map(|r| slot[&r.id()]).collect();
        Tape { ops, exprs, roots, max_index }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Evaluates every root at `p`.
    ///
    /// Panics if `p` has fewer coordinates than the expressions reference.
    pub fn eval<S: Scalar>(&self, p: &Point<S>) -> Result<Vec<S>, EvalError> {
        if let Some(m) = self.max_index {
            assert!(m < p.dim(), "point of dimension {} too small for x{}/y{}", p.dim(), m + 1, m + 1);
        }
        let mut vals: Vec<S> = Vec::with_capacity(self.ops.len());
        for (k, op) in self.ops.iter().enumerate() {
            let err = |kind| EvalError { kind, subtree: short(&self.exprs[k]) };
            let v = match op {
                Op::Const(c) => S::from_num(c).map_err(err)?,
                Op::Var(c) => p.get(*c).clone(),
                Op::Sum(xs) => xs.iter().fold(S::zero(), |a, &i| a + vals[i as usize].clone()),
                Op::Product(xs) => xs.iter().fold(S::one(), |a, &i| a * vals[i as usize].clone()),
                Op::Pow(b, e) => vals[*b as usize].pow_rational(e).map_err(err)?,
                Op::Neg(x) => -vals[*x as usize].clone(),
                Op::Inv(x) => vals[*x as usize].recip().map_err(err)?,
                Op::Func(f, a) => vals[*a as usize].apply(*f).map_err(err)?,
            };
            vals.push(v);
        }
        Ok(self.roots.iter().map(|&r| vals[r as usize].clone()).collect())
    }
}

use super::Point;

fn short(e: &Expr) -> String {
    let s = e.to_string();
    if s.len() > 200 {
        let cut = (0..=200).rev().find(|&i| s.is_char_boundary(i)).unwrap_or(0);
        format!("{}…", &s[..cut])
    } else {
        s
    }
}

impl Expr {
    /// Evaluates at `p` in the scalar type `S`.
    pub fn eval<S: Scalar>(&self, p: &Point<S>) -> Result<S, EvalError> {
        Tape::new(std::slice::from_ref(self)).eval(p).map(|mut v| v.pop().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;
    use num_rational::BigRational;

    fn p1(t: f64, x: f64, y: f64) -> Point<f64> {
        Point::new(t, vec![x], vec![y])
    }

    #[test]
    fn spec_examples() {
        let e = parse_expr("sin(x1)", 1).unwrap();
        assert_eq!(e.eval(&p1(0.3, 0.0, 1.0)).unwrap(), 0.0);
        let e = parse_expr("exp(2*t)", 1).unwrap();
        assert!((e.eval(&p1(0.5, 0.0, 0.0)).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let e = parse_expr("1/x1", 1).unwrap();
        let err = e.eval(&p1(0.0, 0.0, 0.0)).unwrap_err();
        assert_eq!(err.kind, ScalarError::DivisionByZero);
        assert!(err.subtree.contains("x1"));
    }

    #[test]
    fn shared_tape_over_many_roots() {
        let a = parse_expr("sin(x1)^2", 1).unwrap();
        let b = parse_expr("sin(x1)^2 + cos(x1)^2", 1).unwrap();
        let tape = Tape::new(&[a, b]);
        let v = tape.eval(&p1(0.0, 0.7, 0.0)).unwrap();
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert!((v[0] - 0.7f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn exact_evaluation() {
        let e = parse_expr("(t^2 + 1/3)*x1 - y1/2", 1).unwrap().simplify();
        let half = BigRational::new(1.into(), 2.into());
        let p = Point::new(half.clone(), vec![BigRational::from_integer(3.into())], vec![half]);
        let v = e.eval(&p).unwrap();
        assert_eq!(v, BigRational::new(3.into(), 2.into()));
        let f = parse_expr("sin(t)", 1).unwrap();
        assert_eq!(f.eval(&p).unwrap_err().kind, ScalarError::Inexact);
    }

    #[test]
    fn single_precision() {
        let e = parse_expr("x1*y1 + t", 1).unwrap();
        let p: Point<f32> = Point::new(1.0, vec![2.0], vec![3.0]);
        assert_eq!(e.eval(&p).unwrap(), 7.0f32);
    }
}
