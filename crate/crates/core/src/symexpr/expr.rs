//! Hash-consed expression nodes and the canonicalizing constructors.
//!
//! Every node is interned: two structurally equal expressions share one
//! allocation and one id, so equality is an id comparison and evaluation of
//! a DAG touches each distinct subtree once.
//!
//! The arithmetic constructors (`sum`, `product`, `pow`, operators) keep
//! results in a canonical form: flattened sums and products, at most one
//! numeric coefficient (first), like terms and like bases merged, and
//! children ordered by structural hash. `Neg` and `Inv` only appear in raw
//! parser output.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Weak};

use num_rational::Rational64;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::Mutex;
use rustc_hash::{FxHashMap, FxHasher};

use super::{Coord, Num};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub enum Node {
    Const(Num),
    Var(Coord),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Rational64),
    Neg(Expr),
    Inv(Expr),
    Func(Func, Expr),
}

impl Node {
    pub fn children(&self) -> &[Expr] {
        match self {
            Node::Const(_) | Node::Var(_) => &[],
            Node::Sum(v) | Node::Product(v) => v,
            Node::Pow(b, _) | Node::Neg(b) | Node::Inv(b) | Node::Func(_, b) => std::slice::from_ref(b),
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Node::Const(_) => 0,
            Node::Var(_) => 1,
            Node::Sum(_) => 2,
            Node::Product(_) => 3,
            Node::Pow(..) => 4,
            Node::Neg(_) => 5,
            Node::Inv(_) => 6,
            Node::Func(..) => 7,
        }
    }

    fn structural_hash(&self) -> u64 {
        let mut h = FxHasher::default();
        self.tag().hash(&mut h);
        match self {
            Node::Const(c) => c.hash(&mut h),
            Node::Var(v) => v.hash(&mut h),
            Node::Pow(_, e) => {
                e.numer().hash(&mut h);
                e.denom().hash(&mut h);
            }
            Node::Func(f, _) => f.hash(&mut h),
            _ => {}
        }
        for c in self.children() {
            c.0.hash.hash(&mut h);
        }
        h.finish()
    }

    /// Equality with children compared by identity (valid because children are interned).
    fn shallow_eq(&self, other: &Node) -> bool {
        let same_kids = |a: &[Expr], b: &[Expr]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.id() == y.id());
        match (self, other) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Sum(a), Node::Sum(b)) | (Node::Product(a), Node::Product(b)) => same_kids(a, b),
            (Node::Pow(a, e), Node::Pow(b, f)) => e == f && a.id() == b.id(),
            (Node::Neg(a), Node::Neg(b)) | (Node::Inv(a), Node::Inv(b)) => a.id() == b.id(),
            (Node::Func(f, a), Node::Func(g, b)) => f == g && a.id() == b.id(),
            _ => false,
        }
    }
}

#[derive(Debug)]
struct Inner {
    id: u64,
    hash: u64,
    vars: u64,
    node: Node,
}

/// An immutable, shared symbolic expression in the jet coordinates.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

struct Interner {
    buckets: FxHashMap<u64, Vec<Weak<Inner>>>,
    entries: usize,
    next_purge: usize,
}

static INTERNER: Lazy<Mutex<Interner>> =
    Lazy::new(|| Mutex::new(Interner { buckets: FxHashMap::default(), entries: 0, next_purge: 1 << 16 }));
static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn intern(node: Node) -> Expr {
    let hash = node.structural_hash();
    let vars = node.children().iter().fold(
        match &node {
            Node::Var(v) => v.mask(),
            _ => 0,
        },
        |m, c| m | c.0.vars,
    );
    let mut g = INTERNER.lock();
    if let Some(bucket) = g.buckets.get(&hash) {
        for w in bucket {
            if let Some(a) = w.upgrade() {
                if a.node.shallow_eq(&node) {
                    return Expr(a);
                }
            }
        }
    }
    let inner = Arc::new(Inner { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), hash, vars, node });
    g.buckets.entry(hash).or_default().push(Arc::downgrade(&inner));
    g.entries += 1;
    if g.entries > g.next_purge {
        g.buckets.retain(|_, b| {
            b.retain(|w| w.strong_count() > 0);
            !b.is_empty()
        });
        let live: usize = g.buckets.values().map(Vec::len).sum();
        g.entries = live;
        g.next_purge = (2 * live).max(1 << 16);
    }
    Expr(inner)
}

impl Expr {
    /// Interns a node exactly as given, without canonicalization.
    pub fn raw(node: Node) -> Expr {
        intern(node)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Process-unique identity; equal ids ⇔ structurally equal expressions.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// Deterministic structural hash (independent of construction order).
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn constant(c: Num) -> Expr {
        intern(Node::Const(c))
    }

    pub fn int(v: i64) -> Expr {
        Self::constant(Num::int(v))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Self::constant(Num::ratio(n, d))
    }

    pub fn zero() -> Expr {
        Self::constant(Num::ZERO)
    }

    pub fn one() -> Expr {
        Self::constant(Num::ONE)
    }

    pub fn var(c: Coord) -> Expr {
        intern(Node::Var(c))
    }

    pub fn t() -> Expr {
        Self::var(Coord::Time)
    }

    /// `x^{i+1}` (0-based index).
    pub fn x(i: usize) -> Expr {
        Self::var(Coord::Space(i))
    }

    /// `y_1^{i+1}` (0-based index).
    pub fn y(i: usize) -> Expr {
        Self::var(Coord::Fiber(i))
    }

    pub fn as_const(&self) -> Option<&Num> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Num::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(Num::is_one)
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        self.0.vars & c.mask() != 0
    }

    /// Whether every free variable of `self` is in `allowed`.
    pub fn depends_only_on(&self, allowed: &[Coord]) -> bool {
        let mask = allowed.iter().fold(0, |m, c| m | c.mask());
        self.0.vars & !mask == 0
    }

    pub fn free_vars(&self, n: usize) -> Vec<Coord> {
        Coord::all(n).into_iter().filter(|c| self.depends_on(*c)).collect()
    }

    /// Highest spatial/fiber index (0-based) appearing in `self`, if any.
    pub fn max_index(&self) -> Option<usize> {
        let v = self.0.vars >> 1;
        if v == 0 {
            None
        } else {
            Some((63 - v.leading_zeros() as usize) / 2)
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if seen.insert(e.id()) {
                stack.extend(e.node().children().iter().cloned());
            }
        }
        seen.len()
    }

    // ----- canonical constructors -----

    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut constant = Num::ZERO;
        let mut order: Vec<Expr> = Vec::new();
        let mut coefs: FxHashMap<u64, Num> = FxHashMap::default();
        let mut stack: Vec<(Num, Expr)> = terms.into_iter().rev().map(|t| (Num::ONE, t)).collect();
        while let Some((scale, term)) = stack.pop() {
            match term.node() {
                Node::Sum(ts) => stack.extend(ts.iter().rev().map(|t| (scale, t.clone()))),
                Node::Neg(x) => stack.push((scale.neg(), x.clone())),
                _ => {
                    let (c, rest) = split_coefficient(&term);
                    let c = c.mul(&scale);
                    match rest {
                        None => constant = constant.add(&c),
                        Some(rest) if matches!(rest.node(), Node::Sum(_) | Node::Neg(_)) => stack.push((c, rest)),
                        Some(rest) => {
                            let slot = coefs.entry(rest.id()).or_insert_with(|| {
                                order.push(rest.clone());
                                Num::ZERO
                            });
                            *slot = slot.add(&c);
                        }
                    }
                }
            }
        }
        order.sort_by(cmp_structural);
        let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for rest in order {
            let c = coefs[&rest.id()];
            if c.is_zero() {
                continue;
            }
            out.push(if c.is_one() { rest } else { Expr::product(vec![Expr::constant(c), rest]) });
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => intern(Node::Sum(out)),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut coef = Num::ONE;
        let mut order: Vec<Expr> = Vec::new();
        let mut exps: FxHashMap<u64, Rational64> = FxHashMap::default();
        let mut stack: Vec<(Rational64, Expr)> = factors.into_iter().rev().map(|f| (Rational64::one(), f)).collect();
        while let Some((e, f)) = stack.pop() {
            match f.node() {
                Node::Product(fs) if e.is_integer() => stack.extend(fs.iter().rev().map(|x| (e, x.clone()))),
                Node::Neg(x) if e.is_integer() => {
                    if (*e.numer()).rem_euclid(2) == 1 {
                        coef = coef.neg();
                    }
                    stack.push((e, x.clone()));
                }
                Node::Inv(x) => stack.push((-e, x.clone())),
                Node::Const(c) => match c.pow_exact(&e) {
                    Some(v) => coef = coef.mul(&v),
                    None => push_base(&mut order, &mut exps, f.clone(), e),
                },
                Node::Pow(b, pe) if e.is_integer() => stack.push((pe * e, b.clone())),
                _ => push_base(&mut order, &mut exps, f.clone(), e),
            }
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        order.sort_by(cmp_structural);
        let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
        for base in order {
            let e = exps[&base.id()];
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                out.push(base);
            } else {
                out.push(intern(Node::Pow(base, e)));
            }
        }
        if out.is_empty() {
            return Expr::constant(coef);
        }
        if coef.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coef.is_one() {
            out.insert(0, Expr::constant(coef));
        }
        intern(Node::Product(out))
    }

    pub fn pow(&self, e: Rational64) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return self.clone();
        }
        match self.node() {
            Node::Const(c) => match c.pow_exact(&e) {
                Some(v) => Expr::constant(v),
                None => intern(Node::Pow(self.clone(), e)),
            },
            Node::Product(_) | Node::Neg(_) | Node::Inv(_) if e.is_integer() => {
                Expr::product(vec![self.clone()]).product_pow_int(e)
            }
            Node::Inv(x) => x.pow(-e),
            Node::Pow(b, pe) if e.is_integer() => b.pow(pe * e),
            _ => intern(Node::Pow(self.clone(), e)),
        }
    }

    fn product_pow_int(&self, e: Rational64) -> Expr {
        match self.node() {
            Node::Product(fs) => Expr::product(fs.iter().map(|f| f.pow(e)).collect()),
            _ => self.pow(e),
        }
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.pow(Rational64::from_integer(k))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn square(&self) -> Expr {
        self.powi(2)
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if let Some(v) = fold_func(f, c) {
                return Expr::constant(v);
            }
        }
        intern(Node::Func(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Self::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Self::apply(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Self::apply(Func::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        Self::apply(Func::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Self::apply(Func::Sqrt, self.clone())
    }

    pub fn scale(&self, c: Num) -> Expr {
        Expr::product(vec![Expr::constant(c), self.clone()])
    }
}

fn push_base(order: &mut Vec<Expr>, exps: &mut FxHashMap<u64, Rational64>, base: Expr, e: Rational64) {
    let slot = exps.entry(base.id()).or_insert_with(|| {
        order.push(base);
        Rational64::zero()
    });
    *slot += e;
}

/// Splits `c * rest` into its numeric coefficient and the remaining factor.
fn split_coefficient(e: &Expr) -> (Num, Option<Expr>) {
    match e.node() {
        Node::Const(c) => (*c, None),
        Node::Product(fs) => match fs[0].node() {
            Node::Const(c) => {
                let rest = if fs.len() == 2 { fs[1].clone() } else { intern(Node::Product(fs[1..].to_vec())) };
                (*c, Some(rest))
            }
            _ => (Num::ONE, Some(e.clone())),
        },
        _ => (Num::ONE, Some(e.clone())),
    }
}

fn fold_func(f: Func, c: &Num) -> Option<Num> {
    let exact = match (f, c.as_rational()) {
        (Func::Sin, Some(r)) if r.is_zero() => Some(Num::ZERO),
        (Func::Cos | Func::Exp, Some(r)) if r.is_zero() => Some(Num::ONE),
        (Func::Log, Some(r)) if r.is_one() => Some(Num::ZERO),
        (Func::Sqrt, Some(_)) => c.pow_exact(&Rational64::new(1, 2)),
        _ => None,
    };
    if exact.is_some() {
        return exact;
    }
    if let Num::Real(v) = c {
        let r = match f {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log if *v > 0.0 => v.ln(),
            Func::Sqrt if *v >= 0.0 => v.sqrt(),
            _ => return None,
        };
        return Num::real(r);
    }
    None
}

/// Canonical ordering: by structural hash, ties (hash collisions) by id.
pub(crate) fn cmp_structural(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    a.0.hash.cmp(&b.0.hash).then(a.0.id.cmp(&b.0.id))
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Self {
        Expr::var(c)
    }
}

impl From<Num> for Expr {
    fn from(c: Num) -> Self {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (&self, rhs);
                $body
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum(vec![a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum(vec![a.clone(), b.scale(Num::int(-1))]));
binop!(Mul, mul, |a, b| Expr::product(vec![a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product(vec![a.clone(), b.recip()]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(Num::int(-1))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(Num::int(-1))
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter.collect())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::product(iter.collect())
    }
}
