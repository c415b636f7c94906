use std::cell::RefCell;

use num_rational::Rational64;
use num_traits::One;
use rustc_hash::FxHashMap;

use super::{Coord, Expr, Func, Node, Num};

// Per-thread memo of derivatives keyed by (node id, variable). Node ids are
// never reused, so stale entries are harmless; the table is dropped wholesale
// when it grows past the limit.
const CACHE_LIMIT: usize = 1 << 22;

thread_local! {
    static DIFF_CACHE: RefCell<FxHashMap<(u64, Coord), Expr>> = RefCell::new(FxHashMap::default());
}

/// Drops this thread's derivative memo.
pub fn clear_diff_cache() {
    DIFF_CACHE.with(|c| c.borrow_mut().clear());
}

impl Expr {
    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: Coord) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        if let Some(hit) = DIFF_CACHE.with(|c| c.borrow().get(&(self.id(), v)).cloned()) {
            return hit;
        }
        let d = self.diff_uncached(v);
        DIFF_CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= CACHE_LIMIT {
                c.clear();
            }
            c.insert((self.id(), v), d.clone());
        });
        d
    }

    fn diff_uncached(&self, v: Coord) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(c) => {
                if *c == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.diff(v)).collect()),
            Node::Product(fs) => {
                let mut terms = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let df = f.diff(v);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors = fs.clone();
                    factors[i] = df;
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Node::Pow(b, e) => {
                let db = b.diff(v);
                Expr::product(vec![Expr::constant(Num::Rat(*e)), b.pow(e - Rational64::one()), db])
            }
            Node::Neg(x) => -x.diff(v),
            Node::Inv(x) => -(x.diff(v) * x.powi(-2)),
            Node::Func(f, a) => {
                let da = a.diff(v);
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => self.clone(),
                    Func::Log => a.recip(),
                    Func::Sqrt => Expr::ratio(1, 2) * self.recip(),
                };
                outer * da
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rule() {
        let t = Expr::t();
        assert_eq!(t.square().diff(Coord::Time), Expr::int(2) * &t);
    }

    #[test]
    fn chain_rule() {
        let s = Expr::x(0).sin();
        let d = s.square().diff(Coord::Space(0));
        assert_eq!(d, Expr::int(2) * &s * Expr::x(0).cos());
    }

    #[test]
    fn independent_variable() {
        assert!(Expr::x(0).sin().diff(Coord::Fiber(0)).is_zero());
    }

    #[test]
    fn raw_nodes_differentiate() {
        let x = Expr::x(0);
        let inv = Expr::raw(Node::Inv(x.clone()));
        assert_eq!(inv.diff(Coord::Space(0)), -x.powi(-2));
        let neg = Expr::raw(Node::Neg(x.square()));
        assert_eq!(neg.diff(Coord::Space(0)), Expr::int(-2) * &x);
    }
}
