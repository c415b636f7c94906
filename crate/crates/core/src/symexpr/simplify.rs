use rustc_hash::FxHashMap;

use super::{Coord, Expr, Node};

impl Expr {
    /// Rebuilds the expression through the canonical constructors until it
    /// stops changing. Pointwise equal to `self` wherever both are defined.
    pub fn simplify(&self) -> Expr {
        let mut cur = self.clone();
        for _ in 0..8 {
            let next = rebuild(&cur, &mut FxHashMap::default(), &leaf);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    /// Replaces variables by expressions (simultaneously).
    pub fn substitute(&self, map: &FxHashMap<Coord, Expr>) -> Expr {
        rebuild(self, &mut FxHashMap::default(), &|e| match e.node() {
            Node::Var(c) => Some(map.get(c).cloned().unwrap_or_else(|| e.clone())),
            _ => leaf(e),
        })
    }
}

fn leaf(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Const(_) | Node::Var(_) => Some(e.clone()),
        _ => None,
    }
}

fn rebuild(e: &Expr, memo: &mut FxHashMap<u64, Expr>, on_leaf: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
    if let Some(hit) = memo.get(&e.id()) {
        return hit.clone();
    }
    let out = if let Some(l) = on_leaf(e) {
        l
    } else {
        let kids = |xs: &[Expr], memo: &mut FxHashMap<u64, Expr>| -> Vec<Expr> {
            xs.iter().map(|x| rebuild(x, memo, on_leaf)).collect()
        };
        match e.node() {
            Node::Sum(ts) => Expr::sum(kids(ts, memo)),
            Node::Product(fs) => Expr::product(kids(fs, memo)),
            Node::Pow(b, p) => rebuild(b, memo, on_leaf).pow(*p),
            Node::Neg(x) => -rebuild(x, memo, on_leaf),
            Node::Inv(x) => rebuild(x, memo, on_leaf).recip(),
            Node::Func(f, a) => Expr::apply(*f, rebuild(a, memo, on_leaf)),
            Node::Const(_) | Node::Var(_) => e.clone(),
        }
    };
    memo.insert(e.id(), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    #[test]
    fn spec_examples() {
        let e = parse_expr("0*sin(x1) + t", 1).unwrap();
        assert_eq!(e.simplify(), Expr::t());
        let e = parse_expr("x1 - x1", 1).unwrap();
        assert!(e.simplify().is_zero());
    }

    #[test]
    fn idempotent_on_raw_input() {
        let e = parse_expr("-(x1*2)^2/(-x1) + 3*(t - t) - sqrt(4) + 1/(1/y1)", 1).unwrap();
        let s = e.simplify();
        assert_eq!(s.simplify(), s);
        assert_eq!(s, Expr::int(4) * Expr::x(0) - Expr::int(2) + Expr::y(0));
    }

    #[test]
    fn substitution() {
        let e = parse_expr("x1^2 + t", 1).unwrap().simplify();
        let mut m = FxHashMap::default();
        m.insert(Coord::Space(0), Expr::int(2) * Expr::t());
        assert_eq!(e.substitute(&m), Expr::int(4) * Expr::t().square() + Expr::t());
    }
}
