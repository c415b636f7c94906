//! Seeded random connections and fields for property tests and the
//! `random-cartan` scenario.
//!
//! Components are sparse polynomials of degree at most 2 in `(t, x, y)`
//! with rational coefficients `k/4`, `k ∈ [−8, 8]`, so every value lies in
//! `[−2, 2]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dconnect::{make_h_normal_cartan, DTensor, GammaConnection, HNormalData, IndexSlot};
use crate::geometry::{NonlinearConnection, TemporalMetric};
use crate::symexpr::{Coord, Expr};
use IndexSlot::*;

/// Chance that a given monomial appears in a random polynomial.
const DENSITY: f64 = 0.35;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coefficient(rng: &mut impl Rng) -> Expr {
    loop {
        let k: i64 = rng.gen_range(-8..=8);
        if k != 0 {
            return Expr::ratio(k, 4);
        }
    }
}

/// Random polynomial of degree ≤ 2 in `vars`.
pub fn polynomial(rng: &mut impl Rng, vars: &[Coord]) -> Expr {
    let mut terms = Vec::new();
    if rng.gen_bool(DENSITY) {
        terms.push(coefficient(rng));
    }
    for (a, &u) in vars.iter().enumerate() {
        if rng.gen_bool(DENSITY) {
            terms.push(coefficient(rng) * Expr::var(u));
        }
        for &v in &vars[a..] {
            if rng.gen_bool(DENSITY / 2.0) {
                terms.push(coefficient(rng) * Expr::var(u) * Expr::var(v));
            }
        }
    }
    Expr::sum(terms)
}

/// A rank-3 tensor `[upper, lower, third]` of random polynomials, optionally
/// symmetric in its last two indices.
fn random_family(rng: &mut impl Rng, sig: [IndexSlot; 3], n: usize, symmetric: bool) -> DTensor {
    let vars = Coord::all(n);
    let mut d = DTensor::zeros(sig.to_vec(), n);
    for ix in d.indices().collect::<Vec<_>>() {
        if symmetric && ix[2] < ix[1] {
            let mirror = d.get(&[ix[0], ix[2], ix[1]]).clone();
            d.set(&ix, mirror);
        } else {
            d.set(&ix, polynomial(rng, &vars));
        }
    }
    d
}

/// Random h-normal connection of Cartan type over a random nonlinear
/// connection, with `h₁₁ = 1 + a·t²`, `a ∈ {1/4, …, 2}`.
pub fn random_cartan(n: usize, rng: &mut impl Rng) -> GammaConnection {
    let a: i64 = rng.gen_range(1..=8);
    let h = TemporalMetric::new(Expr::one() + Expr::ratio(a, 4) * Expr::t().square()).expect("depends on t only");
    let vars = Coord::all(n);
    let m: Vec<Expr> = (0..n).map(|_| polynomial(rng, &vars)).collect();
    let nn: Vec<Vec<Expr>> = (0..n).map(|_| (0..n).map(|_| polynomial(rng, &vars)).collect()).collect();
    let nlc = NonlinearConnection::new(m, nn).expect("shapes match");
    let g = random_family(rng, [SpaceUpper, SpaceLower, TimeLower], n, false);
    let l = random_family(rng, [SpaceUpper, SpaceLower, SpaceLower], n, true);
    let c = random_family(rng, [SpaceUpper, SpaceLower, FiberLower], n, true);
    let data = HNormalData::new(h, g, l, c).expect("signatures match");
    make_h_normal_cartan(data, nlc).expect("symmetric by construction")
}

/// Random polynomial d-vector fields `(X¹, Xⁱ, X⁽ⁱ⁾₍₁₎)`.
pub fn random_vector_fields(n: usize, rng: &mut impl Rng) -> [DTensor; 3] {
    let vars = Coord::all(n);
    let mut field = |slot: IndexSlot| DTensor::from_fn(vec![slot], n, |_| polynomial(rng, &vars));
    [field(TimeUpper), field(SpaceUpper), field(FiberUpper)]
}

/// Random smooth expression of bounded depth in the coordinates of
/// dimension `n`, finite everywhere on `ℝ × ℝⁿ × ℝⁿ` (logarithms and
/// roots only see arguments `≥ 1`, quotients only denominators `≥ 1`).
pub fn expression(rng: &mut impl Rng, n: usize, depth: usize) -> Expr {
    let vars = Coord::all(n);
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.75) { Expr::var(vars[rng.gen_range(0..vars.len())]) } else { coefficient(rng) };
    }
    let sub = |rng: &mut _| expression(rng, n, depth - 1);
    let positive = |e: Expr| Expr::one() + e.square();
    match rng.gen_range(0..10) {
        0 | 1 => Expr::sum(vec![sub(rng), sub(rng)]),
        2 | 3 => Expr::product(vec![sub(rng), sub(rng)]),
        4 => sub(rng) - sub(rng),
        5 => sub(rng).sin(),
        6 => sub(rng).cos(),
        7 => (sub(rng) * Expr::ratio(1, 2)).sin().exp(),
        8 => match rng.gen_range(0..3) {
            0 => positive(sub(rng)).log(),
            1 => positive(sub(rng)).sqrt(),
            _ => positive(sub(rng)).recip(),
        },
        _ => sub(rng).powi(rng.gen_range(2..=3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_cartan() {
        let a = random_cartan(2, &mut rng(7));
        let b = random_cartan(2, &mut rng(7));
        assert_eq!(a, b);
        assert!(a.is_cartan());
        for k in 0..2 {
            assert_eq!(a.l(k, 0, 1), a.l(k, 1, 0));
            assert_eq!(a.c(k, 0, 1), a.c(k, 1, 0));
        }
        assert_ne!(a, random_cartan(2, &mut rng(8)));
    }

    #[test]
    fn expressions_are_finite() {
        let mut r = rng(11);
        let p = crate::symexpr::Point::new(0.7, vec![-0.4, 2.5], vec![1.5, -3.0]);
        for _ in 0..200 {
            let e = expression(&mut r, 2, 4);
            assert!(e.eval::<f64>(&p).unwrap().is_finite(), "{e}");
        }
    }

    #[test]
    fn polynomial_degree_and_range() {
        let mut r = rng(1);
        for _ in 0..50 {
            let p = polynomial(&mut r, &Coord::all(2));
            for v in Coord::all(2) {
                assert!(p.diff(v).diff(v).diff(v).is_zero());
            }
        }
    }
}
