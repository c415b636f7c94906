use jetcartan::dconnect::{cov_deriv, h_normal_relations, h_normalization, DTensor, Direction, IndexSlot};
use jetcartan::random::{polynomial, random_cartan, rng};
use jetcartan::{Coord, Expr, Point};
use proptest::prelude::*;
use rand::Rng;
use IndexSlot::*;

const N: usize = 2;

fn random_tensor(r: &mut impl Rng, sig: Vec<IndexSlot>) -> DTensor {
    DTensor::from_fn(sig, N, |_| polynomial(r, &Coord::all(N)))
}

fn sample(r: &mut impl Rng) -> Point<f64> {
    let mut u = || r.gen_range(-1.0..1.0);
    Point::new(u(), vec![u(), u()], vec![u(), u()])
}

fn close(a: &Expr, b: &Expr, p: &Point<f64>) -> bool {
    let (x, y) = (a.eval::<f64>(p).unwrap(), b.eval::<f64>(p).unwrap());
    (x - y).abs() <= 1e-9 * (1.0 + x.abs() + y.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariant_derivative_is_linear(seed in any::<u64>(), dir in 0usize..3) {
        let mut r = rng(seed);
        let conn = random_cartan(N, &mut r);
        let sig = vec![SpaceUpper, FiberLower, TimeLower];
        let (a, b) = (random_tensor(&mut r, sig.clone()), random_tensor(&mut r, sig));
        let lambda = Expr::ratio(r.gen_range(-8..8), 3);
        let combo = a.zip_with(&b, |x, y| x + &(&lambda * y));
        let dir = Direction::ALL[dir];
        let lhs = cov_deriv(&combo, &conn, dir);
        let (da, db) = (cov_deriv(&a, &conn, dir), cov_deriv(&b, &conn, dir));
        for _ in 0..5 {
            let p = sample(&mut r);
            for ix in lhs.indices() {
                let rhs = da.get(&ix) + &(&lambda * db.get(&ix));
                prop_assert!(close(lhs.get(&ix), &rhs, &p));
            }
        }
    }

    #[test]
    fn covariant_derivative_obeys_leibniz(seed in any::<u64>(), dir in 0usize..3) {
        let mut r = rng(seed);
        let conn = random_cartan(N, &mut r);
        let a = random_tensor(&mut r, vec![SpaceUpper, FiberLower]);
        let b = random_tensor(&mut r, vec![TimeUpper, SpaceLower]);
        let dir = Direction::ALL[dir];
        let lhs = cov_deriv(&a.tensor(&b), &conn, dir);
        let (da, db) = (cov_deriv(&a, &conn, dir), cov_deriv(&b, &conn, dir));
        for _ in 0..5 {
            let p = sample(&mut r);
            for ix in lhs.indices() {
                let (ia, ib, q) = (&ix[0..2], &ix[2..4], ix[4]);
                let rhs = da.get(&[ia[0], ia[1], q]) * b.get(ib) + a.get(ia) * db.get(&[ib[0], ib[1], q]);
                prop_assert!(close(lhs.get(&ix), &rhs, &p));
            }
        }
    }

    #[test]
    fn normalization_parallel_for_random_h_normal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let conn = random_cartan(N, &mut r);
        let h = conn.h_normal().unwrap().h.clone();
        let j = h_normalization(&h, N);
        for dir in Direction::ALL {
            for e in cov_deriv(&j, &conn, dir).components() {
                for _ in 0..4 {
                    let v = e.eval::<f64>(&sample(&mut r)).unwrap();
                    prop_assert!(v.abs() < 1e-10);
                }
            }
        }
        prop_assert!(h_normal_relations(&conn).iter().all(|(_, ok)| *ok));
    }
}

#[test]
fn asymmetric_l_names_triple() {
    use jetcartan::dconnect::{make_h_normal_cartan, DConnectError, HNormalData};
    use jetcartan::geometry::{NonlinearConnection, TemporalMetric};
    let l = DTensor::from_fn(vec![SpaceUpper, SpaceLower, SpaceLower], 2, |ix| {
        if ix == [0, 0, 1] {
            Expr::x(0)
        } else {
            Expr::zero()
        }
    });
    let data = HNormalData::new(
        TemporalMetric::flat(),
        DTensor::zeros(vec![SpaceUpper, SpaceLower, TimeLower], 2),
        l,
        DTensor::zeros(vec![SpaceUpper, SpaceLower, FiberLower], 2),
    )
    .unwrap();
    let err = make_h_normal_cartan(data, NonlinearConnection::zero(2)).unwrap_err();
    assert_eq!(err, DConnectError::NotCartan { family: "L", k: 0, i: 0, j: 1 });
    assert!(err.to_string().contains("(1, 1, 2)"));
}
