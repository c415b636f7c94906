use crate::geometry::FrameIndex;
use crate::symexpr::Expr;

use super::{DTensor, Direction, GammaConnection};

fn frame_index(dir: Direction, p: usize) -> FrameIndex {
    match dir {
        Direction::Temporal => FrameIndex::Time,
        Direction::Spatial => FrameIndex::Space(p),
        Direction::Vertical => FrameIndex::Fiber(p),
    }
}

/// Covariant derivative of `d` in direction `dir`.
///
/// The result has the signature of `d` with one lower slot appended (time,
/// space, or fiber according to `dir`) that indexes the derivative
/// direction `p`. Each component is the frame derivative of the matching
/// component of `d` plus one correction per slot: `+` with the family
/// entry `F[slot][r][p]` for upper slots, `−` with `F[r][slot][p]` for lower
/// ones, where `F` is the family of `∇` belonging to the slot's kind and
/// `dir`.
pub fn cov_deriv(d: &DTensor, conn: &GammaConnection, dir: Direction) -> DTensor {
    let n = d.dim();
    assert_eq!(n, conn.dim(), "tensor and connection dimensions differ");
    let rank = d.rank();
    let sig = d.signature().to_vec();
    let families: Vec<&DTensor> = sig.iter().map(|s| conn.family(dir, s.kind())).collect();
    let mut out_sig = sig.clone();
    out_sig.push(dir.slot());
    let nlc = conn.nlc();
    DTensor::from_fn(out_sig, n, |idx| {
        let (base, p) = (&idx[..rank], idx[rank]);
        let mut terms = vec![nlc.frame_derivative(frame_index(dir, p), d.get(base))];
        let mut moved = base.to_vec();
        for (s, slot) in sig.iter().enumerate() {
            let fam = families[s];
            for r in 0..slot.extent(n) {
                moved[s] = r;
                let comp = d.get(&moved);
                if comp.is_zero() {
                    continue;
                }
                if slot.is_upper() {
                    let coef = fam.get(&[base[s], r, p]);
                    if !coef.is_zero() {
                        terms.push(comp * coef);
                    }
                } else {
                    let coef = fam.get(&[r, base[s], p]);
                    if !coef.is_zero() {
                        terms.push(-(comp * coef));
                    }
                }
            }
            moved[s] = base[s];
        }
        Expr::sum(terms)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::{berwald, h_normalization, IndexSlot::*};
    use crate::geometry::{SpatialMetric, TemporalMetric};
    use crate::symexpr::{parse_expr, Coord};

    #[test]
    fn flat_berwald_is_plain_derivative() {
        let conn = berwald(&TemporalMetric::flat(), &SpatialMetric::identity(2));
        let d = DTensor::from_fn(vec![SpaceUpper, FiberLower, TimeUpper], 2, |ix| {
            parse_expr(&format!("t*x{}^2 + y{}*x2", ix[0] + 1, ix[1] + 1), 2).unwrap()
        });
        for dir in Direction::ALL {
            let cd = cov_deriv(&d, &conn, dir);
            for idx in cd.indices() {
                let v = match dir {
                    Direction::Temporal => Coord::Time,
                    Direction::Spatial => Coord::Space(idx[3]),
                    Direction::Vertical => Coord::Fiber(idx[3]),
                };
                assert_eq!(*cd.get(&idx), d.get(&idx[..3]).diff(v), "{dir:?} {idx:?}");
            }
        }
    }

    #[test]
    fn normalization_is_parallel() {
        let h = TemporalMetric::new(parse_expr("exp(2*t) + t^2", 1).unwrap()).unwrap();
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        let conn = berwald(&h, &phi);
        let j = h_normalization(&h, 2);
        for dir in Direction::ALL {
            let cd = cov_deriv(&j, &conn, dir);
            for e in cd.components() {
                assert!(e.simplify().is_zero(), "{dir:?}: {e}");
            }
        }
    }
}
