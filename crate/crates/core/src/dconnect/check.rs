use crate::geometry::TemporalMetric;
use crate::identities::{verify, IdentityError, ResidualTensor, SamplingPlan, VerificationReport};
use crate::symexpr::Expr;

use super::{cov_deriv, h_normalization, DTensor, Direction, GammaConnection, SlotKind};

/// Residuals of the defining conditions `Ḡ = κ`, `L̄ = 0`, `C̄ = 0` and
/// `∇J = 0` in the three directions.
pub fn h_normal_residuals(conn: &GammaConnection, h: &TemporalMetric) -> Vec<ResidualTensor> {
    let n = conn.dim();
    let kappa = crate::geometry::temporal_christoffel(h).kappa;
    let g_bar = conn.family(Direction::Temporal, SlotKind::Time).clone();
    let kappa_t = DTensor::from_vec(g_bar.signature().to_vec(), n, vec![kappa]);
    let zero_like = |d: &DTensor| DTensor::zeros(d.signature().to_vec(), n);
    let mut out = vec![ResidualTensor::from_dtensors("hnormal-Gbar", g_bar, kappa_t)];
    for (name, dir) in [("hnormal-Lbar", Direction::Spatial), ("hnormal-Cbar", Direction::Vertical)] {
        let f = conn.family(dir, SlotKind::Time).clone();
        let z = zero_like(&f);
        out.push(ResidualTensor::from_dtensors(name, f, z));
    }
    let j = h_normalization(h, n);
    for dir in Direction::ALL {
        let d = cov_deriv(&j, conn, dir);
        let z = zero_like(&d);
        out.push(ResidualTensor::from_dtensors(format!("hnormal-J-{}", dir.name()), d, z));
    }
    out
}

/// Samples the h-normality conditions of `conn` with respect to `h`.
pub fn check_h_normal(
    conn: &GammaConnection,
    h: &TemporalMetric,
    plan: &SamplingPlan,
) -> Result<VerificationReport, IdentityError> {
    verify(&h_normal_residuals(conn, h), plan)
}

/// The six relations tying the nine families of an h-normal connection to
/// its four effective components, each checked as an exact expression array:
/// `Ḡ = κ`, `L̄ = 0`, `C̄ = 0`, `G⁽ᵏ⁾ᵢ = Gᵏᵢ − δᵏᵢκ`, `L⁽ᵏ⁾ᵢⱼ = Lᵏᵢⱼ`,
/// `C⁽ᵏ⁾ᵢⱼ = Cᵏᵢⱼ`.
pub fn h_normal_relations(conn: &GammaConnection) -> Vec<(&'static str, bool)> {
    let Some(info) = conn.h_normal() else {
        return Vec::new();
    };
    let same = |a: &Expr, b: &Expr| a == b || (a - b).simplify().is_zero();
    let fam = |d, k| conn.family(d, k);
    let (t, s, v) = (Direction::Temporal, Direction::Spatial, Direction::Vertical);
    let all = |a: &DTensor, f: &dyn Fn(&[usize], &Expr) -> bool| a.indices().all(|ix| f(&ix, a.get(&ix)));
    let g = fam(t, SlotKind::Space);
    let l = fam(s, SlotKind::Space);
    let c = fam(v, SlotKind::Space);
    let arrays_equal = |a: &DTensor, b: &DTensor| a.components().iter().zip(b.components()).all(|(x, y)| same(x, y));
    vec![
        ("Gbar = kappa", same(conn.g_bar(), &info.kappa)),
        ("Lbar = 0", fam(s, SlotKind::Time).components().iter().all(Expr::is_zero)),
        ("Cbar = 0", fam(v, SlotKind::Time).components().iter().all(Expr::is_zero)),
        (
            "Gv = G - delta kappa",
            all(fam(t, SlotKind::Fiber), &|ix, e| {
                let expect = if ix[0] == ix[1] { g.get(ix) - &info.kappa } else { g.get(ix).clone() };
                same(e, &expect)
            }),
        ),
        ("Lv = L", arrays_equal(fam(s, SlotKind::Fiber), l)),
        ("Cv = C", arrays_equal(fam(v, SlotKind::Fiber), c)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::berwald;
    use crate::geometry::{NonlinearConnection, SpatialMetric};
    use crate::identities::Verdict;
    use crate::random::{random_cartan, rng};
    use crate::symexpr::parse_expr;

    #[test]
    fn berwald_is_exactly_h_normal() {
        let h = TemporalMetric::new(parse_expr("exp(2*t) + t^2", 1).unwrap()).unwrap();
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        let conn = berwald(&h, &phi);
        assert!(h_normal_residuals(&conn, &h).iter().all(ResidualTensor::vanishes_symbolically));
        let rep = check_h_normal(&conn, &h, &SamplingPlan::new(1, 20)).unwrap();
        assert!(rep.identities.iter().all(|r| r.max_abs == 0.0));
        assert!(h_normal_relations(&conn).iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn nonzero_lbar_fails() {
        let mut conn = GammaConnection::zero(NonlinearConnection::zero(2));
        let lbar = conn.family_mut(Direction::Spatial, SlotKind::Time);
        for ix in lbar.indices().collect::<Vec<_>>() {
            lbar.set(&ix, Expr::one());
        }
        let rep = check_h_normal(&conn, &TemporalMetric::flat(), &SamplingPlan::new(1, 10)).unwrap();
        let r = rep.get("hnormal-Lbar").unwrap();
        assert_eq!(r.max_abs, 1.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(h_normal_relations(&conn).is_empty());
    }

    #[test]
    fn random_construction_is_h_normal() {
        for seed in 0..4 {
            let conn = random_cartan(2, &mut rng(seed));
            let h = conn.h_normal().unwrap().h.clone();
            let rep = check_h_normal(&conn, &h, &SamplingPlan::new(seed, 30).with_tol(1e-10, 1e-10)).unwrap();
            assert!(rep.identities.iter().all(|r| r.max_abs < 1e-10), "{seed}");
            assert!(h_normal_relations(&conn).iter().all(|(_, ok)| *ok));
        }
    }
}
