use crate::curvtors::{curvature_table_with, torsion_table, CurvatureTable, TorsionTable};
use crate::dconnect::{cov_deriv, DConnectError, DTensor, Direction, GammaConnection, IndexSlot, SlotKind};
use crate::symexpr::Expr;
use IndexSlot::*;

use super::{deflections, Deflections, IdentityError, ResidualTensor};

pub fn ricci_names() -> Vec<String> {
    Direction::ALL.iter().flat_map(|d| (1..=5).map(move |k| format!("Ricci-{}-{k}", d.name()))).collect()
}

fn contract(n: usize, f: impl Fn(usize) -> Expr) -> Expr {
    Expr::sum((0..n).map(f).collect())
}

/// First derivatives of a d-vector field.
struct Firsts {
    t: DTensor,
    s: DTensor,
    v: DTensor,
}

/// The five commutation residuals for a d-vector field `w` with one upper
/// slot. `curvature` adds the `Xʳ R^i_r…` terms (absent for a time-upper
/// field).
fn ricci_block(
    block: &str,
    conn: &GammaConnection,
    tors: &TorsionTable,
    curv: &CurvatureTable,
    w: &DTensor,
    firsts: &Firsts,
    curvature: bool,
) -> Vec<ResidualTensor> {
    let n = conn.dim();
    let up = w.signature()[0];
    let Firsts { t: w_t, s: w_s, v: w_v } = firsts;
    let w_ts = cov_deriv(w_t, conn, Direction::Spatial);
    let w_st = cov_deriv(w_s, conn, Direction::Temporal);
    let w_ss = cov_deriv(w_s, conn, Direction::Spatial);
    let w_tv = cov_deriv(w_t, conn, Direction::Vertical);
    let w_vt = cov_deriv(w_v, conn, Direction::Temporal);
    let w_sv = cov_deriv(w_s, conn, Direction::Vertical);
    let w_vs = cov_deriv(w_v, conn, Direction::Spatial);
    let w_vv = cov_deriv(w_v, conn, Direction::Vertical);
    let ext = up.extent(n);
    let curv_term = |i: usize, table: &DTensor, tail: &[usize]| -> Expr {
        if !curvature {
            return Expr::zero();
        }
        contract(ext, |r| {
            let mut ix = vec![i, r];
            ix.extend_from_slice(tail);
            w.get(&[r]) * table.get(&ix)
        })
    };
    let build = |k: usize, sig: Vec<IndexSlot>, f: &dyn Fn(&[usize]) -> (Expr, Expr)| {
        let mut lhs = DTensor::zeros(sig.clone(), n);
        let mut rhs = DTensor::zeros(sig, n);
        for ix in lhs.indices().collect::<Vec<_>>() {
            let (l, r) = f(&ix);
            lhs.set(&ix, l);
            rhs.set(&ix, r);
        }
        ResidualTensor::from_dtensors(format!("Ricci-{block}-{k}"), lhs, rhs)
    };
    vec![
        build(1, vec![up, SpaceLower], &|ix| {
            let (i, k) = (ix[0], ix[1]);
            let lhs = w_ts.get(&[i, 0, k]) - w_st.get(&[i, k, 0]);
            let rhs = Expr::sum(vec![
                curv_term(i, &curv.r_i1k, &[0, k]),
                -contract(n, |r| w_s.get(&[i, r]) * tors.t_1j.get(&[r, 0, k])),
                -contract(n, |r| w_v.get(&[i, r]) * tors.r_1j.get(&[r, 0, k])),
            ]);
            (lhs, rhs)
        }),
        build(2, vec![up, SpaceLower, SpaceLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = w_ss.get(&[i, j, k]) - w_ss.get(&[i, k, j]);
            let rhs =
                curv_term(i, &curv.r_ijk, &[j, k]) - contract(n, |r| w_v.get(&[i, r]) * tors.r_ij.get(&[r, j, k]));
            (lhs, rhs)
        }),
        build(3, vec![up, FiberLower], &|ix| {
            let (i, k) = (ix[0], ix[1]);
            let lhs = w_tv.get(&[i, 0, k]) - w_vt.get(&[i, k, 0]);
            let rhs =
                curv_term(i, &curv.p_i1k, &[0, k]) - contract(n, |r| w_v.get(&[i, r]) * tors.p_1j.get(&[r, 0, k]));
            (lhs, rhs)
        }),
        build(4, vec![up, SpaceLower, FiberLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = w_sv.get(&[i, j, k]) - w_vs.get(&[i, k, j]);
            let rhs = Expr::sum(vec![
                curv_term(i, &curv.p_ijk, &[j, k]),
                -contract(n, |r| w_s.get(&[i, r]) * conn.c(r, j, k)),
                -contract(n, |r| w_v.get(&[i, r]) * tors.pv_ij.get(&[r, j, k])),
            ]);
            (lhs, rhs)
        }),
        build(5, vec![up, FiberLower, FiberLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = w_vv.get(&[i, j, k]) - w_vv.get(&[i, k, j]);
            (lhs, curv_term(i, &curv.s_ijk, &[j, k]))
        }),
    ]
}

fn check_field(x: &DTensor, slot: IndexSlot, n: usize) -> Result<(), DConnectError> {
    if x.signature() != [slot] || x.dim() != n {
        return Err(DConnectError::Signature(format!("vector field must be [{slot}] in dimension {n}")));
    }
    Ok(())
}

/// The fifteen Ricci identities for `X = (X¹, Xⁱ, X⁽ⁱ⁾₍₁₎)`, blocks
/// `hR`, `hM`, `v` in that order.
pub fn ricci_residuals(conn: &GammaConnection, x: &[DTensor; 3]) -> Result<Vec<ResidualTensor>, DConnectError> {
    let tors = torsion_table(conn)?;
    let curv = curvature_table_with(conn, &tors)?;
    ricci_residuals_with(conn, &tors, &curv, x)
}

pub fn ricci_residuals_with(
    conn: &GammaConnection,
    tors: &TorsionTable,
    curv: &CurvatureTable,
    x: &[DTensor; 3],
) -> Result<Vec<ResidualTensor>, DConnectError> {
    let n = conn.dim();
    let mut out = Vec::with_capacity(15);
    for (w, dir) in x.iter().zip(Direction::ALL) {
        let slot = match dir {
            Direction::Temporal => TimeUpper,
            Direction::Spatial => SpaceUpper,
            Direction::Vertical => FiberUpper,
        };
        check_field(w, slot, n)?;
        let firsts = Firsts {
            t: cov_deriv(w, conn, Direction::Temporal),
            s: cov_deriv(w, conn, Direction::Spatial),
            v: cov_deriv(w, conn, Direction::Vertical),
        };
        let curvature = slot.kind() != SlotKind::Time;
        out.extend(ricci_block(dir.name(), conn, tors, curv, w, &firsts, curvature));
    }
    Ok(out)
}

/// Ricci residuals for several fields, each identity stacked over the fields.
pub fn ricci_residuals_many(
    conn: &GammaConnection,
    tors: &TorsionTable,
    curv: &CurvatureTable,
    fields: &[[DTensor; 3]],
) -> Result<Vec<ResidualTensor>, DConnectError> {
    let mut per_field = Vec::with_capacity(fields.len());
    for x in fields {
        per_field.push(ricci_residuals_with(conn, tors, curv, x)?);
    }
    Ok((0..15).map(|k| super::stack(per_field.iter().map(|v| v[k].clone()).collect())).collect())
}

/// The five deflection identities.
pub fn deflection_identity_residuals(conn: &GammaConnection) -> Result<Vec<ResidualTensor>, IdentityError> {
    let tors = torsion_table(conn)?;
    let curv = curvature_table_with(conn, &tors)?;
    deflection_identity_residuals_with(conn, &tors, &curv)
}

pub fn deflection_identity_residuals_with(
    conn: &GammaConnection,
    tors: &TorsionTable,
    curv: &CurvatureTable,
) -> Result<Vec<ResidualTensor>, IdentityError> {
    let n = conn.dim();
    let Deflections { d_bar, d, d_v } = deflections(conn)?;
    let y = |r: usize| Expr::y(r);
    let build = |k: usize, sig: Vec<IndexSlot>, f: &dyn Fn(&[usize]) -> (Expr, Expr)| {
        let mut lhs = DTensor::zeros(sig.clone(), n);
        let mut rhs = DTensor::zeros(sig, n);
        for ix in lhs.indices().collect::<Vec<_>>() {
            let (l, r) = f(&ix);
            lhs.set(&ix, l);
            rhs.set(&ix, r);
        }
        ResidualTensor::from_dtensors(format!("Defl-{k}"), lhs, rhs)
    };
    let db_s = cov_deriv(&d_bar, conn, Direction::Spatial);
    let db_v = cov_deriv(&d_bar, conn, Direction::Vertical);
    let d_t = cov_deriv(&d, conn, Direction::Temporal);
    let d_s = cov_deriv(&d, conn, Direction::Spatial);
    let d_vd = cov_deriv(&d, conn, Direction::Vertical);
    let dv_t = cov_deriv(&d_v, conn, Direction::Temporal);
    let dv_s = cov_deriv(&d_v, conn, Direction::Spatial);
    let dv_v = cov_deriv(&d_v, conn, Direction::Vertical);
    Ok(vec![
        build(1, vec![FiberUpper, SpaceLower], &|ix| {
            let (i, k) = (ix[0], ix[1]);
            let lhs = db_s.get(&[i, 0, k]) - d_t.get(&[i, k, 0]);
            let rhs = Expr::sum(vec![
                contract(n, |r| y(r) * curv.r_i1k.get(&[i, r, 0, k])),
                -contract(n, |r| d.get(&[i, r]) * tors.t_1j.get(&[r, 0, k])),
                -contract(n, |r| d_v.get(&[i, r]) * tors.r_1j.get(&[r, 0, k])),
            ]);
            (lhs, rhs)
        }),
        build(2, vec![FiberUpper, SpaceLower, SpaceLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = d_s.get(&[i, j, k]) - d_s.get(&[i, k, j]);
            let rhs = contract(n, |r| y(r) * curv.r_ijk.get(&[i, r, j, k]))
                - contract(n, |r| d_v.get(&[i, r]) * tors.r_ij.get(&[r, j, k]));
            (lhs, rhs)
        }),
        build(3, vec![FiberUpper, FiberLower], &|ix| {
            let (i, k) = (ix[0], ix[1]);
            let lhs = db_v.get(&[i, 0, k]) - dv_t.get(&[i, k, 0]);
            let rhs = contract(n, |r| y(r) * curv.p_i1k.get(&[i, r, 0, k]))
                - contract(n, |r| d_v.get(&[i, r]) * tors.p_1j.get(&[r, 0, k]));
            (lhs, rhs)
        }),
        build(4, vec![FiberUpper, SpaceLower, FiberLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = d_vd.get(&[i, j, k]) - dv_s.get(&[i, k, j]);
            let rhs = Expr::sum(vec![
                contract(n, |r| y(r) * curv.p_ijk.get(&[i, r, j, k])),
                -contract(n, |r| d.get(&[i, r]) * conn.c(r, j, k)),
                -contract(n, |r| d_v.get(&[i, r]) * tors.pv_ij.get(&[r, j, k])),
            ]);
            (lhs, rhs)
        }),
        build(5, vec![FiberUpper, FiberLower, FiberLower], &|ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let lhs = dv_v.get(&[i, j, k]) - dv_v.get(&[i, k, j]);
            (lhs, contract(n, |r| y(r) * curv.s_ijk.get(&[i, r, j, k])))
        }),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::berwald;
    use crate::geometry::{SpatialMetric, TemporalMetric};
    use crate::identities::liouville;
    use crate::random::{random_vector_fields, rng};

    #[test]
    fn flat_residuals_vanish() {
        let conn = berwald(&TemporalMetric::flat(), &SpatialMetric::identity(2));
        let x = random_vector_fields(2, &mut rng(3));
        let res = ricci_residuals(&conn, &x).unwrap();
        assert_eq!(res.len(), 15);
        assert_eq!(res[7].name, "Ricci-hM-3");
        assert!(res.iter().all(ResidualTensor::vanishes_symbolically));
        let defl = deflection_identity_residuals(&conn).unwrap();
        assert!(defl.iter().all(ResidualTensor::vanishes_symbolically));
    }

    #[test]
    fn vertical_block_on_liouville_is_deflection_identities() {
        let h = TemporalMetric::new(Expr::one() + Expr::t().square()).unwrap();
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        let conn = berwald(&h, &phi);
        let n = 2;
        let x = [DTensor::zeros(vec![TimeUpper], n), DTensor::zeros(vec![SpaceUpper], n), liouville(n)];
        let ricci = ricci_residuals(&conn, &x).unwrap();
        let defl = deflection_identity_residuals(&conn).unwrap();
        for (r, d) in ricci[10..].iter().zip(&defl) {
            for (a, b) in r.difference().iter().zip(d.difference()) {
                assert!((a - &b).simplify().is_zero(), "{} vs {}", r.name, d.name);
            }
        }
    }

    #[test]
    fn rejects_misshapen_field() {
        let conn = berwald(&TemporalMetric::flat(), &SpatialMetric::identity(2));
        let x = [liouville(2), liouville(2), liouville(2)];
        assert!(ricci_residuals(&conn, &x).is_err());
    }
}
