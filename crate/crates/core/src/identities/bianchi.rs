//! The nineteen adapted Bianchi identities of an h-normal connection of
//! Cartan type, and the two frame-indexed general identities that arbitrate
//! them.
//!
//! Derivative conventions: `∇` of a table entry appends the derivative slot
//! last, so `T^l_{1j|k}` is `∇ₛT₁[l, 0, j, k]` and `R^l_{pjk/1}` is
//! `∇ₜR[l, p, j, k, 0]`.

use crate::curvtors::{
    curvature_table_with, torsion_table, CurvatureTable, FrameConnection, FrameTensor, TorsionTable,
};
use crate::dconnect::{cov_deriv, DConnectError, DTensor, Direction, GammaConnection, IndexSlot, SlotKind};
use crate::symexpr::Expr;
use IndexSlot::*;

use super::{cyclic, swapped, ResidualTensor};

/// Identities that carry a star in the printed list.
pub const BIANCHI_STARRED: [usize; 11] = [2, 4, 6, 8, 9, 11, 12, 14, 16, 18, 19];

pub const GENERAL_BIANCHI_NAMES: [&str; 2] = ["GenBianchi-1", "GenBianchi-2"];

fn name(k: usize) -> String {
    format!("Bianchi-{k:02}")
}

fn contract(n: usize, f: impl Fn(usize) -> Expr) -> Expr {
    Expr::sum((0..n).map(f).collect())
}

fn build(sig: Vec<IndexSlot>, n: usize, f: impl Fn(&[usize]) -> Expr) -> DTensor {
    DTensor::from_fn(sig, n, f)
}

/// `𝒜_{a,b}{F} = 0`, split as `F = F∘swap`.
fn alternating_zero(k: usize, f: DTensor, a: usize, b: usize) -> ResidualTensor {
    let s = swapped(&f, a, b);
    ResidualTensor::from_dtensors(name(k), f, s)
}

/// `𝒜_{a,b}{F} = rhs`.
fn alternating_eq(k: usize, f: DTensor, a: usize, b: usize, rhs: DTensor) -> ResidualTensor {
    let s = swapped(&f, a, b);
    ResidualTensor::from_dtensors(name(k), f.zip_with(&s, |x, y| x - y), rhs)
}

/// `Σ_{a,b,c}{F} = 0`, split as `F = −(the two shifted terms)`.
fn cyclic_zero(k: usize, f: DTensor, a: usize, b: usize, c: usize) -> ResidualTensor {
    let full = cyclic(&f, a, b, c);
    let rhs = f.zip_with(&full, |x, s| x - s);
    ResidualTensor::from_dtensors(name(k), f, rhs)
}

/// Every covariant derivative the printed identities use.
struct Derivs {
    t1_s: DTensor,
    t1_v: DTensor,
    r1_s: DTensor,
    r1_v: DTensor,
    rij_t: DTensor,
    rij_s: DTensor,
    rij_v: DTensor,
    p1_s: DTensor,
    p1_v: DTensor,
    pv_t: DTensor,
    pv_s: DTensor,
    pv_v: DTensor,
    c_t: DTensor,
    c_s: DTensor,
    c_v: DTensor,
    ri1k_s: DTensor,
    ri1k_v: DTensor,
    rijk_t: DTensor,
    rijk_s: DTensor,
    rijk_v: DTensor,
    pi1k_s: DTensor,
    pi1k_v: DTensor,
    pijk_t: DTensor,
    pijk_s: DTensor,
    pijk_v: DTensor,
    s_t: DTensor,
    s_s: DTensor,
    s_v: DTensor,
}

impl Derivs {
    fn new(conn: &GammaConnection, tors: &TorsionTable, curv: &CurvatureTable) -> Derivs {
        let d = |x: &DTensor, dir| cov_deriv(x, conn, dir);
        let (t, s, v) = (Direction::Temporal, Direction::Spatial, Direction::Vertical);
        let c = conn.family(Direction::Vertical, SlotKind::Space);
        Derivs {
            t1_s: d(&tors.t_1j, s),
            t1_v: d(&tors.t_1j, v),
            r1_s: d(&tors.r_1j, s),
            r1_v: d(&tors.r_1j, v),
            rij_t: d(&tors.r_ij, t),
            rij_s: d(&tors.r_ij, s),
            rij_v: d(&tors.r_ij, v),
            p1_s: d(&tors.p_1j, s),
            p1_v: d(&tors.p_1j, v),
            pv_t: d(&tors.pv_ij, t),
            pv_s: d(&tors.pv_ij, s),
            pv_v: d(&tors.pv_ij, v),
            c_t: d(c, t),
            c_s: d(c, s),
            c_v: d(c, v),
            ri1k_s: d(&curv.r_i1k, s),
            ri1k_v: d(&curv.r_i1k, v),
            rijk_t: d(&curv.r_ijk, t),
            rijk_s: d(&curv.r_ijk, s),
            rijk_v: d(&curv.r_ijk, v),
            pi1k_s: d(&curv.p_i1k, s),
            pi1k_v: d(&curv.p_i1k, v),
            pijk_t: d(&curv.p_ijk, t),
            pijk_s: d(&curv.p_ijk, s),
            pijk_v: d(&curv.p_ijk, v),
            s_t: d(&curv.s_ijk, t),
            s_s: d(&curv.s_ijk, s),
            s_v: d(&curv.s_ijk, v),
        }
    }
}

/// The nineteen printed identities, `Bianchi-01` … `Bianchi-19`.
pub fn bianchi_residuals(conn: &GammaConnection) -> Result<Vec<ResidualTensor>, DConnectError> {
    let tors = torsion_table(conn)?;
    let curv = curvature_table_with(conn, &tors)?;
    bianchi_residuals_with(conn, &tors, &curv)
}

pub fn bianchi_residuals_with(
    conn: &GammaConnection,
    tors: &TorsionTable,
    curv: &CurvatureTable,
) -> Result<Vec<ResidualTensor>, DConnectError> {
    conn.require_h_normal()?;
    let n = conn.dim();
    let d = Derivs::new(conn, tors, curv);
    let c = |l: usize, i: usize, j: usize| conn.c(l, i, j).clone();
    let t1 = |r: usize, j: usize| tors.t_1j.get(&[r, 0, j]).clone();
    let r1 = |r: usize, j: usize| tors.r_1j.get(&[r, 0, j]).clone();
    let rij = |r: usize, i: usize, j: usize| tors.r_ij.get(&[r, i, j]).clone();
    let p1 = |r: usize, j: usize| tors.p_1j.get(&[r, 0, j]).clone();
    let pv = |r: usize, i: usize, j: usize| tors.pv_ij.get(&[r, i, j]).clone();
    let ri1k = |l: usize, i: usize, k: usize| curv.r_i1k.get(&[l, i, 0, k]).clone();
    let rijk = |l: usize, i: usize, j: usize, k: usize| curv.r_ijk.get(&[l, i, j, k]).clone();
    let pi1k = |l: usize, i: usize, k: usize| curv.p_i1k.get(&[l, i, 0, k]).clone();
    let pijk = |l: usize, i: usize, j: usize, k: usize| curv.p_ijk.get(&[l, i, j, k]).clone();
    let sijk = |l: usize, i: usize, j: usize, k: usize| curv.s_ijk.get(&[l, i, j, k]).clone();
    let g = |t: &DTensor, ix: &[usize]| t.get(ix).clone();

    let mut out = Vec::with_capacity(19);

    // 1. 𝒜_{j,k}{R^l_{j1k} + T^l_{1j|k} + R^(r)_{1j} C^l_{k(r)}} = 0
    let f = build(vec![SpaceUpper, SpaceLower, SpaceLower], n, |ix| {
        let (l, j, k) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![ri1k(l, j, k), g(&d.t1_s, &[l, 0, j, k]), contract(n, |r| r1(r, j) * c(l, k, r))])
    });
    out.push(alternating_zero(1, f, 1, 2));

    // 2*. Σ_{i,j,k}{R^l_{ijk} − R^(r)_{ij} C^l_{k(r)}} = 0
    let f = build(vec![SpaceUpper, SpaceLower, SpaceLower, SpaceLower], n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        rijk(l, i, j, k) - contract(n, |r| rij(r, i, j) * c(l, k, r))
    });
    out.push(cyclic_zero(2, f, 1, 2, 3));

    // 3. 𝒜_{j,k}{R^(l)_{1j|k} + T^r_{1j} R^(l)_{kr} + R^(r)_{1j} P^(l)_{k(r)}}
    //      = −R^(l)_{jk/1} − R^(r)_{jk} P^(l)_{1(r)}
    let sig = vec![FiberUpper, SpaceLower, SpaceLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, j, k) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![
            g(&d.r1_s, &[l, 0, j, k]),
            contract(n, |r| t1(r, j) * rij(l, k, r)),
            contract(n, |r| r1(r, j) * pv(l, k, r)),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, j, k) = (ix[0], ix[1], ix[2]);
        -g(&d.rij_t, &[l, j, k, 0]) - contract(n, |r| rij(r, j, k) * p1(l, r))
    });
    out.push(alternating_eq(3, f, 1, 2, rhs));

    // 4*. Σ_{i,j,k}{R^(l)_{ij|k} + R^(r)_{ij} P^(l)_{k(r)}} = 0
    let f = build(vec![FiberUpper, SpaceLower, SpaceLower, SpaceLower], n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        g(&d.rij_s, &[l, i, j, k]) + contract(n, |r| rij(r, i, j) * pv(l, k, r))
    });
    out.push(cyclic_zero(4, f, 1, 2, 3));

    // 5. T^l_{1k}|(p) − C^l_{r(p)} T^r_{1k} + P^l_{k1(p)} + C^l_{k(p)/1}
    //      + C^r_{k(p)} T^l_{1r} − C^l_{k(r)} P^(r)_{1(p)} = 0
    let sig = vec![SpaceUpper, SpaceLower, FiberLower];
    let lhs = build(sig.clone(), n, |ix| {
        let (l, k, p) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![g(&d.t1_v, &[l, 0, k, p]), pi1k(l, k, p), g(&d.c_t, &[l, k, p, 0])])
    });
    let rhs = build(sig, n, |ix| {
        let (l, k, p) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![
            contract(n, |r| c(l, r, p) * t1(r, k)),
            -contract(n, |r| c(r, k, p) * t1(l, r)),
            contract(n, |r| c(l, k, r) * p1(r, p)),
        ])
    });
    out.push(ResidualTensor::from_dtensors(name(5), lhs, rhs));

    // 6*. 𝒜_{j,k}{C^l_{j(p)|k} + C^l_{k(r)} P^(r)_{j(p)} + P^l_{jk(p)}} = 0
    let f = build(vec![SpaceUpper, SpaceLower, SpaceLower, FiberLower], n, |ix| {
        let (l, j, k, p) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![g(&d.c_s, &[l, j, p, k]), contract(n, |r| c(l, k, r) * pv(r, j, p)), pijk(l, j, k, p)])
    });
    out.push(alternating_zero(6, f, 1, 2));

    // 7. P^(l)_{1(p)|k} − P^(l)_{k(p)/1} + P^(l)_{k(r)} P^(r)_{1(p)} − P^(l)_{1(r)} P^(r)_{k(p)}
    //      = R^(l)_{1k}|(p) − R^l_{p1k} + R^(l)_{1r} C^r_{k(p)} − T^r_{1k} P^(l)_{r(p)}
    let sig = vec![FiberUpper, SpaceLower, FiberLower];
    let lhs = build(sig.clone(), n, |ix| {
        let (l, k, p) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![
            g(&d.p1_s, &[l, 0, p, k]),
            -g(&d.pv_t, &[l, k, p, 0]),
            contract(n, |r| pv(l, k, r) * p1(r, p)),
            -contract(n, |r| p1(l, r) * pv(r, k, p)),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, k, p) = (ix[0], ix[1], ix[2]);
        Expr::sum(vec![
            g(&d.r1_v, &[l, 0, k, p]),
            -ri1k(l, p, k),
            contract(n, |r| r1(l, r) * c(r, k, p)),
            -contract(n, |r| t1(r, k) * pv(l, r, p)),
        ])
    });
    out.push(ResidualTensor::from_dtensors(name(7), lhs, rhs));

    // 8*. 𝒜_{j,k}{R^(l)_{jr} C^r_{k(p)} + P^(l)_{j(r)} P^(r)_{k(p)} + P^(l)_{k(p)|j}}
    //      = R^l_{pjk} − R^(l)_{jk}|(p)
    let sig = vec![FiberUpper, SpaceLower, SpaceLower, FiberLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, j, k, p) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![
            contract(n, |r| rij(l, j, r) * c(r, k, p)),
            contract(n, |r| pv(l, j, r) * pv(r, k, p)),
            g(&d.pv_s, &[l, k, p, j]),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, j, k, p) = (ix[0], ix[1], ix[2], ix[3]);
        rijk(l, p, j, k) - g(&d.rij_v, &[l, j, k, p])
    });
    out.push(alternating_eq(8, f, 1, 2, rhs));

    // 9*. 𝒜_{j,k}{C^l_{i(j)}|(k) + C^r_{i(k)} C^l_{r(j)}} = S^l_{i(j)(k)}
    let sig = vec![SpaceUpper, SpaceLower, FiberLower, FiberLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        g(&d.c_v, &[l, i, j, k]) + contract(n, |r| c(r, i, k) * c(l, r, j))
    });
    let rhs = build(sig, n, |ix| sijk(ix[0], ix[1], ix[2], ix[3]));
    out.push(alternating_eq(9, f, 2, 3, rhs));

    // 10. 𝒜_{j,k}{P^(l)_{1(j)}|(k) + P^l_{j1(k)}} = 0
    let f = build(vec![FiberUpper, FiberLower, FiberLower], n, |ix| {
        let (l, j, k) = (ix[0], ix[1], ix[2]);
        g(&d.p1_v, &[l, 0, j, k]) + pi1k(l, j, k)
    });
    out.push(alternating_zero(10, f, 1, 2));

    // 11*. 𝒜_{j,k}{P^l_{ji(k)} + P^(l)_{r(j)} C^r_{i(k)} − P^(l)_{i(k)}|(j)} = 0
    let f = build(vec![SpaceUpper, SpaceLower, FiberLower, FiberLower], n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![pijk(l, j, i, k), contract(n, |r| pv(l, r, j) * c(r, i, k)), -g(&d.pv_v, &[l, i, k, j])])
    });
    out.push(alternating_zero(11, f, 2, 3));

    // 12*. Σ_{i,j,k} S^l_{i(j)(k)} = 0
    let f = build(vec![SpaceUpper, SpaceLower, FiberLower, FiberLower], n, |ix| sijk(ix[0], ix[1], ix[2], ix[3]));
    out.push(cyclic_zero(12, f, 1, 2, 3));

    // 13. 𝒜_{j,k}{R^l_{p1j|k} + T^r_{1j} R^l_{pkr} + R^(r)_{1j} P^l_{pk(r)}}
    //       = −R^l_{pjk/1} − R^(r)_{jk} P^l_{p1(r)}
    let sig = vec![SpaceUpper, SpaceLower, SpaceLower, SpaceLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, p, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![
            g(&d.ri1k_s, &[l, p, 0, j, k]),
            contract(n, |r| t1(r, j) * rijk(l, p, k, r)),
            contract(n, |r| r1(r, j) * pijk(l, p, k, r)),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, p, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        -g(&d.rijk_t, &[l, p, j, k, 0]) - contract(n, |r| rij(r, j, k) * pi1k(l, p, r))
    });
    out.push(alternating_eq(13, f, 2, 3, rhs));

    // 14*. Σ_{i,j,k}{R^l_{pij|k} + R^(r)_{ij} P^l_{pk(r)}} = 0
    let f = build(vec![SpaceUpper, SpaceLower, SpaceLower, SpaceLower, SpaceLower], n, |ix| {
        let (l, p, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        g(&d.rijk_s, &[l, p, i, j, k]) + contract(n, |r| rij(r, i, j) * pijk(l, p, k, r))
    });
    out.push(cyclic_zero(14, f, 2, 3, 4));

    // 15. P^l_{i1(p)|k} − P^l_{ik(p)/1} + P^(r)_{1(p)} P^l_{ik(r)} − P^(r)_{k(p)} P^l_{i1(r)}
    //       = R^l_{i1k}|(p) + R^(r)_{1k} S^l_{i(p)(r)} + C^r_{k(p)} R^l_{i1r} − T^r_{1k} P^l_{ir(p)}
    let sig = vec![SpaceUpper, SpaceLower, SpaceLower, FiberLower];
    let lhs = build(sig.clone(), n, |ix| {
        let (l, i, k, p) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![
            g(&d.pi1k_s, &[l, i, 0, p, k]),
            -g(&d.pijk_t, &[l, i, k, p, 0]),
            contract(n, |r| p1(r, p) * pijk(l, i, k, r)),
            -contract(n, |r| pv(r, k, p) * pi1k(l, i, r)),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, i, k, p) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(vec![
            g(&d.ri1k_v, &[l, i, 0, k, p]),
            contract(n, |r| r1(r, k) * sijk(l, i, p, r)),
            contract(n, |r| c(r, k, p) * ri1k(l, i, r)),
            -contract(n, |r| t1(r, k) * pijk(l, i, r, p)),
        ])
    });
    out.push(ResidualTensor::from_dtensors(name(15), lhs, rhs));

    // 16*. 𝒜_{j,k}{R^l_{ijr} C^r_{k(p)} + P^l_{ij(r)} P^(r)_{k(p)} + P^l_{ik(p)|j}}
    //        = −S^l_{i(p)(r)} R^(r)_{jk} − R^l_{ijk}|(p)
    let sig = vec![SpaceUpper, SpaceLower, SpaceLower, SpaceLower, FiberLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, i, j, k, p) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        Expr::sum(vec![
            contract(n, |r| rijk(l, i, j, r) * c(r, k, p)),
            contract(n, |r| pijk(l, i, j, r) * pv(r, k, p)),
            g(&d.pijk_s, &[l, i, k, p, j]),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, i, j, k, p) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        -contract(n, |r| sijk(l, i, p, r) * rij(r, j, k)) - g(&d.rijk_v, &[l, i, j, k, p])
    });
    out.push(alternating_eq(16, f, 2, 3, rhs));

    // 17. 𝒜_{j,k}{P^l_{p1(j)}|(k) + P^(r)_{1(j)} S^l_{p(k)(r)}} = −S^l_{p(j)(k)/1}
    let sig = vec![SpaceUpper, SpaceLower, FiberLower, FiberLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, p, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        g(&d.pi1k_v, &[l, p, 0, j, k]) + contract(n, |r| p1(r, j) * sijk(l, p, k, r))
    });
    let rhs = build(sig, n, |ix| -g(&d.s_t, &[ix[0], ix[1], ix[2], ix[3], 0]));
    out.push(alternating_eq(17, f, 2, 3, rhs));

    // 18*. 𝒜_{j,k}{P^l_{pr(j)} C^r_{i(k)} − S^l_{p(j)(r)} P^(r)_{i(k)} − P^l_{pi(k)}|(j)}
    //        = −S^l_{p(j)(k)|i}
    let sig = vec![SpaceUpper, SpaceLower, SpaceLower, FiberLower, FiberLower];
    let f = build(sig.clone(), n, |ix| {
        let (l, p, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        Expr::sum(vec![
            contract(n, |r| pijk(l, p, r, j) * c(r, i, k)),
            -contract(n, |r| sijk(l, p, j, r) * pv(r, i, k)),
            -g(&d.pijk_v, &[l, p, i, k, j]),
        ])
    });
    let rhs = build(sig, n, |ix| {
        let (l, p, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        -g(&d.s_s, &[l, p, j, k, i])
    });
    out.push(alternating_eq(18, f, 3, 4, rhs));

    // 19*. Σ_{i,j,k} S^l_{p(i)(j)}|(k) = 0
    let f = build(vec![SpaceUpper, SpaceLower, FiberLower, FiberLower, FiberLower], n, |ix| {
        g(&d.s_v, &[ix[0], ix[1], ix[2], ix[3], ix[4]])
    });
    out.push(cyclic_zero(19, f, 2, 3, 4));

    Ok(out)
}

/// The two general Bianchi identities over adapted-frame indices:
/// `Σ_{A,B,C}{Rᶠ_ABC − Tᶠ_AB:C − Tᴳ_AB Tᶠ_CG} = 0` with free `(F, A, B, C)`
/// and `Σ_{A,B,C}{Rᶠ_DAB:C + Tᴳ_AB Rᶠ_DCG} = 0` with free `(F, D, A, B, C)`.
/// Lower indices are read in written order against the stored layouts
/// `T[D, B, A]` and `R[F, C, B, A]`.
pub fn general_bianchi_residuals(conn: &GammaConnection) -> Vec<ResidualTensor> {
    let fc = FrameConnection::new(conn);
    let n = conn.dim();
    let s = fc.size();
    let tors = fc.torsion();
    let curv = fc.curvature();
    let tors_d = fc.cov_deriv(&tors);
    let curv_d = fc.cov_deriv(&curv);
    let cycles = |a: usize, b: usize, c: usize| [(a, b, c), (b, c, a), (c, a, b)];

    let lhs1 = FrameTensor::from_fn(4, s, |ix| {
        let (f, a, b, c) = (ix[0], ix[1], ix[2], ix[3]);
        Expr::sum(cycles(a, b, c).iter().map(|&(a, b, c)| curv.get(&[f, a, b, c]).clone()).collect())
    });
    let rhs1 = FrameTensor::from_fn(4, s, |ix| {
        let (f, a, b, c) = (ix[0], ix[1], ix[2], ix[3]);
        let mut terms = Vec::new();
        for (a, b, c) in cycles(a, b, c) {
            terms.push(tors_d.get(&[f, a, b, c]).clone());
            for g in 0..s {
                let x = tors.get(&[g, a, b]);
                if !x.is_zero() {
                    terms.push(x * tors.get(&[f, c, g]));
                }
            }
        }
        Expr::sum(terms)
    });
    let lhs2 = FrameTensor::from_fn(5, s, |ix| {
        let (f, d, a, b, c) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        Expr::sum(cycles(a, b, c).iter().map(|&(a, b, c)| curv_d.get(&[f, d, a, b, c]).clone()).collect())
    });
    let rhs2 = FrameTensor::from_fn(5, s, |ix| {
        let (f, d, a, b, c) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let mut terms = Vec::new();
        for (a, b, c) in cycles(a, b, c) {
            for g in 0..s {
                let x = tors.get(&[g, a, b]);
                if !x.is_zero() {
                    terms.push(-(x * curv.get(&[f, d, c, g])));
                }
            }
        }
        Expr::sum(terms)
    });
    vec![
        ResidualTensor::from_frame(GENERAL_BIANCHI_NAMES[0], n, lhs1, rhs1),
        ResidualTensor::from_frame(GENERAL_BIANCHI_NAMES[1], n, lhs2, rhs2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::berwald;
    use crate::geometry::{spatial_riemann, SpatialMetric, TemporalMetric};

    fn sphere() -> GammaConnection {
        let h = TemporalMetric::new(Expr::one() + Expr::t().square()).unwrap();
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        berwald(&h, &phi)
    }

    #[test]
    fn flat_all_vanish() {
        let conn = berwald(&TemporalMetric::flat(), &SpatialMetric::identity(2));
        let res = bianchi_residuals(&conn).unwrap();
        assert_eq!(res.len(), 19);
        for r in &res {
            assert!(r.vanishes_symbolically(), "{}", r.name);
        }
        for r in general_bianchi_residuals(&conn) {
            assert!(r.vanishes_symbolically(), "{}", r.name);
        }
    }

    #[test]
    fn sphere_first_bianchi_is_classical() {
        let conn = sphere();
        let res = bianchi_residuals(&conn).unwrap();
        let b2 = &res[1];
        assert_eq!(b2.name, "Bianchi-02");
        let riem = spatial_riemann(&SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap());
        // with C = 0 the left side is exactly the cyclic sum of 𝔯
        for (k, lhs) in b2.lhs.iter().enumerate() {
            let ix = b2.index_of(k);
            let (l, i, j, m) = (ix[0], ix[1], ix[2], ix[3]);
            assert!((lhs - riem.get(l, i, j, m)).simplify().is_zero());
        }
        assert!(b2.vanishes_symbolically());
        assert!(res[13].vanishes_symbolically(), "second Bianchi on the sphere");
    }

    #[test]
    fn starred_count() {
        assert_eq!(BIANCHI_STARRED.len(), 11);
    }
}
