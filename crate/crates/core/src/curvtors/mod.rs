//! Torsion and curvature d-tensors of h-normal connections: closed-form
//! tables and definition-based oracles.

mod frame;

pub use frame::{FrameConnection, FrameTensor};

use crate::dconnect::{cov_deriv, DConnectError, DTensor, Direction, GammaConnection, IndexSlot, SlotKind};
use crate::geometry::FrameIndex;
use crate::symexpr::{Coord, Expr};
use IndexSlot::*;

/// The eight torsion d-tensors of an h-normal connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionTable {
    /// `Tʳ₁ⱼ`, `[SU, TL, SL]`
    pub t_1j: DTensor,
    /// `R⁽ʳ⁾₍₁₎₁ⱼ`, `[FU, TL, SL]`
    pub r_1j: DTensor,
    /// `Tʳᵢⱼ`, `[SU, SL, SL]`
    pub t_ij: DTensor,
    /// `R⁽ʳ⁾₍₁₎ᵢⱼ`, `[FU, SL, SL]`
    pub r_ij: DTensor,
    /// `P⁽ʳ⁾₍₁₎₁₍ⱼ₎`, `[FU, TL, FL]`
    pub p_1j: DTensor,
    /// `Pʳᵢ₍ⱼ₎`, `[SU, SL, FL]`
    pub p_ij: DTensor,
    /// `P⁽ʳ⁾₍₁₎ᵢ₍ⱼ₎`, `[FU, SL, FL]`
    pub pv_ij: DTensor,
    /// `S⁽ʳ⁾₍₁₎₍ᵢ₎₍ⱼ₎`, `[FU, FL, FL]`
    pub s_ij: DTensor,
}

pub const TORSION_NAMES: [&str; 8] = ["T_1j", "R_1j", "T_ij", "R_ij", "P_1(j)", "P_i(j)", "Pv_i(j)", "S_(i)(j)"];

const TORSION_SIGNATURES: [[IndexSlot; 3]; 8] = [
    [SpaceUpper, TimeLower, SpaceLower],
    [FiberUpper, TimeLower, SpaceLower],
    [SpaceUpper, SpaceLower, SpaceLower],
    [FiberUpper, SpaceLower, SpaceLower],
    [FiberUpper, TimeLower, FiberLower],
    [SpaceUpper, SpaceLower, FiberLower],
    [FiberUpper, SpaceLower, FiberLower],
    [FiberUpper, FiberLower, FiberLower],
];

impl TorsionTable {
    pub fn entries(&self) -> [(&'static str, &DTensor); 8] {
        [
            (TORSION_NAMES[0], &self.t_1j),
            (TORSION_NAMES[1], &self.r_1j),
            (TORSION_NAMES[2], &self.t_ij),
            (TORSION_NAMES[3], &self.r_ij),
            (TORSION_NAMES[4], &self.p_1j),
            (TORSION_NAMES[5], &self.p_ij),
            (TORSION_NAMES[6], &self.pv_ij),
            (TORSION_NAMES[7], &self.s_ij),
        ]
    }

    fn from_entries(mut v: Vec<DTensor>) -> TorsionTable {
        assert_eq!(v.len(), 8);
        let s_ij = v.pop().unwrap();
        let pv_ij = v.pop().unwrap();
        let p_ij = v.pop().unwrap();
        let p_1j = v.pop().unwrap();
        let r_ij = v.pop().unwrap();
        let t_ij = v.pop().unwrap();
        let r_1j = v.pop().unwrap();
        let t_1j = v.pop().unwrap();
        TorsionTable { t_1j, r_1j, t_ij, r_ij, p_1j, p_ij, pv_ij, s_ij }
    }

    pub fn simplify(&self) -> TorsionTable {
        TorsionTable::from_entries(self.entries().iter().map(|(_, d)| d.simplify()).collect())
    }
}

/// The five curvature d-tensors of an h-normal connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTable {
    /// `Rˡᵢ₁ₖ`, `[SU, SL, TL, SL]`
    pub r_i1k: DTensor,
    /// `Rˡᵢⱼₖ`, `[SU, SL, SL, SL]`
    pub r_ijk: DTensor,
    /// `Pˡᵢ₁₍ₖ₎`, `[SU, SL, TL, FL]`
    pub p_i1k: DTensor,
    /// `Pˡᵢⱼ₍ₖ₎`, `[SU, SL, SL, FL]`
    pub p_ijk: DTensor,
    /// `Sˡᵢ₍ⱼ₎₍ₖ₎`, `[SU, SL, FL, FL]`
    pub s_ijk: DTensor,
}

pub const CURVATURE_NAMES: [&str; 5] = ["R_i1k", "R_ijk", "P_i1(k)", "P_ij(k)", "S_i(j)(k)"];

const CURVATURE_SIGNATURES: [[IndexSlot; 4]; 5] = [
    [SpaceUpper, SpaceLower, TimeLower, SpaceLower],
    [SpaceUpper, SpaceLower, SpaceLower, SpaceLower],
    [SpaceUpper, SpaceLower, TimeLower, FiberLower],
    [SpaceUpper, SpaceLower, SpaceLower, FiberLower],
    [SpaceUpper, SpaceLower, FiberLower, FiberLower],
];

impl CurvatureTable {
    pub fn entries(&self) -> [(&'static str, &DTensor); 5] {
        [
            (CURVATURE_NAMES[0], &self.r_i1k),
            (CURVATURE_NAMES[1], &self.r_ijk),
            (CURVATURE_NAMES[2], &self.p_i1k),
            (CURVATURE_NAMES[3], &self.p_ijk),
            (CURVATURE_NAMES[4], &self.s_ijk),
        ]
    }

    fn from_entries(mut v: Vec<DTensor>) -> CurvatureTable {
        assert_eq!(v.len(), 5);
        let s_ijk = v.pop().unwrap();
        let p_ijk = v.pop().unwrap();
        let p_i1k = v.pop().unwrap();
        let r_ijk = v.pop().unwrap();
        let r_i1k = v.pop().unwrap();
        CurvatureTable { r_i1k, r_ijk, p_i1k, p_ijk, s_ijk }
    }

    pub fn simplify(&self) -> CurvatureTable {
        CurvatureTable::from_entries(self.entries().iter().map(|(_, d)| d.simplify()).collect())
    }
}

fn delta(a: usize, b: usize) -> bool {
    a == b
}

/// Closed-form torsion of an h-normal connection.
pub fn torsion_table(conn: &GammaConnection) -> Result<TorsionTable, DConnectError> {
    let info = conn.require_h_normal()?;
    let n = conn.dim();
    let nlc = conn.nlc();
    let kappa = &info.kappa;
    let sig = |k: usize| TORSION_SIGNATURES[k].to_vec();
    let t_1j = DTensor::from_fn(sig(0), n, |ix| -conn.g(ix[0], ix[2]));
    let r_1j = DTensor::from_fn(sig(1), n, |ix| {
        let (r, j) = (ix[0], ix[2]);
        nlc.delta_x(j, nlc.m(r)) - nlc.delta_t(nlc.n(r, j))
    });
    let t_ij = DTensor::from_fn(sig(2), n, |ix| {
        let (r, i, j) = (ix[0], ix[1], ix[2]);
        conn.l(r, i, j) - conn.l(r, j, i)
    });
    let r_ij = DTensor::from_fn(sig(3), n, |ix| {
        let (r, i, j) = (ix[0], ix[1], ix[2]);
        nlc.delta_x(j, nlc.n(r, i)) - nlc.delta_x(i, nlc.n(r, j))
    });
    let p_1j = DTensor::from_fn(sig(4), n, |ix| {
        let (r, j) = (ix[0], ix[2]);
        let mut terms = vec![nlc.m(r).diff(Coord::Fiber(j)), -conn.g(r, j)];
        if delta(r, j) {
            terms.push(kappa.clone());
        }
        Expr::sum(terms)
    });
    let p_ij = DTensor::from_fn(sig(5), n, |ix| conn.c(ix[0], ix[1], ix[2]).clone());
    let pv_ij = DTensor::from_fn(sig(6), n, |ix| {
        let (r, i, j) = (ix[0], ix[1], ix[2]);
        nlc.n(r, i).diff(Coord::Fiber(j)) - conn.l(r, j, i)
    });
    let s_ij = DTensor::from_fn(sig(7), n, |ix| {
        let (r, i, j) = (ix[0], ix[1], ix[2]);
        conn.c(r, i, j) - conn.c(r, j, i)
    });
    Ok(TorsionTable { t_1j, r_1j, t_ij, r_ij, p_1j, p_ij, pv_ij, s_ij })
}

/// Closed-form curvature of an h-normal connection.
pub fn curvature_table(conn: &GammaConnection) -> Result<CurvatureTable, DConnectError> {
    let tors = torsion_table(conn)?;
    curvature_table_with(conn, &tors)
}

/// As [`curvature_table`], reusing an already computed torsion table.
pub fn curvature_table_with(conn: &GammaConnection, tors: &TorsionTable) -> Result<CurvatureTable, DConnectError> {
    conn.require_h_normal()?;
    let n = conn.dim();
    let nlc = conn.nlc();
    let c = conn.family(Direction::Vertical, SlotKind::Space);
    let c_t = cov_deriv(c, conn, Direction::Temporal);
    let c_x = cov_deriv(c, conn, Direction::Spatial);
    let sig = |k: usize| CURVATURE_SIGNATURES[k].to_vec();
    let contract_c = |l: usize, i: usize, f: &dyn Fn(usize) -> Expr| -> Vec<Expr> {
        (0..n).filter(|&r| !conn.c(l, i, r).is_zero()).map(|r| conn.c(l, i, r) * f(r)).collect()
    };
    let r_i1k = DTensor::from_fn(sig(0), n, |ix| {
        let (l, i, k) = (ix[0], ix[1], ix[3]);
        let mut terms = vec![nlc.delta_x(k, conn.g(l, i)), -nlc.delta_t(conn.l(l, i, k))];
        for r in 0..n {
            terms.push(conn.g(r, i) * conn.l(l, r, k));
            terms.push(-(conn.l(r, i, k) * conn.g(l, r)));
        }
        terms.extend(contract_c(l, i, &|r| tors.r_1j.get(&[r, 0, k]).clone()));
        Expr::sum(terms)
    });
    let r_ijk = DTensor::from_fn(sig(1), n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut terms = vec![nlc.delta_x(k, conn.l(l, i, j)), -nlc.delta_x(j, conn.l(l, i, k))];
        for r in 0..n {
            terms.push(conn.l(r, i, j) * conn.l(l, r, k));
            terms.push(-(conn.l(r, i, k) * conn.l(l, r, j)));
        }
        terms.extend(contract_c(l, i, &|r| tors.r_ij.get(&[r, j, k]).clone()));
        Expr::sum(terms)
    });
    let p_i1k = DTensor::from_fn(sig(2), n, |ix| {
        let (l, i, k) = (ix[0], ix[1], ix[3]);
        let mut terms = vec![conn.g(l, i).diff(Coord::Fiber(k)), -c_t.get(&[l, i, k, 0])];
        terms.extend(contract_c(l, i, &|r| tors.p_1j.get(&[r, 0, k]).clone()));
        Expr::sum(terms)
    });
    let p_ijk = DTensor::from_fn(sig(3), n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut terms = vec![conn.l(l, i, j).diff(Coord::Fiber(k)), -c_x.get(&[l, i, k, j])];
        terms.extend(contract_c(l, i, &|r| tors.pv_ij.get(&[r, j, k]).clone()));
        Expr::sum(terms)
    });
    let s_ijk = DTensor::from_fn(sig(4), n, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut terms = vec![conn.c(l, i, j).diff(Coord::Fiber(k)), -conn.c(l, i, k).diff(Coord::Fiber(j))];
        for r in 0..n {
            terms.push(conn.c(r, i, j) * conn.c(l, r, k));
            terms.push(-(conn.c(r, i, k) * conn.c(l, r, j)));
        }
        Expr::sum(terms)
    });
    Ok(CurvatureTable { r_i1k, r_ijk, p_i1k, p_ijk, s_ijk })
}

/// Flat frame index of a d-tensor slot value.
fn flat(kind: SlotKind, i: usize, n: usize) -> usize {
    match kind {
        SlotKind::Time => FrameIndex::Time.flat(n),
        SlotKind::Space => FrameIndex::Space(i).flat(n),
        SlotKind::Fiber => FrameIndex::Fiber(i).flat(n),
    }
}

/// Reads a d-tensor with the given signature out of a frame tensor.
fn extract(full: &FrameTensor, sig: &[IndexSlot], n: usize) -> DTensor {
    DTensor::from_fn(sig.to_vec(), n, |ix| {
        let fx: Vec<usize> = ix.iter().zip(sig).map(|(&i, s)| flat(s.kind(), i, n)).collect();
        full.get(&fx).clone()
    })
}

/// Torsion components computed from `T(X_A, X_B) = ∇_A X_B − ∇_B X_A − [X_A, X_B]`.
pub fn torsion_oracle(conn: &GammaConnection) -> TorsionTable {
    torsion_from_frame(&FrameConnection::new(conn).torsion(), conn.dim())
}

pub fn torsion_from_frame(full: &FrameTensor, n: usize) -> TorsionTable {
    TorsionTable::from_entries(TORSION_SIGNATURES.iter().map(|s| extract(full, s, n)).collect())
}

/// Curvature components computed from
/// `R(X_A, X_B)X_C = ∇_A∇_B X_C − ∇_B∇_A X_C − ∇_{[X_A,X_B]} X_C`.
pub fn curvature_oracle(conn: &GammaConnection) -> CurvatureTable {
    curvature_from_frame(&FrameConnection::new(conn).curvature(), conn.dim())
}

pub fn curvature_from_frame(full: &FrameTensor, n: usize) -> CurvatureTable {
    CurvatureTable::from_entries(CURVATURE_SIGNATURES.iter().map(|s| extract(full, s, n)).collect())
}

fn frame_kind(a: usize, n: usize) -> SlotKind {
    match FrameIndex::from_flat(a, n) {
        FrameIndex::Time => SlotKind::Time,
        FrameIndex::Space(_) => SlotKind::Space,
        FrameIndex::Fiber(_) => SlotKind::Fiber,
    }
}

/// Frame torsion components `Tᴰ_{BA}` outside the table, which must vanish
/// for an h-normal connection. Labelled by their frame indices.
pub fn torsion_vanishing(full: &FrameTensor, n: usize) -> Vec<(String, Expr)> {
    let kinds = |ix: &[usize]| (frame_kind(ix[0], n), frame_kind(ix[1], n), frame_kind(ix[2], n));
    let in_table = |k: (SlotKind, SlotKind, SlotKind)| {
        TORSION_SIGNATURES.iter().any(|s| (s[0].kind(), s[1].kind(), s[2].kind()) == k)
    };
    full.indices()
        .filter(|ix| {
            let k = kinds(ix);
            !in_table(k) && !in_table((k.0, k.2, k.1))
        })
        .map(|ix| (format!("T{ix:?}"), full.get(&ix).clone()))
        .collect()
}

/// Frame curvature components `Rᶠ_{CBA}` outside the table and its vertical
/// duplicates, which must vanish for an h-normal connection.
pub fn curvature_vanishing(full: &FrameTensor, n: usize) -> Vec<(String, Expr)> {
    full.indices()
        .filter(|ix| {
            let (f, c) = (frame_kind(ix[0], n), frame_kind(ix[1], n));
            f != c || f == SlotKind::Time || ix[2] == ix[3]
        })
        .map(|ix| (format!("R{ix:?}"), full.get(&ix).clone()))
        .collect()
}

/// Pairs `(R⁽ˡ⁾₍ᵢ₎BA, Rˡᵢ BA)`: the vertical blocks of the curvature table
/// next to the horizontal blocks they must equal.
pub fn curvature_vertical_pairs(full: &FrameTensor, n: usize) -> Vec<(String, Expr, Expr)> {
    let s = full.extent();
    let mut out = Vec::new();
    for l in 0..n {
        for i in 0..n {
            for b in 0..s {
                for a in 0..s {
                    let v = full.get(&[FrameIndex::Fiber(l).flat(n), FrameIndex::Fiber(i).flat(n), b, a]);
                    let h = full.get(&[FrameIndex::Space(l).flat(n), FrameIndex::Space(i).flat(n), b, a]);
                    out.push((format!("R({l},{i};{b},{a})"), v.clone(), h.clone()));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::berwald;
    use crate::geometry::{spatial_riemann, SpatialMetric, TemporalMetric};
    use crate::symexpr::{parse_expr, Point};

    #[test]
    fn flat_berwald_tables_vanish() {
        let conn = berwald(&TemporalMetric::flat(), &SpatialMetric::identity(3));
        let t = torsion_table(&conn).unwrap().simplify();
        assert!(t.entries().iter().all(|(_, d)| d.is_zero()));
        let c = curvature_table(&conn).unwrap().simplify();
        assert!(c.entries().iter().all(|(_, d)| d.is_zero()));
    }

    #[test]
    fn rejects_general_connection() {
        let conn = GammaConnection::zero(crate::geometry::NonlinearConnection::zero(2));
        assert_eq!(torsion_table(&conn), Err(DConnectError::NotHNormal));
        assert_eq!(curvature_table(&conn), Err(DConnectError::NotHNormal));
    }

    #[test]
    fn berwald_sphere_matches_classical_curvature() {
        let h = TemporalMetric::new(parse_expr("1 + t^2", 1).unwrap()).unwrap();
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        let conn = berwald(&h, &phi);
        let riem = spatial_riemann(&phi);
        let tors = torsion_table(&conn).unwrap();
        let curv = curvature_table(&conn).unwrap();
        let oracle_t = torsion_oracle(&conn);
        let oracle_c = curvature_oracle(&conn);
        let pts = [Point::new(0.4, vec![0.9, 0.3], vec![1.2, -0.7]), Point::new(-1.1, vec![2.0, -0.5], vec![0.3, 0.8])];
        let close = |a: &Expr, b: &Expr, p: &Point<f64>| {
            let (x, y): (f64, f64) = (a.eval(p).unwrap(), b.eval(p).unwrap());
            (x - y).abs() <= 1e-10 * (1.0 + x.abs() + y.abs())
        };
        for p in &pts {
            for (name, d) in tors.entries() {
                for ix in d.indices() {
                    let expect = if name == "R_ij" {
                        Expr::sum((0..2).map(|m| riem.get(ix[0], m, ix[1], ix[2]) * Expr::y(m)).collect())
                    } else {
                        Expr::zero()
                    };
                    assert!(close(d.get(&ix), &expect, p), "{name}{ix:?}");
                }
            }
            for (name, d) in curv.entries() {
                for ix in d.indices() {
                    let expect = if name == "R_ijk" { riem.r.get(&ix).clone() } else { Expr::zero() };
                    assert!(close(d.get(&ix), &expect, p), "{name}{ix:?}");
                }
            }
            for ((name, a), (_, b)) in tors.entries().iter().zip(oracle_t.entries()) {
                for ix in a.indices() {
                    assert!(close(a.get(&ix), b.get(&ix), p), "oracle {name}{ix:?}");
                }
            }
            for ((name, a), (_, b)) in curv.entries().iter().zip(oracle_c.entries()) {
                for ix in a.indices() {
                    assert!(close(a.get(&ix), b.get(&ix), p), "oracle {name}{ix:?}");
                }
            }
        }
    }
}
