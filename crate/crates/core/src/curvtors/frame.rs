//! Frame-indexed view of a Γ-linear connection.
//!
//! Every adapted frame element gets a flat index `A ∈ 0..1+2n` (time, then
//! spatial, then fiber). Connection coefficients, brackets, torsion and
//! curvature are computed straight from their definitions on these fields,
//! without using any of the closed-form tables.

use crate::dconnect::{Direction, GammaConnection, MultiIndex, SlotKind};
use crate::geometry::FrameIndex;
use crate::symexpr::Expr;

/// Dense tensor over flat frame indices; by convention the first index is
/// the upper one and the rest are lower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameTensor {
    rank: usize,
    extent: usize,
    comps: Vec<Expr>,
}

impl FrameTensor {
    pub fn from_fn(rank: usize, extent: usize, mut f: impl FnMut(&[usize]) -> Expr) -> FrameTensor {
        let comps = MultiIndex::new(&vec![extent; rank]).map(|ix| f(&ix)).collect();
        FrameTensor { rank, extent, comps }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn indices(&self) -> MultiIndex {
        MultiIndex::new(&vec![self.extent; self.rank])
    }

    pub fn get(&self, ix: &[usize]) -> &Expr {
        debug_assert_eq!(ix.len(), self.rank);
        let off = ix.iter().fold(0, |acc, &i| acc * self.extent + i);
        &self.comps[off]
    }
}

fn kind(a: FrameIndex) -> SlotKind {
    match a {
        FrameIndex::Time => SlotKind::Time,
        FrameIndex::Space(_) => SlotKind::Space,
        FrameIndex::Fiber(_) => SlotKind::Fiber,
    }
}

fn local(a: FrameIndex) -> usize {
    match a {
        FrameIndex::Time => 0,
        FrameIndex::Space(i) | FrameIndex::Fiber(i) => i,
    }
}

fn direction(a: FrameIndex) -> Direction {
    match a {
        FrameIndex::Time => Direction::Temporal,
        FrameIndex::Space(_) => Direction::Spatial,
        FrameIndex::Fiber(_) => Direction::Vertical,
    }
}

/// Connection coefficients `∇_{X_A} X_B = Γ(A,B)ᴰ X_D` and brackets
/// `[X_A, X_B] = β(A,B)ᴱ X_E` over the full adapted frame.
pub struct FrameConnection<'a> {
    conn: &'a GammaConnection,
    n: usize,
    size: usize,
    gamma: Vec<Expr>,
    bracket: Vec<Expr>,
}

impl<'a> FrameConnection<'a> {
    pub fn new(conn: &'a GammaConnection) -> FrameConnection<'a> {
        let n = conn.dim();
        let size = 1 + 2 * n;
        let frames = FrameIndex::all(n);
        let mut gamma = Vec::with_capacity(size * size * size);
        for &a in &frames {
            for &b in &frames {
                let fam = conn.family(direction(a), kind(b));
                for &d in &frames {
                    gamma.push(if kind(d) == kind(b) {
                        fam.get(&[local(d), local(b), local(a)]).clone()
                    } else {
                        Expr::zero()
                    });
                }
            }
        }
        let nlc = conn.nlc();
        let mut bracket = Vec::with_capacity(size * size * size);
        for &a in &frames {
            for &b in &frames {
                bracket.extend(nlc.frame_bracket(a, b));
            }
        }
        FrameConnection { conn, n, size, gamma, bracket }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ(A,B)ᴰ`
    pub fn gamma(&self, a: usize, b: usize, d: usize) -> &Expr {
        &self.gamma[(a * self.size + b) * self.size + d]
    }

    /// `β(A,B)ᴱ`
    pub fn bracket(&self, a: usize, b: usize, e: usize) -> &Expr {
        &self.bracket[(a * self.size + b) * self.size + e]
    }

    /// `X_A f`
    pub fn apply(&self, a: usize, f: &Expr) -> Expr {
        self.conn.nlc().frame_derivative(FrameIndex::from_flat(a, self.n), f)
    }

    /// `Tᴰ_{BA}` stored at `[D, B, A]`, the `X_D` component of
    /// `T(X_A, X_B) = ∇_A X_B − ∇_B X_A − [X_A, X_B]`.
    pub fn torsion(&self) -> FrameTensor {
        FrameTensor::from_fn(3, self.size, |ix| {
            let (d, b, a) = (ix[0], ix[1], ix[2]);
            Expr::sum(vec![self.gamma(a, b, d).clone(), -self.gamma(b, a, d), -self.bracket(a, b, d)])
        })
    }

    /// `Rᶠ_{CBA}` stored at `[F, C, B, A]`, the `X_F` component of
    /// `R(X_A, X_B)X_C = ∇_A∇_B X_C − ∇_B∇_A X_C − ∇_{[X_A,X_B]} X_C`.
    pub fn curvature(&self) -> FrameTensor {
        let s = self.size;
        FrameTensor::from_fn(4, s, |ix| {
            let (f, c, b, a) = (ix[0], ix[1], ix[2], ix[3]);
            let mut terms = vec![self.apply(a, self.gamma(b, c, f)), -self.apply(b, self.gamma(a, c, f))];
            for d in 0..s {
                let g1 = self.gamma(b, c, d);
                if !g1.is_zero() {
                    let g2 = self.gamma(a, d, f);
                    if !g2.is_zero() {
                        terms.push(g1 * g2);
                    }
                }
                let g3 = self.gamma(a, c, d);
                if !g3.is_zero() {
                    let g4 = self.gamma(b, d, f);
                    if !g4.is_zero() {
                        terms.push(-(g3 * g4));
                    }
                }
                let br = self.bracket(a, b, d);
                if !br.is_zero() {
                    let g5 = self.gamma(d, c, f);
                    if !g5.is_zero() {
                        terms.push(-(br * g5));
                    }
                }
            }
            Expr::sum(terms)
        })
    }

    /// `∇_C` of a frame tensor with one upper (first) and `rank − 1` lower
    /// indices; `C` is appended as the last index.
    pub fn cov_deriv(&self, t: &FrameTensor) -> FrameTensor {
        let s = self.size;
        let rank = t.rank();
        FrameTensor::from_fn(rank + 1, s, |ix| {
            let (base, c) = (&ix[..rank], ix[rank]);
            let mut terms = vec![self.apply(c, t.get(base))];
            let mut moved = base.to_vec();
            for slot in 0..rank {
                for g in 0..s {
                    moved[slot] = g;
                    let comp = t.get(&moved);
                    if comp.is_zero() {
                        continue;
                    }
                    if slot == 0 {
                        let coef = self.gamma(c, g, base[0]);
                        if !coef.is_zero() {
                            terms.push(comp * coef);
                        }
                    } else {
                        let coef = self.gamma(c, base[slot], g);
                        if !coef.is_zero() {
                            terms.push(-(comp * coef));
                        }
                    }
                }
                moved[slot] = base[slot];
            }
            Expr::sum(terms)
        })
    }
}
