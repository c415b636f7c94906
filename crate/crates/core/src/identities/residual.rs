use serde::{Deserialize, Serialize};

use crate::curvtors::FrameTensor;
use crate::dconnect::{DTensor, IndexSlot, MultiIndex};
use crate::symexpr::Expr;

/// A free index of a residual: a d-tensor slot, or a flat adapted-frame
/// index (extent `1 + 2n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FreeSlot {
    D(IndexSlot),
    Frame,
    /// Copies of one identity stacked over several inputs.
    Copy(usize),
}

impl FreeSlot {
    pub fn extent(self, n: usize) -> usize {
        match self {
            FreeSlot::D(s) => s.extent(n),
            FreeSlot::Frame => 1 + 2 * n,
            FreeSlot::Copy(k) => k,
        }
    }
}

/// Both sides of an identity, component by component over its free indices.
#[derive(Clone, Debug)]
pub struct ResidualTensor {
    pub name: String,
    pub slots: Vec<FreeSlot>,
    pub dim: usize,
    pub lhs: Vec<Expr>,
    pub rhs: Vec<Expr>,
}

impl ResidualTensor {
    pub fn from_dtensors(name: impl Into<String>, lhs: DTensor, rhs: DTensor) -> ResidualTensor {
        assert_eq!(lhs.signature(), rhs.signature(), "sides of an identity must share free slots");
        ResidualTensor {
            name: name.into(),
            slots: lhs.signature().iter().map(|&s| FreeSlot::D(s)).collect(),
            dim: lhs.dim(),
            lhs: lhs.into_components(),
            rhs: rhs.into_components(),
        }
    }

    /// Residual over flat frame indices.
    pub fn from_frame(name: impl Into<String>, dim: usize, lhs: FrameTensor, rhs: FrameTensor) -> ResidualTensor {
        assert_eq!(lhs.rank(), rhs.rank());
        assert_eq!(lhs.extent(), 1 + 2 * dim);
        ResidualTensor {
            name: name.into(),
            slots: vec![FreeSlot::Frame; lhs.rank()],
            dim,
            lhs: lhs.components().to_vec(),
            rhs: rhs.components().to_vec(),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.extent(self.dim)).collect()
    }

    pub fn len(&self) -> usize {
        self.lhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lhs.is_empty()
    }

    /// Multi-index of the flat component `k`.
    pub fn index_of(&self, k: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut ix = vec![0; shape.len()];
        let mut rest = k;
        for (slot, &e) in ix.iter_mut().zip(&shape).rev() {
            *slot = rest % e;
            rest /= e;
        }
        ix
    }

    /// `LHS − RHS`, component by component.
    pub fn difference(&self) -> Vec<Expr> {
        self.lhs.iter().zip(&self.rhs).map(|(l, r)| l - r).collect()
    }

    /// True when every difference simplifies to 0.
    pub fn vanishes_symbolically(&self) -> bool {
        self.difference().iter().all(|d| d.simplify().is_zero())
    }
}

/// Concatenates instances of one identity (for example, for several vector
/// fields) under a leading `Copy` slot.
pub fn stack(parts: Vec<ResidualTensor>) -> ResidualTensor {
    assert!(!parts.is_empty(), "nothing to stack");
    let first = &parts[0];
    assert!(parts.iter().all(|p| p.name == first.name && p.slots == first.slots && p.dim == first.dim));
    let mut slots = vec![FreeSlot::Copy(parts.len())];
    slots.extend_from_slice(&first.slots);
    let (name, dim) = (first.name.clone(), first.dim);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for p in parts {
        lhs.extend(p.lhs);
        rhs.extend(p.rhs);
    }
    ResidualTensor { name, slots, dim, lhs, rhs }
}

fn permuted(d: &DTensor, ix: &[usize], slots: &[usize], values: &[usize]) -> Expr {
    let mut moved = ix.to_vec();
    for (&s, &v) in slots.iter().zip(values) {
        moved[s] = v;
    }
    d.get(&moved).clone()
}

fn check_extents(d: &DTensor, slots: &[usize]) {
    let shape = d.shape();
    assert!(slots.iter().all(|&s| shape[s] == shape[slots[0]]), "permuted slots must share an extent");
}

/// `F` with slots `a` and `b` exchanged.
pub fn swapped(d: &DTensor, a: usize, b: usize) -> DTensor {
    check_extents(d, &[a, b]);
    DTensor::from_fn(d.signature().to_vec(), d.dim(), |ix| permuted(d, ix, &[a, b], &[ix[b], ix[a]]))
}

/// `𝒜_{a,b} F = F(…a…b…) − F(…b…a…)`.
pub fn alternate(d: &DTensor, a: usize, b: usize) -> DTensor {
    let s = swapped(d, a, b);
    d.zip_with(&s, |x, y| x - y)
}

/// `F` with slots `(a, b, c)` fed `(ix_b, ix_c, ix_a)`, the first cyclic shift.
pub fn shifted(d: &DTensor, a: usize, b: usize, c: usize) -> DTensor {
    check_extents(d, &[a, b, c]);
    DTensor::from_fn(d.signature().to_vec(), d.dim(), |ix| permuted(d, ix, &[a, b, c], &[ix[b], ix[c], ix[a]]))
}

/// `Σ_{a,b,c} F = F(i,j,k) + F(j,k,i) + F(k,i,j)` over slots `a, b, c`.
pub fn cyclic(d: &DTensor, a: usize, b: usize, c: usize) -> DTensor {
    let s1 = shifted(d, a, b, c);
    let s2 = shifted(&s1, a, b, c);
    DTensor::from_fn(d.signature().to_vec(), d.dim(), |ix| {
        Expr::sum(vec![d.get(ix).clone(), s1.get(ix).clone(), s2.get(ix).clone()])
    })
}

/// Iterates all multi-indices of a residual.
pub fn residual_indices(r: &ResidualTensor) -> MultiIndex {
    MultiIndex::new(&r.shape())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;
    use IndexSlot::*;

    fn generic(n: usize) -> DTensor {
        DTensor::from_fn(vec![SpaceUpper, SpaceLower, SpaceLower], n, |ix| {
            parse_expr(&format!("x1^{} * y2 + {} * t^{}", ix[0] + 1, ix[1] + 2 * ix[2], ix[2] + 1), n).unwrap()
        })
    }

    #[test]
    fn alternating_twice_doubles() {
        let f = generic(2);
        let a = alternate(&f, 1, 2);
        let aa = alternate(&a, 1, 2);
        for ix in a.indices() {
            let twice = a.get(&ix) * Expr::int(2);
            assert!((aa.get(&ix) - &twice).simplify().is_zero());
        }
    }

    #[test]
    fn cyclic_sum_of_symmetric_is_triple() {
        let n = 2;
        let f = DTensor::from_fn(vec![SpaceLower, SpaceLower, SpaceLower], n, |ix| {
            let mut s = ix.to_vec();
            s.sort();
            parse_expr(&format!("x{}*y{} + x{}^2", s[0] + 1, s[1] + 1, s[2] + 1), n).unwrap()
        });
        let c = cyclic(&f, 0, 1, 2);
        for ix in f.indices() {
            assert!((c.get(&ix) - f.get(&ix) * Expr::int(3)).simplify().is_zero());
        }
    }

    #[test]
    fn cyclic_matches_definition() {
        let f = generic(2);
        let c = cyclic(&f, 0, 1, 2);
        let (i, j, k) = (0, 1, 1);
        let expect = Expr::sum(vec![f.get(&[i, j, k]).clone(), f.get(&[j, k, i]).clone(), f.get(&[k, i, j]).clone()]);
        assert!((c.get(&[i, j, k]) - &expect).simplify().is_zero());
    }

    #[test]
    fn residual_index_layout() {
        let f = generic(3);
        let r = ResidualTensor::from_dtensors("x", f.clone(), f.clone());
        assert_eq!(r.len(), 27);
        assert_eq!(r.index_of(5), vec![0, 1, 2]);
        assert!(r.vanishes_symbolically());
        let s = stack(vec![r.clone(), r.clone()]);
        assert_eq!(s.shape(), vec![2, 3, 3, 3]);
        assert_eq!(s.index_of(28), vec![1, 0, 0, 1]);
    }
}
