use std::fmt;

use serde::{Deserialize, Serialize};

use crate::symexpr::Expr;

/// One index position of a d-tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexSlot {
    TimeUpper,
    TimeLower,
    SpaceUpper,
    SpaceLower,
    FiberUpper,
    FiberLower,
}

/// The distribution an index slot belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Time,
    Space,
    Fiber,
}

impl IndexSlot {
    pub fn kind(self) -> SlotKind {
        match self {
            IndexSlot::TimeUpper | IndexSlot::TimeLower => SlotKind::Time,
            IndexSlot::SpaceUpper | IndexSlot::SpaceLower => SlotKind::Space,
            IndexSlot::FiberUpper | IndexSlot::FiberLower => SlotKind::Fiber,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, IndexSlot::TimeUpper | IndexSlot::SpaceUpper | IndexSlot::FiberUpper)
    }

    /// Number of values the index takes in a chart of dimension `n`.
    pub fn extent(self, n: usize) -> usize {
        match self.kind() {
            SlotKind::Time => 1,
            _ => n,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            IndexSlot::TimeUpper => "TU",
            IndexSlot::TimeLower => "TL",
            IndexSlot::SpaceUpper => "SU",
            IndexSlot::SpaceLower => "SL",
            IndexSlot::FiberUpper => "FU",
            IndexSlot::FiberLower => "FL",
        }
    }
}

impl fmt::Display for IndexSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Dense d-tensor: a typed index signature plus row-major components.
///
/// Time slots have extent 1 and are always indexed by `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTensor {
    signature: Vec<IndexSlot>,
    dim: usize,
    comps: Vec<Expr>,
}

impl DTensor {
    pub fn from_fn(signature: Vec<IndexSlot>, dim: usize, mut f: impl FnMut(&[usize]) -> Expr) -> DTensor {
        let shape: Vec<usize> = signature.iter().map(|s| s.extent(dim)).collect();
        let comps = MultiIndex::new(&shape).map(|idx| f(&idx)).collect();
        DTensor { signature, dim, comps }
    }

    /// Builds from components in row-major order.
    ///
    /// Panics if the length does not match the signature.
    pub fn from_vec(signature: Vec<IndexSlot>, dim: usize, comps: Vec<Expr>) -> DTensor {
        let len: usize = signature.iter().map(|s| s.extent(dim)).product();
        assert_eq!(comps.len(), len, "component count does not match signature");
        DTensor { signature, dim, comps }
    }

    pub fn zeros(signature: Vec<IndexSlot>, dim: usize) -> DTensor {
        DTensor::from_fn(signature, dim, |_| Expr::zero())
    }

    pub fn scalar(e: Expr, dim: usize) -> DTensor {
        DTensor { signature: Vec::new(), dim, comps: vec![e] }
    }

    pub fn signature(&self) -> &[IndexSlot] {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.signature.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.signature.iter().map(|s| s.extent(self.dim)).collect()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Expr> {
        self.comps
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.signature.len(), "wrong number of indices");
        let mut off = 0;
        for (k, (&i, s)) in idx.iter().zip(&self.signature).enumerate() {
            let ext = s.extent(self.dim);
            assert!(i < ext, "index {i} out of range in slot {k} ({s})");
            off = off * ext + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        let off = self.offset(idx);
        self.comps[off] = e;
    }

    /// All multi-indices in storage order.
    pub fn indices(&self) -> MultiIndex {
        MultiIndex::new(&self.shape())
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> DTensor {
        DTensor { signature: self.signature.clone(), dim: self.dim, comps: self.comps.iter().map(&mut f).collect() }
    }

    /// Componentwise combination of two tensors with the same signature.
    pub fn zip_with(&self, other: &DTensor, mut f: impl FnMut(&Expr, &Expr) -> Expr) -> DTensor {
        assert_eq!(self.signature, other.signature, "signature mismatch");
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        DTensor { signature: self.signature.clone(), dim: self.dim, comps }
    }

    pub fn simplify(&self) -> DTensor {
        self.map(Expr::simplify)
    }

    /// Tensor product `self ⊗ other`, slots of `self` first.
    pub fn tensor(&self, other: &DTensor) -> DTensor {
        let mut signature = self.signature.clone();
        signature.extend_from_slice(&other.signature);
        let mut comps = Vec::with_capacity(self.comps.len() * other.comps.len());
        for a in &self.comps {
            for b in &other.comps {
                comps.push(a * b);
            }
        }
        DTensor { signature, dim: self.dim, comps }
    }

    /// True when every component is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }
}

/// Row-major iterator over all multi-indices of a shape.
#[derive(Clone, Debug)]
pub struct MultiIndex {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(shape: &[usize]) -> MultiIndex {
        let next = if shape.contains(&0) { None } else { Some(vec![0; shape.len()]) };
        MultiIndex { shape: shape.to_vec(), next }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.shape[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use IndexSlot::*;

    #[test]
    fn layout_and_access() {
        let d = DTensor::from_fn(vec![SpaceUpper, TimeLower, FiberLower], 3, |i| Expr::int((10 * i[0] + i[2]) as i64));
        assert_eq!(d.shape(), vec![3, 1, 3]);
        assert_eq!(d.components().len(), 9);
        assert_eq!(*d.get(&[2, 0, 1]), Expr::int(21));
        assert_eq!(d.indices().count(), 9);
        assert_eq!(d.indices().nth(4).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn scalar_and_product() {
        let s = DTensor::scalar(Expr::t(), 2);
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        let v = DTensor::from_fn(vec![FiberUpper], 2, |i| Expr::y(i[0]));
        let p = v.tensor(&v);
        assert_eq!(*p.get(&[0, 1]), Expr::y(0) * Expr::y(1));
        assert_eq!(p.signature(), &[FiberUpper, FiberUpper]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn time_slot_has_extent_one() {
        let d = DTensor::zeros(vec![TimeLower], 2);
        d.get(&[1]);
    }
}
