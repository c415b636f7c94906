use std::fmt;

use serde::{Deserialize, Serialize};

/// Highest supported spatial/fiber index (0-based) so free variables fit a `u64` mask.
pub const MAX_INDEX: usize = 30;

/// A coordinate of the jet chart `(t, x^i, y_1^i)`.
///
/// Indices are 0-based here; the text form (`x1`, `y1`) is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coord {
    Time,
    Space(usize),
    Fiber(usize),
}

impl Coord {
    pub(crate) fn mask(self) -> u64 {
        match self {
            Coord::Time => 1,
            Coord::Space(i) => 1 << (1 + 2 * i),
            Coord::Fiber(i) => 1 << (2 + 2 * i),
        }
    }

    /// All coordinates of an `n`-dimensional chart, in `(t, x, y)` order.
    pub fn all(n: usize) -> Vec<Coord> {
        std::iter::once(Coord::Time).chain((0..n).map(Coord::Space)).chain((0..n).map(Coord::Fiber)).collect()
    }

    pub fn is_valid_for(self, n: usize) -> bool {
        match self {
            Coord::Time => true,
            Coord::Space(i) | Coord::Fiber(i) => i < n,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Time => f.write_str("t"),
            Coord::Space(i) => write!(f, "x{}", i + 1),
            Coord::Fiber(i) => write!(f, "y{}", i + 1),
        }
    }
}

/// A point `(t, x, y)` of the jet space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<S> {
    pub t: S,
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S> Point<S> {
    pub fn new(t: S, x: Vec<S>, y: Vec<S>) -> Self {
        assert_eq!(x.len(), y.len(), "x and y must have the chart dimension");
        Point { t, x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Panics if the coordinate is outside the chart.
    pub fn get(&self, c: Coord) -> &S {
        match c {
            Coord::Time => &self.t,
            Coord::Space(i) => &self.x[i],
            Coord::Fiber(i) => &self.y[i],
        }
    }

    pub fn get_mut(&mut self, c: Coord) -> &mut S {
        match c {
            Coord::Time => &mut self.t,
            Coord::Space(i) => &mut self.x[i],
            Coord::Fiber(i) => &mut self.y[i],
        }
    }

    pub fn map<T>(&self, mut f: impl FnMut(&S) -> T) -> Point<T> {
        Point { t: f(&self.t), x: self.x.iter().map(&mut f).collect(), y: self.y.iter().map(&mut f).collect() }
    }
}

impl Point<f64> {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}
