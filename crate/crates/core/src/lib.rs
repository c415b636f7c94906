//! Symbolic tensor calculus on the 1-jet space `J¹(ℝ, M)`.
//!
//! The crate builds nonlinear connections and h-normal Γ-linear connections
//! of Cartan type from temporal and spatial metrics (or arbitrary component
//! data), computes their torsion and curvature d-tensors both in closed form
//! and straight from the definitions, and checks the Ricci, deflection, and
//! Bianchi identities by evaluating residuals at sampled points.
//!
//! Expressions evaluate in any [`Scalar`]: `f64` for verification runs,
//! `f32`, or exact `BigRational` for polynomial and rational data.

#![allow(clippy::needless_range_loop)]

pub mod curvtors;
pub mod dconnect;
pub mod geometry;
pub mod identities;
pub mod random;
pub mod scalar;
pub mod symexpr;

pub use num_rational::BigRational;
pub use scalar::{Scalar, ScalarError};
pub use symexpr::{parse_expr, Coord, Expr, Func, Num, Point};

/// Double-precision evaluation point (the verification default).
pub type Point64 = Point<f64>;
/// Single-precision evaluation point.
pub type Point32 = Point<f32>;
/// Exact rational evaluation point.
pub type ExactPoint = Point<BigRational>;
