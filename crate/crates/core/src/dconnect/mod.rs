//! Γ-linear connections, the h-normal Cartan-type constructor, and the
//! covariant derivatives of d-tensors.

mod check;
mod connection;
mod covariant;
mod tensor;

use thiserror::Error;

pub use check::{check_h_normal, h_normal_relations, h_normal_residuals};
pub use connection::{
    berwald, h_normalization, make_h_normal_cartan, Direction, GammaConnection, HNormalData, HNormalInfo,
};
pub use covariant::cov_deriv;
pub use tensor::{DTensor, IndexSlot, MultiIndex, SlotKind};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DConnectError {
    #[error("{family} is not symmetric in its lower indices at (k, i, j) = ({}, {}, {})", .k + 1, .i + 1, .j + 1)]
    NotCartan { family: &'static str, k: usize, i: usize, j: usize },
    #[error("bad component signature: {0}")]
    Signature(String),
    #[error("operation requires an h-normal connection")]
    NotHNormal,
}
