//! Metrics, Christoffel symbols, nonlinear connections, and the adapted
//! frame they induce on the jet space.

mod metric;
mod nlc;

use thiserror::Error;

pub use metric::{
    inverse_spatial_metric, riemann_from_christoffel, spatial_christoffel, spatial_riemann, temporal_christoffel,
    SpatialMetric, SpatialRiemann, TemporalChristoffel, TemporalMetric, DEGENERACY_GUARD, MAX_METRIC_DIM,
};
pub(crate) use nlc::canonical_from_symbols;
pub use nlc::{
    canonical_nlc, nlc_from_semispray, nlc_transform, CoordinateChange, FrameIndex, NonlinearConnection, VectorField,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("temporal metric `{0}` must depend on t only")]
    TemporalMetricNotInT(String),
    #[error("spatial metric entry ({}, {}) must depend on x only", .i + 1, .j + 1)]
    SpatialMetricNotInX { i: usize, j: usize },
    #[error("spatial metric is not symmetric at ({}, {})", .i + 1, .j + 1)]
    NotSymmetric { i: usize, j: usize },
    #[error("spatial metric has no entries")]
    EmptyMetric,
    #[error("dimension {0} exceeds the supported maximum of 4")]
    DimensionTooLarge(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coordinate change is not invertible: dt~/dt is zero")]
    NonInvertibleChange,
}
