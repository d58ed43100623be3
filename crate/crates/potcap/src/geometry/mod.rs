//! Domains, grids, compact sets, smoothed distances and the transition
//! profile.

mod compact;
mod domain;
mod smooth;
mod transition;

pub use compact::{CompactKind, CompactSet};
pub use domain::{dist, unit_ball_volume, unit_sphere_area, Domain, Grid, Neighbor, MAX_DIM};
pub use smooth::{regularized_boundary_distance, regularized_distance, DistanceJet, SmoothDistance};
pub use transition::transition_h;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("unsupported dimension {0} (1 to 3 supported)")]
    UnsupportedDimension(usize),
    #[error("grid spacing {0} is not a positive finite number")]
    InvalidSpacing(f64),
    #[error("domain is empty or degenerate")]
    EmptyDomain,
    #[error("grid would exceed the lattice budget")]
    GridTooLarge,
    #[error("set touches or crosses the domain boundary (clearance {clearance:.3e})")]
    SetTouchesBoundary { clearance: f64 },
    #[error("tabulated field has {values} values for {nodes} grid nodes")]
    FieldShapeMismatch { nodes: usize, values: usize },
    #[error("grid spacing {h:.3e} does not resolve the set (clearance {clearance:.3e})")]
    UnresolvedSet { h: f64, clearance: f64 },
    #[error("dimension mismatch: set is {set}-dimensional, grid is {grid}-dimensional")]
    DimensionMismatch { set: usize, grid: usize },
    #[error("regularized distance is undefined for an empty set")]
    EmptySet,
}
