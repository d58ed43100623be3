//! Compact target sets and exact distances to them.

use std::sync::Arc;

use super::domain::{dist, Domain, Grid};
use super::GeometryError;

/// Description of a compact subset of the domain.
#[derive(Debug, Clone)]
pub enum CompactKind {
    /// A finite set of points, treated as one set (empty list = empty set).
    Points(Vec<Vec<f64>>),
    /// A round sphere (the surface, not the solid ball).
    Sphere { center: Vec<f64>, radius: f64 },
    /// A finite union of separated components.
    Union(Vec<CompactSet>),
    /// Tabulated distance field on a grid; the set is its zero locus.
    Field { grid: Arc<Grid>, distance: Arc<Vec<f64>> },
}

#[derive(Debug, Clone)]
pub struct CompactSet {
    pub kind: CompactKind,
}

impl CompactSet {
    pub fn points(points: Vec<Vec<f64>>) -> Self {
        CompactSet { kind: CompactKind::Points(points) }
    }

    pub fn point(p: Vec<f64>) -> Self {
        Self::points(vec![p])
    }

    pub fn sphere(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        CompactSet { kind: CompactKind::Sphere { center, radius } }
    }

    pub fn union(members: Vec<CompactSet>) -> Self {
        CompactSet { kind: CompactKind::Union(members) }
    }

    pub fn field(grid: Arc<Grid>, distance: Vec<f64>) -> Result<Self, GeometryError> {
        if distance.len() != grid.len() {
            return Err(GeometryError::FieldShapeMismatch {
                nodes: grid.len(),
                values: distance.len(),
            });
        }
        Ok(CompactSet { kind: CompactKind::Field { grid, distance: Arc::new(distance) } })
    }

    pub fn is_empty(&self) -> bool {
        match &self.kind {
            CompactKind::Points(p) => p.is_empty(),
            CompactKind::Sphere { .. } => false,
            CompactKind::Union(m) => m.iter().all(|s| s.is_empty()),
            CompactKind::Field { distance, .. } => distance.iter().all(|&d| d > 0.0),
        }
    }

    /// Exact distance from `x` to the set (interpolated for tabulated sets).
    /// The empty set is at distance +inf from everything.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match &self.kind {
            CompactKind::Points(points) => points
                .iter()
                .map(|p| dist(x, p))
                .fold(f64::INFINITY, f64::min),
            CompactKind::Sphere { center, radius } => (dist(x, center) - radius).abs(),
            CompactKind::Union(members) => members
                .iter()
                .map(|m| m.distance(x))
                .fold(f64::INFINITY, f64::min),
            CompactKind::Field { grid, distance } => grid.interpolate(distance, x).max(0.0),
        }
    }

    /// Distance from the set to the domain boundary. Errors if the set is not
    /// strictly inside. For tabulated sets this is the conservative bound
    /// `min_x (gap(x) - d(x))` over nodes, exact as h -> 0.
    pub fn clearance(&self, domain: &Domain) -> Result<f64, GeometryError> {
        let c = match &self.kind {
            CompactKind::Points(points) => points
                .iter()
                .map(|p| domain.boundary_gap(p))
                .fold(f64::INFINITY, f64::min),
            CompactKind::Sphere { center, radius } => domain.boundary_gap(center) - radius,
            CompactKind::Union(members) => members
                .iter()
                .map(|m| m.clearance(domain))
                .try_fold(f64::INFINITY, |acc, r| r.map(|v| acc.min(v)))?,
            CompactKind::Field { grid, distance } => (0..grid.len())
                .map(|i| grid.boundary_gap(i) - distance[i])
                .fold(f64::INFINITY, f64::max)
                // max of lower bounds over nodes near the set is still only a
                // lower bound; take the best one available
                .max(0.0),
        };
        if c == f64::INFINITY {
            // empty set: clears everything
            return Ok(f64::INFINITY);
        }
        if c <= 0.0 {
            return Err(GeometryError::SetTouchesBoundary { clearance: c });
        }
        Ok(c)
    }

    /// Largest pairwise separation between component anchors, used to budget
    /// non-overlap of per-component collars. 0 for single components.
    pub fn min_component_separation(&self) -> f64 {
        match &self.kind {
            CompactKind::Points(points) => {
                let mut sep = f64::INFINITY;
                for i in 0..points.len() {
                    for j in (i + 1)..points.len() {
                        sep = sep.min(dist(&points[i], &points[j]));
                    }
                }
                sep
            }
            CompactKind::Union(members) => {
                // distance between member hulls, approximated by anchors
                let mut sep = f64::INFINITY;
                for i in 0..members.len() {
                    for j in (i + 1)..members.len() {
                        sep = sep.min(set_separation(&members[i], &members[j]));
                    }
                }
                sep
            }
            _ => f64::INFINITY,
        }
    }
}

fn set_separation(a: &CompactSet, b: &CompactSet) -> f64 {
    // exact for points vs points / sphere; conservative otherwise
    match (&a.kind, &b.kind) {
        (CompactKind::Points(pa), _) => pa
            .iter()
            .map(|p| b.distance(p))
            .fold(f64::INFINITY, f64::min),
        (_, CompactKind::Points(pb)) => pb
            .iter()
            .map(|p| a.distance(p))
            .fold(f64::INFINITY, f64::min),
        (CompactKind::Sphere { center, radius }, _) => {
            (b.distance(center) - radius).max(0.0)
        }
        (_, CompactKind::Sphere { center, radius }) => {
            (a.distance(center) - radius).max(0.0)
        }
        _ => 0.0,
    }
}
