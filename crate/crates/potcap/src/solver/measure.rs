//! Bounded measure data for the right-hand side.
//!
//! A datum is a finite sum of point masses and densities. Point masses land
//! in the containing cell as `mass / h^n`, which is the distributional
//! approximation the weak-residual tests are calibrated against: pairings
//! with C^2 test functions converge at the scheme's own order, so nothing is
//! gained by mollifying.

use std::sync::Arc;

use super::SolverError;
use crate::geometry::Grid;
use crate::par;

type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum MeasureData {
    Dirac { location: Vec<f64>, mass: f64 },
    Density { field: DensityFn },
    Sum(Vec<MeasureData>),
}

impl std::fmt::Debug for MeasureData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureData::Dirac { location, mass } => f
                .debug_struct("Dirac")
                .field("location", location)
                .field("mass", mass)
                .finish(),
            MeasureData::Density { .. } => f.write_str("Density(..)"),
            MeasureData::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
        }
    }
}

impl MeasureData {
    pub fn dirac(location: Vec<f64>, mass: f64) -> Self {
        MeasureData::Dirac { location, mass }
    }

    pub fn density<F>(field: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        MeasureData::Density { field: Arc::new(field) }
    }

    pub fn sum(parts: Vec<MeasureData>) -> Self {
        MeasureData::Sum(parts)
    }

    /// Sum of |masses| plus the integral of |density| on the grid.
    pub fn total_variation(&self, grid: &Grid) -> f64 {
        match self {
            MeasureData::Dirac { mass, .. } => mass.abs(),
            MeasureData::Density { field } => {
                let cell = grid.cell_measure();
                let terms = par::map_indices(grid.len(), |i| field(grid.node(i)).abs());
                cell * par::chunk_sum(&terms)
            }
            MeasureData::Sum(parts) => parts.iter().map(|p| p.total_variation(grid)).sum(),
        }
    }

    /// Nodal right-hand side. Dirac points must sit strictly inside the
    /// domain, in a cell whose center survived as a node.
    pub fn rhs(&self, grid: &Grid) -> Result<Vec<f64>, SolverError> {
        let mut out = vec![0.0; grid.len()];
        self.add_rhs(grid, &mut out)?;
        Ok(out)
    }

    fn add_rhs(&self, grid: &Grid, out: &mut [f64]) -> Result<(), SolverError> {
        match self {
            MeasureData::Dirac { location, mass } => {
                if !grid.domain().contains(location) {
                    return Err(SolverError::MassOutsideDomain);
                }
                let node = grid
                    .node_containing(location)
                    .ok_or(SolverError::MassOutsideDomain)?;
                out[node] += mass / grid.cell_measure();
                Ok(())
            }
            MeasureData::Density { field } => {
                for i in 0..grid.len() {
                    out[i] += field(grid.node(i));
                }
                Ok(())
            }
            MeasureData::Sum(parts) => {
                for p in parts {
                    p.add_rhs(grid, out)?;
                }
                Ok(())
            }
        }
    }

    /// The pairing `integral of phi d(this measure)`.
    pub fn pair<F>(&self, grid: &Grid, phi: &F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        match self {
            MeasureData::Dirac { location, mass } => mass * phi(location),
            MeasureData::Density { field } => {
                let cell = grid.cell_measure();
                let terms = par::map_indices(grid.len(), |i| {
                    let x = grid.node(i);
                    field(x) * phi(x)
                });
                cell * par::chunk_sum(&terms)
            }
            MeasureData::Sum(parts) => parts.iter().map(|p| p.pair(grid, phi)).sum(),
        }
    }
}
