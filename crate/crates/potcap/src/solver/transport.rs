//! Divergence-free tangential transport fields.
//!
//! The drift term only enters the theory under two structural hypotheses:
//! `div U = 0` inside the domain and `U . nu = 0` on its boundary. Both are
//! checked discretely, not assumed. The shipped instances satisfy them to
//! rounding by construction:
//!
//! * `rotation`: `U = kappa (-(y - c_y), x - c_x)`, rigid rotation about `c`.
//!   Each component is constant along its own axis, so the centered discrete
//!   divergence vanishes identically, and on a ball centered at `c` the
//!   normal component is a cancelling pair of products.
//! * `stream`: the discrete curl of a scalar stream function at a fixed step,
//!   `U = (D_y psi, -D_x psi)`. The centered divergence telescopes to zero
//!   because both mixed differences read `psi` at the same four corners; the
//!   normal component vanishes on any boundary where `psi` is constant.

use std::sync::Arc;

use crate::fields::C2Field;
use crate::geometry::{dist, Domain, Grid, Neighbor, MAX_DIM};
use crate::par;

#[derive(Clone)]
enum Kind {
    None,
    Rotation { center: Vec<f64>, kappa: f64 },
    Stream { psi: Arc<dyn C2Field>, step: f64 },
}

/// A drift field together with the structural contract it claims. Violated
/// claims are caught by `check` before any solve uses the field.
#[derive(Clone)]
pub struct TransportField {
    kind: Kind,
    dim: usize,
    pub divergence_free: bool,
    pub tangential: bool,
}

impl std::fmt::Debug for TransportField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            Kind::None => "None",
            Kind::Rotation { .. } => "Rotation",
            Kind::Stream { .. } => "Stream",
        };
        f.debug_struct("TransportField")
            .field("kind", &name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl TransportField {
    pub fn none(dim: usize) -> Self {
        TransportField {
            kind: Kind::None,
            dim,
            divergence_free: true,
            tangential: true,
        }
    }

    /// Rigid rotation about `center` with angular rate `kappa`; tangential on
    /// balls centered there (a box domain will fail the check).
    pub fn rotation(center: Vec<f64>, kappa: f64) -> Self {
        assert!(
            (2..=MAX_DIM).contains(&center.len()),
            "rotation needs two or three coordinates"
        );
        let dim = center.len();
        TransportField {
            kind: Kind::Rotation { center, kappa },
            dim,
            divergence_free: true,
            tangential: true,
        }
    }

    /// Discrete curl of `psi` at the given step; 2-D only. Tangential on any
    /// boundary where `psi` is constant. Pass the solver grid's spacing as
    /// the step so the centered divergence cancels exactly.
    pub fn stream(psi: Arc<dyn C2Field>, step: f64) -> Self {
        assert_eq!(psi.dim(), 2, "stream functions are 2-D");
        assert!(step > 0.0);
        TransportField {
            kind: Kind::Stream { psi, step },
            dim: 2,
            divergence_free: true,
            tangential: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::None)
    }

    pub fn velocity(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            Kind::None => out.iter_mut().for_each(|v| *v = 0.0),
            Kind::Rotation { center, kappa } => {
                out[0] = -kappa * (x[1] - center[1]);
                out[1] = kappa * (x[0] - center[0]);
                if self.dim == 3 {
                    out[2] = 0.0;
                }
            }
            Kind::Stream { psi, step } => {
                let mut p = [x[0], x[1]];
                p[1] = x[1] + step;
                let n = psi.value(&p);
                p[1] = x[1] - step;
                let s = psi.value(&p);
                p[1] = x[1];
                p[0] = x[0] + step;
                let e = psi.value(&p);
                p[0] = x[0] - step;
                let w = psi.value(&p);
                out[0] = (n - s) / (2.0 * step);
                out[1] = -(e - w) / (2.0 * step);
            }
        }
    }

    pub fn max_speed(&self, grid: &Grid) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let speeds = par::map_indices(grid.len(), |i| {
            let mut u = [0.0; MAX_DIM];
            self.velocity(grid.node(i), &mut u[..self.dim]);
            u[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
        });
        par::chunk_max(speeds.len(), |i| speeds[i])
    }

    /// Measures both contract quantities on the given grid: the centered
    /// divergence at nodes with full stencils and |U . nu| at every boundary
    /// crossing of the stencil.
    pub fn check(&self, grid: &Grid) -> TransportCheck {
        let dim = self.dim;
        let h = grid.spacing();
        let domain = grid.domain();
        let per_node = par::map_indices(grid.len(), |i| {
            let x = grid.node(i);
            let mut div = 0.0;
            let mut full_stencil = true;
            let mut flux = 0.0f64;
            let mut shifted = [0.0; MAX_DIM];
            let mut u = [0.0; MAX_DIM];
            for axis in 0..dim {
                for sign in [1.0, -1.0] {
                    match grid.neighbor(i, axis, sign) {
                        Neighbor::Node(_) => {
                            shifted[..dim].copy_from_slice(x);
                            shifted[axis] = x[axis] + sign * h;
                            self.velocity(&shifted[..dim], &mut u[..dim]);
                            div += sign * u[axis] / (2.0 * h);
                        }
                        Neighbor::Boundary { theta } => {
                            full_stencil = false;
                            shifted[..dim].copy_from_slice(x);
                            shifted[axis] = x[axis] + sign * theta * h;
                            self.velocity(&shifted[..dim], &mut u[..dim]);
                            flux = flux.max(normal_flux(domain, &shifted[..dim], &u[..dim], axis, sign));
                        }
                    }
                }
            }
            (if full_stencil { div.abs() } else { 0.0 }, flux)
        });
        TransportCheck {
            max_divergence: par::chunk_max(per_node.len(), |i| per_node[i].0).max(0.0),
            max_boundary_flux: par::chunk_max(per_node.len(), |i| per_node[i].1).max(0.0),
        }
    }
}

fn normal_flux(domain: &Domain, y: &[f64], u: &[f64], axis: usize, sign: f64) -> f64 {
    match domain {
        Domain::Ball { center, .. } => {
            let r = dist(y, center);
            let mut dot = 0.0;
            for d in 0..y.len() {
                dot += u[d] * (y[d] - center[d]);
            }
            (dot / r).abs()
        }
        Domain::Box { .. } => (sign * u[axis]).abs(),
    }
}

/// Worst-case contract measurements from `TransportField::check`.
#[derive(Debug, Clone, Copy)]
pub struct TransportCheck {
    pub max_divergence: f64,
    pub max_boundary_flux: f64,
}

/// Contract ceiling used by the solver when a field claims a property.
pub const TRANSPORT_TOL: f64 = 1e-10;

impl TransportCheck {
    pub fn satisfies(&self, field: &TransportField) -> bool {
        (!field.divergence_free || self.max_divergence <= TRANSPORT_TOL)
            && (!field.tangential || self.max_boundary_flux <= TRANSPORT_TOL)
    }
}
