//! Assembly of the monotone operator `-lap + U.grad + V_j`.
//!
//! The Laplacian is the (2n+1)-point stencil with boundary-cut corrections:
//! when the lattice neighbor falls outside, the wall sits at a recorded
//! fraction `theta` of a step and the one-sided second difference through the
//! homogeneous boundary value replaces the regular one. Transport is
//! first-order upwind, biased against the flow so every off-diagonal entry
//! stays nonpositive. Together with `V_j >= 0` on the diagonal the rows form
//! an M-matrix, which is what the positivity and comparison guarantees of the
//! continuous problem turn into discretely.

use super::sparse::Csr;
use super::transport::TransportField;
use crate::geometry::{Grid, Neighbor, MAX_DIM};
use crate::par;

/// One stencil direction: either a node at distance `theta * h` (theta = 1)
/// or the wall at `theta * h`.
struct Arm {
    node: Option<u32>,
    theta: f64,
}

fn arm(grid: &Grid, i: usize, axis: usize, sign: f64) -> Arm {
    match grid.neighbor(i, axis, sign) {
        Neighbor::Node(j) => Arm {
            node: Some(j as u32),
            theta: 1.0,
        },
        Neighbor::Boundary { theta } => Arm { node: None, theta },
    }
}

/// Assembles the operator for nodal potential values `v_j` and drift `u`.
/// `v_j` must be nonnegative; the result is an M-matrix.
pub fn assemble(grid: &Grid, v_j: &[f64], u: &TransportField) -> Csr {
    assert_eq!(v_j.len(), grid.len());
    let dim = grid.dim();
    let h = grid.spacing();
    let rows = par::map_indices(grid.len(), |i| {
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(2 * dim + 1);
        let mut diag = v_j[i];
        let mut vel = [0.0; MAX_DIM];
        if !u.is_zero() {
            u.velocity(grid.node(i), &mut vel[..dim]);
        }
        for axis in 0..dim {
            let plus = arm(grid, i, axis, 1.0);
            let minus = arm(grid, i, axis, -1.0);
            // cut-cell second difference through the two arms
            let span = plus.theta + minus.theta;
            diag += 2.0 / (h * h * plus.theta * minus.theta);
            if let Some(j) = plus.node {
                row.push((j, -2.0 / (h * h * plus.theta * span)));
            }
            if let Some(j) = minus.node {
                row.push((j, -2.0 / (h * h * minus.theta * span)));
            }
            // upwind transport: difference against the inflow side
            let w = vel[axis];
            if w > 0.0 {
                diag += w / (minus.theta * h);
                if let Some(j) = minus.node {
                    row.push((j, -w / (minus.theta * h)));
                }
            } else if w < 0.0 {
                diag += -w / (plus.theta * h);
                if let Some(j) = plus.node {
                    row.push((j, w / (plus.theta * h)));
                }
            }
        }
        row.push((i as u32, diag));
        row
    });
    Csr::from_rows(rows)
}

/// The pure (2n+1)-point Laplacian `-lap_h` with homogeneous boundary.
pub fn laplacian(grid: &Grid) -> Csr {
    assemble(
        grid,
        &vec![0.0; grid.len()],
        &TransportField::none(grid.dim()),
    )
}
