//! The discrete Kato inequality: `-lap_h |w| <= rhs sign(w)` node by node.
//!
//! For the (2n+1)-point Laplacian this is not an estimate but an algebraic
//! fact: every off-diagonal coefficient is nonpositive, and
//! `sign(w_i) w_k <= |w_k|` turns the row identity at `i` into the
//! inequality. Checking it on a solver output is therefore a bitwise-level
//! audit of the assembly: any sign slip in a stencil surfaces as a positive
//! violation far above rounding. `sign(0) = 0`, so nodes where `w` vanishes
//! compare the rearranged row against zero.
//!
//! The same report carries the weak maximum principle: when the data is
//! nonpositive everywhere, the solution must be too, and the worst positive
//! excursion is recorded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::laplacian;
use super::SolverError;
use crate::geometry::Grid;
use crate::par;

/// Relative consistency the pair `(w, rhs)` must satisfy before the
/// inequality is worth reading.
const CONSISTENCY_TOL: f64 = 1e-10;

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KatoReport {
    /// `max_i (-lap_h |w|)_i - rhs_i sign(w_i)`; at most rounding for a
    /// consistent pair.
    pub worst_violation: f64,
    /// Relative residual of `-lap_h w = rhs`.
    pub pair_residual: f64,
    /// Worst positive excursion of `w` when `rhs <= 0` everywhere, zero when
    /// the maximum principle holds; absent when the data changes sign.
    pub max_principle_excess: Option<f64>,
}

/// Audits one discrete pair. The pair must satisfy `-lap_h w = rhs` to
/// rounding; anything looser is refused rather than judged.
pub fn kato_check(w: &[f64], rhs: &[f64], grid: &Grid) -> Result<KatoReport, SolverError> {
    assert_eq!(w.len(), grid.len());
    assert_eq!(rhs.len(), grid.len());
    let a = laplacian(grid);
    let applied = a.matvec(w);
    let scale = par::chunk_max(w.len(), |i| applied[i].abs().max(rhs[i].abs())).max(1e-300);
    let pair_residual =
        par::chunk_max(w.len(), |i| (applied[i] - rhs[i]).abs()) / scale;
    if pair_residual > CONSISTENCY_TOL {
        return Err(SolverError::InconsistentPair {
            residual: pair_residual,
        });
    }

    let abs_w: Vec<f64> = par::map_indices(w.len(), |i| w[i].abs());
    let applied_abs = a.matvec(&abs_w);
    let worst_violation =
        par::chunk_max(w.len(), |i| applied_abs[i] - rhs[i] * sign(w[i]));

    let max_principle_excess = if rhs.iter().all(|&r| r <= 0.0) {
        Some(w.iter().fold(0.0f64, |acc, &x| acc.max(x)))
    } else {
        None
    };

    Ok(KatoReport {
        worst_violation,
        pair_residual,
        max_principle_excess,
    })
}

/// A reproducible consistent pair: `w` uniform in `[-1, 1)` per node from a
/// seeded stream, `rhs` its exact image under the discrete Laplacian.
pub fn random_pair(grid: &Grid, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rhs = laplacian(grid).matvec(&w);
    (w, rhs)
}
