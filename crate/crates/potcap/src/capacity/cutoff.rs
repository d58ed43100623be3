//! Cutoff fields built from smoothed distances.
//!
//! A single cutoff is the product of two transition factors,
//!
//! ```text
//! psi_j = (1 - H(j rho_set)) * H(j rho_boundary)
//! ```
//!
//! so `psi_j = 1` where `rho_set <= 1/j` (and the boundary is far), `psi_j = 0`
//! once `rho_set >= 2/j` or `rho_boundary <= 1/j`, and every derivative lives
//! on one of the two collars. Because the transition is exactly constant
//! outside `[1, 2]`, the two collars stop interacting as soon as they are
//! disjoint; the family records the threshold `j_min` past which that is
//! guaranteed by the recorded distance-equivalence constants, and refuses to
//! build sharper cutoffs below it.
//!
//! Unions multiply complements: `1 - prod_i (1 - psi_i)`. Near any one member
//! the product carries an exact zero factor, so the union cutoff coincides
//! with that member's cutoff there, which is what makes the subadditivity of
//! the norm terms checkable to rounding rather than to quadrature error.

use std::sync::Arc;

use super::CapacityError;
use crate::fields::C2Field;
use crate::geometry::{
    regularized_boundary_distance, regularized_distance, transition_h, CompactSet, DistanceJet,
    Domain, Grid, MAX_DIM,
};

/// Safety factor between the collar extents and the set-boundary clearance.
const COLLAR_MARGIN: f64 = 1.25;

/// A one-parameter family of cutoffs for one compact set on one grid.
#[derive(Debug, Clone)]
pub struct CutoffFamily {
    set: Arc<SmoothPair>,
    j_min: f64,
}

/// The two smoothed distances a cutoff is assembled from.
#[derive(Debug)]
struct SmoothPair {
    set: crate::geometry::SmoothDistance,
    boundary: crate::geometry::SmoothDistance,
    dim: usize,
}

impl CutoffFamily {
    /// Builds the smoothed distances and records the sharpness threshold.
    pub fn new(set: &CompactSet, grid: &Grid) -> Result<Self, CapacityError> {
        let sd = regularized_distance(set, grid)?;
        let bd = regularized_boundary_distance(grid)?;
        let clearance = set.clearance(grid.domain())?;
        // Collars live within 2*M/j of their targets in true distance.
        let reach = 2.0 * (sd.equivalence + bd.equivalence);
        let j_min = COLLAR_MARGIN * reach / clearance;
        Ok(CutoffFamily {
            set: Arc::new(SmoothPair {
                dim: sd.dim(),
                set: sd,
                boundary: bd,
            }),
            j_min,
        })
    }

    /// Smallest admissible sharpness.
    pub fn j_min(&self) -> f64 {
        self.j_min
    }

    /// Recorded equivalence constant of the set distance.
    pub fn set_equivalence(&self) -> f64 {
        self.set.set.equivalence
    }

    /// The cutoff at sharpness `j`.
    pub fn at(&self, j: f64) -> Result<TestFunctionField, CapacityError> {
        if !(j >= self.j_min) {
            return Err(CapacityError::CollarOverlap {
                j,
                j_min: self.j_min,
            });
        }
        Ok(TestFunctionField {
            kind: CutoffKind::Product {
                pair: self.set.clone(),
            },
            j,
            dim: self.set.dim,
        })
    }
}

/// A cutoff (or cutoff-derived) field with analytic value, gradient and
/// Laplacian everywhere.
pub struct TestFunctionField {
    kind: CutoffKind,
    j: f64,
    dim: usize,
}

enum CutoffKind {
    /// `(1 - H(j rho_set)) * H(j rho_boundary)`
    Product { pair: Arc<SmoothPair> },
    /// `1 - prod (1 - psi_i)`
    Union { members: Vec<TestFunctionField> },
    /// `(1 - psi) * envelope`, the residual family of an approximation
    Damped {
        base: Box<TestFunctionField>,
        envelope: Arc<dyn C2Field>,
    },
}

impl std::fmt::Debug for TestFunctionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            CutoffKind::Product { .. } => "product",
            CutoffKind::Union { members } => {
                return f
                    .debug_struct("TestFunctionField")
                    .field("kind", &"union")
                    .field("members", &members.len())
                    .field("j", &self.j)
                    .finish();
            }
            CutoffKind::Damped { .. } => "damped",
        };
        f.debug_struct("TestFunctionField")
            .field("kind", &kind)
            .field("j", &self.j)
            .finish()
    }
}

/// Jet of `H(j * rho)` from the jet of `rho`.
fn stretched_transition(rho: &DistanceJet, j: f64, dim: usize) -> DistanceJet {
    let (h, dh, ddh) = transition_h(j * rho.value);
    let mut grad = [0.0; MAX_DIM];
    for d in 0..dim {
        grad[d] = j * dh * rho.grad[d];
    }
    let g2: f64 = rho.grad[..dim].iter().map(|g| g * g).sum();
    DistanceJet {
        value: h,
        grad,
        lap: j * j * ddh * g2 + j * dh * rho.lap,
    }
}

impl TestFunctionField {
    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }

    /// Value, gradient and Laplacian, assembled by exact product rules.
    pub fn jet(&self, x: &[f64]) -> DistanceJet {
        let dim = self.dim;
        match &self.kind {
            CutoffKind::Product { pair } => {
                let a = stretched_transition(&pair.set.eval(x), self.j, dim);
                let b = stretched_transition(&pair.boundary.eval(x), self.j, dim);
                // psi = (1 - a) b
                let mut grad = [0.0; MAX_DIM];
                let mut cross = 0.0;
                for d in 0..dim {
                    grad[d] = -a.grad[d] * b.value + (1.0 - a.value) * b.grad[d];
                    cross += a.grad[d] * b.grad[d];
                }
                DistanceJet {
                    value: (1.0 - a.value) * b.value,
                    grad,
                    lap: -a.lap * b.value - 2.0 * cross + (1.0 - a.value) * b.lap,
                }
            }
            CutoffKind::Union { members } => {
                let jets: Vec<DistanceJet> = members.iter().map(|m| m.jet(x)).collect();
                union_jet(&jets, dim)
            }
            CutoffKind::Damped { base, envelope } => {
                let psi = base.jet(x);
                let mut eg = [0.0; MAX_DIM];
                envelope.gradient(x, &mut eg[..dim]);
                let ev = envelope.value(x);
                let el = envelope.laplacian(x);
                let mut grad = [0.0; MAX_DIM];
                let mut cross = 0.0;
                for d in 0..dim {
                    grad[d] = -psi.grad[d] * ev + (1.0 - psi.value) * eg[d];
                    cross += psi.grad[d] * eg[d];
                }
                DistanceJet {
                    value: (1.0 - psi.value) * ev,
                    grad,
                    lap: -psi.lap * ev - 2.0 * cross + (1.0 - psi.value) * el,
                }
            }
        }
    }

    /// Sample points covering the set collar of this cutoff, dense enough to
    /// pin the sup-norm terms between grid nodes. Offsets are logarithmic
    /// with endpoints proportional to `1/j`, so the relative sample positions
    /// are identical across the whole family and fitted decay rates carry no
    /// sampling drift.
    pub fn collar_samples(&self, domain: &Domain) -> Vec<Vec<f64>> {
        match &self.kind {
            CutoffKind::Product { pair } => {
                let m = pair.set.equivalence;
                pair.set
                    .collar_points(domain, 0.5 / self.j, 2.5 * m / self.j, 48, 48)
            }
            CutoffKind::Union { members } => {
                let mut pts = Vec::new();
                for m in members {
                    pts.extend(m.collar_samples(domain));
                }
                pts
            }
            CutoffKind::Damped { base, .. } => base.collar_samples(domain),
        }
    }
}

/// Jet of `1 - prod (1 - psi_i)` from member jets.
fn union_jet(members: &[DistanceJet], dim: usize) -> DistanceJet {
    let q: Vec<f64> = members.iter().map(|m| 1.0 - m.value).collect();
    let product: f64 = q.iter().product();
    // coeff_i = prod_{l != i} q_l, pair_{il} = prod_{r != i,l} q_r
    let n = members.len();
    let mut grad = [0.0; MAX_DIM];
    let mut lap = 0.0;
    for i in 0..n {
        let coeff: f64 = (0..n).filter(|&l| l != i).map(|l| q[l]).product();
        for d in 0..dim {
            grad[d] += coeff * members[i].grad[d];
        }
        lap += coeff * members[i].lap;
        for l in (i + 1)..n {
            let pair: f64 = (0..n).filter(|&r| r != i && r != l).map(|r| q[r]).product();
            let dot: f64 = (0..dim)
                .map(|d| members[i].grad[d] * members[l].grad[d])
                .sum();
            lap -= 2.0 * pair * dot;
        }
    }
    DistanceJet {
        value: 1.0 - product,
        grad,
        lap,
    }
}

/// Union cutoff at a shared sharpness: 1 near any member set, 0 near the
/// boundary, derivatives bounded by the sums of the member terms.
pub fn combine_cutoffs(
    families: &[&CutoffFamily],
    j: f64,
) -> Result<TestFunctionField, CapacityError> {
    if families.is_empty() {
        return Err(CapacityError::MismatchedMembers {
            what: "no members".into(),
        });
    }
    let dim = families[0].set.dim;
    if families.iter().any(|f| f.set.dim != dim) {
        return Err(CapacityError::MismatchedMembers {
            what: "mixed dimensions".into(),
        });
    }
    let members: Vec<TestFunctionField> = families
        .iter()
        .map(|f| f.at(j))
        .collect::<Result<_, _>>()?;
    Ok(TestFunctionField {
        kind: CutoffKind::Union { members },
        j,
        dim,
    })
}

/// The residual field `(1 - psi) * envelope`: what is left of `envelope`
/// after the cutoff carves out the set. The family of these over a
/// `j`-schedule is the approximating sequence of the density experiments.
pub fn damped_cutoff(base: TestFunctionField, envelope: Arc<dyn C2Field>) -> TestFunctionField {
    let j = base.j;
    let dim = base.dim;
    debug_assert_eq!(envelope.dim(), dim);
    TestFunctionField {
        kind: CutoffKind::Damped {
            base: Box::new(base),
            envelope,
        },
        j,
        dim,
    }
}
