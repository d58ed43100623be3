//! Cutoff families, the candidate norm, and capacity estimates.
//!
//! The pipeline: a compact set and a grid produce smoothed distances, the
//! distances produce a one-parameter family of cutoffs `psi_j` (1 near the
//! set, 0 near the domain boundary, transition collar of width `1/j`), each
//! cutoff gets its candidate norm measured against a weight `V`, and the
//! behaviour of the norm along a `j`-schedule becomes a capacity verdict:
//! driven to zero, pinned above a floor, or neither.

mod cutoff;
mod density;
mod estimate;
mod vnorm;

pub use cutoff::{combine_cutoffs, damped_cutoff, CutoffFamily, TestFunctionField};
pub use density::{
    collar_mass_decay, damped_family_norms, density_approximation, CollarMassReport,
    DampedFamilyReport, DensityReport,
};
pub use estimate::{
    decay_rates, estimate_capacity, irregular_set, nested_capacity_bounds, CapacityEstimate,
    CapacitySchedule, CapacityVerdict, DecayRates, IRREGULAR_EXPONENT,
};
pub use vnorm::{vnorm, VNorm};

use crate::geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cutoff level j = {j} is below the collar-separation threshold {j_min}")]
    CollarOverlap { j: f64, j_min: f64 },
    #[error("schedule keeps {got} admissible levels, need at least {need}")]
    ScheduleTooShort { need: usize, got: usize },
    #[error("admissible schedule spans {decades:.2} decades, need at least {need}")]
    ScheduleTooNarrow { decades: f64, need: f64 },
    #[error("decay-rate fit needs a weight exponent m > 2, got m = {m}")]
    ExponentTooTame { m: f64 },
    #[error("cutoff members disagree: {what}")]
    MismatchedMembers { what: String },
    #[error(
        "boundary-collar averages of |g| do not decay (worst halving ratio {ratio:.3}); \
         the data fails the vanishing-trace admissibility test"
    )]
    MassNoDecay { ratio: f64 },
}
