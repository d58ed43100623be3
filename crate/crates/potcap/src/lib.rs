//! Numerical laboratory for a weighted capacity of compact sets.
//!
//! The central object is the candidate norm
//!
//! ```text
//! |psi|_{V} = ||psi||_{L1} + || |grad psi| / sqrt(V) ||_inf + || (lap psi) / V ||_inf
//! ```
//!
//! taken over smooth cutoffs `psi` that equal 1 near a compact set `K` and
//! vanish near the domain boundary. The infimum of that norm over admissible
//! cutoffs is an upper capacity for `K` relative to the weight `V`; driving it
//! to zero along an explicit cutoff schedule certifies that `K` is negligible
//! for `V`, while a floor that grows with the schedule is evidence it is not.
//!
//! The crates' modules map the pipeline end to end:
//!
//! * [`geometry`]: domains, grids, compact set descriptions, regularized
//!   distances with recorded equivalence constants, and the C^2 transition
//!   profile every cutoff is built from.
//! * [`rearrange`]: weighted samples, decreasing rearrangements, maximal
//!   averages and two-index function norms, plus the graded refinement
//!   diagnosis that classifies a weight as summable or not.
//! * [`capacity`]: cutoff construction (single sets, unions, modulated
//!   families), the candidate norm itself, capacity estimates with verdicts,
//!   decay-rate fits, and the approximation bridge that upgrades off-set
//!   residual control to full-domain control.
//! * [`solver`]: monotone finite-difference solves of
//!   `-lap u + U.grad u + V_j u = f` with truncated weights, a graded radial
//!   solver, discrete Kato inequality checks, and the existence dichotomy
//!   experiment driven by truncation schedules.
//!
//! Everything downstream of a fixed configuration is deterministic: sweeps may
//! run in parallel (feature `parallel`, on by default) but reductions use a
//! fixed chunking so results do not depend on the thread count.

#![forbid(unsafe_code)]
#![warn(missing_debug_implementations)]

pub mod capacity;
pub mod fields;
pub mod geometry;
pub mod par;
pub mod potential;
pub mod quadrature;
pub mod rearrange;
pub mod solver;

pub use capacity::{CapacityEstimate, CapacityVerdict, TestFunctionField, VNorm};
pub use geometry::{CompactSet, Domain, Grid, SmoothDistance};
pub use potential::PotentialSpec;
pub use rearrange::{LorentzNorm, Membership, MembershipReport, Rearrangement, WeightedSamples};
