//! Monotone finite-difference solves of `-lap u + U.grad u + V_j u = f`.
//!
//! Everything here works with the truncated weights `V_j = min(V, j)`: the
//! truncation keeps every linear system bounded, and the behaviour of the
//! solutions as `j` grows is the object of study, not an error to hide. The
//! pieces:
//!
//! * [`assemble`] builds the operator rows (Shortley-Weller cut cells at the
//!   boundary, first-order upwinding for the drift) so that every matrix is
//!   an M-matrix.
//! * [`solve_truncated`] runs one lattice solve and reports the norms,
//!   residual probes and the weak Lorentz gradient proxy.
//! * [`radial_solve`] is the graded one-dimensional lane for radially
//!   symmetric weights with a point mass at the origin; its two-point fluxes
//!   are exact for harmonic profiles, so free-space comparisons are sharp.
//! * [`dichotomy_experiment`] drives a whole truncation schedule and
//!   classifies the run: the solutions settle into a limit, collapse to
//!   zero, or neither.
//! * [`removability_check`] audits a candidate solution on the punctured
//!   domain against a zero-capacity certificate for the singular set.
//! * [`kato_check`] verifies the discrete Kato inequality and the maximum
//!   principle on concrete pairs, including seeded random ones.
//!
//! Individual solves are deterministic and independent of the thread count;
//! schedule entries may run concurrently.

mod assemble;
mod dichotomy;
mod kato;
mod measure;
mod radial;
mod removable;
mod sparse;
mod transport;
mod truncated;

pub use assemble::{assemble, laplacian};
pub use dichotomy::{dichotomy_experiment, DichotomyReport, DichotomySetting, DichotomyVerdict};
pub use kato::{kato_check, random_pair, KatoReport};
pub use measure::MeasureData;
pub use radial::{radial_solve, truncate_radial, RadialMesh, RadialSolveResult};
pub use removable::{removability_check, RemovabilityReport};
pub use sparse::{bicgstab, thomas, Csr, LinearSolve};
pub use transport::{TransportCheck, TransportField, TRANSPORT_TOL};
pub use truncated::{
    solve_truncated, truncate_potential, weak_residual, ProbeResidual, TruncatedSolveResult,
    DEFAULT_SOLVE_TOL,
};

use crate::capacity::CapacityError;
use crate::geometry::GeometryError;
use crate::rearrange::RearrangeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
    #[error(
        "transport field breaks the contract (max divergence {divergence:.3e}, \
         max outward boundary flux {flux:.3e})"
    )]
    TransportContract { divergence: f64, flux: f64 },
    #[error("point mass falls outside the covered cells of the grid")]
    MassOutsideDomain,
    #[error("radial solves take exactly one point mass at the origin")]
    NotRadialDirac,
    #[error("probe does not vanish at the domain boundary (trace magnitude {value:.3e})")]
    ProbeNotVanishing { value: f64 },
    #[error("linear solve stalled after {iterations} iterations at relative residual {residual:.3e}")]
    SolveFailure { iterations: usize, residual: f64 },
    #[error("pair does not satisfy -lap w = rhs (relative residual {residual:.3e})")]
    InconsistentPair { residual: f64 },
    #[error("radial solver handles n = 2 and n = 3, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("truncation schedule keeps {got} levels, need at least {need}")]
    ScheduleTooShort { need: usize, got: usize },
    #[error("truncation schedule spans {decades:.2} decades, need at least {need}")]
    ScheduleTooNarrow { decades: f64, need: f64 },
    #[error("removability needs a zero-capacity certificate, the given estimate is not one")]
    MissingCertificate,
    #[error(
        "certificate was computed for different data (recorded norm {recorded:.3e}, \
         recomputed {recomputed:.3e})"
    )]
    CertificateMismatch { recorded: f64, recomputed: f64 },
    #[error("candidate has non-finite weighted mass on this grid")]
    CandidateNotIntegrable,
}
