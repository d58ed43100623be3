//! The truncation dichotomy: either the truncated solutions settle into a
//! limit, or the potential eats the data and they collapse to zero.
//!
//! Along a schedule `j_0 < j_1 < ...` spanning several decades the driver
//! records the L1 norms, the absorbed masses `int V_j u_j`, the L1 gaps
//! between consecutive solutions, and one weak residual per step. The
//! verdict reads the tail of those traces:
//!
//! * gaps shrinking geometrically while the L1 norm keeps its size means
//!   the family is Cauchy with a nontrivial limit;
//! * the L1 norm collapsing under a tenth of its initial size, and still
//!   falling, means the limit is zero and no solution survives;
//! * anything else stays inconclusive rather than guessing.
//!
//! The quotient `(|u_j|_1 + int V_j u_j) / |f|` is recorded along the way;
//! its spread over the schedule is the stability constant the comparison
//! argument predicts to be uniform.

use super::measure::MeasureData;
use super::radial::{collect_dirac, radial_solve, truncate_radial, RadialMesh};
use super::transport::TransportField;
use super::truncated::{solve_truncated, truncate_potential};
use super::SolverError;
use crate::capacity::CapacitySchedule;
use crate::geometry::Grid;
use crate::par;
use crate::potential::PotentialSpec;

/// Minimum number of schedule points for a tail of three gap ratios.
const MIN_POINTS: usize = 5;
/// Minimum span of the schedule in decades.
const MIN_DECADES: f64 = 3.0;
/// Gap ratios at or below this count as geometric collapse.
const CAUCHY_RATIO: f64 = 0.75;
/// The L1 trace must keep this fraction of its initial size for a limit.
const SURVIVAL_FRACTION: f64 = 0.5;
/// Under this fraction of the initial size the limit is declared zero.
const COLLAPSE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyVerdict {
    /// The truncated family is Cauchy in L1 with a nontrivial limit.
    Exists,
    /// The truncated family collapses to zero.
    NoSolution,
    /// The traces fit neither tail pattern.
    Inconclusive,
}

/// Where the truncated problems are solved.
#[derive(Debug)]
pub enum DichotomySetting<'a> {
    /// Shell mesh, point mass at the origin, dimensions two and three.
    Radial { n: usize, mesh: &'a RadialMesh },
    /// Full grid solve, any admissible data and transport.
    Grid {
        grid: &'a Grid,
        transport: &'a TransportField,
        tol: f64,
    },
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub js: Vec<f64>,
    pub l1_trace: Vec<f64>,
    pub mass_trace: Vec<f64>,
    /// L1 distance between consecutive solutions, one per schedule step.
    pub cauchy_gaps: Vec<f64>,
    /// Absolute weak residual against the leading probe, per step.
    pub residual_trace: Vec<f64>,
    /// Largest `(|u_j|_1 + int V_j u_j) / |f|` along the schedule.
    pub c0: f64,
    /// Ratio of the largest to the smallest such quotient.
    pub c0_spread: f64,
    pub verdict: DichotomyVerdict,
}

/// Runs the truncation ladder and reads the verdict off the traces.
pub fn dichotomy_experiment(
    v: &PotentialSpec,
    f: &MeasureData,
    setting: &DichotomySetting,
    schedule: &CapacitySchedule,
) -> Result<DichotomyReport, SolverError> {
    let js = schedule.values();
    if js.len() < MIN_POINTS {
        return Err(SolverError::ScheduleTooShort {
            need: MIN_POINTS,
            got: js.len(),
        });
    }
    for w in js.windows(2) {
        assert!(w[1] > w[0], "schedule must increase");
    }
    let decades = (js[js.len() - 1] / js[0]).log10();
    if decades < MIN_DECADES - 1e-9 {
        return Err(SolverError::ScheduleTooNarrow {
            decades,
            need: MIN_DECADES,
        });
    }

    let (tv, weights) = match setting {
        DichotomySetting::Radial { n, mesh } => (
            collect_dirac(f, mesh.faces()[1])?.1,
            Weights::Nodal((0..mesh.len()).map(|i| mesh.volume(i, *n)).collect()),
        ),
        DichotomySetting::Grid { grid, .. } => {
            (f.total_variation(grid), Weights::Uniform(grid.cell_measure()))
        }
    };

    // schedule entries run concurrently; each solve is itself deterministic
    let runs = par::map_collect(js, |&j| -> Result<Step, SolverError> {
        match setting {
            DichotomySetting::Radial { n, mesh } => {
                let v_j = truncate_radial(v, j, mesh, *n);
                let r = radial_solve(*n, mesh, &v_j, f, j)?;
                Ok(Step {
                    u: r.u,
                    l1: r.l1_norm,
                    mass: r.potential_mass,
                    residual: r.residual_report[0].value.abs(),
                })
            }
            DichotomySetting::Grid {
                grid,
                transport,
                tol,
            } => {
                let v_j = truncate_potential(v, j, grid);
                let r = solve_truncated(grid, &v_j, transport, f, j, *tol)?;
                Ok(Step {
                    u: r.u,
                    l1: r.l1_norm,
                    mass: r.potential_mass,
                    residual: r.residual_report[0].value.abs(),
                })
            }
        }
    });
    let mut steps = Vec::with_capacity(js.len());
    for run in runs {
        steps.push(run?);
    }

    let l1_trace: Vec<f64> = steps.iter().map(|s| s.l1).collect();
    let mass_trace: Vec<f64> = steps.iter().map(|s| s.mass).collect();
    let residual_trace: Vec<f64> = steps.iter().map(|s| s.residual).collect();
    let cauchy_gaps: Vec<f64> = steps
        .windows(2)
        .map(|w| weights.l1_distance(&w[0].u, &w[1].u))
        .collect();

    let (c0, c0_spread) = stability_quotients(&l1_trace, &mass_trace, tv);
    let verdict = classify(&l1_trace, &cauchy_gaps, tv);

    Ok(DichotomyReport {
        js: js.to_vec(),
        l1_trace,
        mass_trace,
        cauchy_gaps,
        residual_trace,
        c0,
        c0_spread,
        verdict,
    })
}

struct Step {
    u: Vec<f64>,
    l1: f64,
    mass: f64,
    residual: f64,
}

enum Weights {
    Uniform(f64),
    Nodal(Vec<f64>),
}

impl Weights {
    fn l1_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Weights::Uniform(cell) => {
                let d = par::map_indices(a.len(), |i| (a[i] - b[i]).abs());
                cell * par::chunk_sum(&d)
            }
            Weights::Nodal(w) => (0..a.len()).map(|i| w[i] * (a[i] - b[i]).abs()).sum(),
        }
    }
}

fn stability_quotients(l1: &[f64], mass: &[f64], tv: f64) -> (f64, f64) {
    if tv <= 0.0 {
        return (0.0, 1.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (a, b) in l1.iter().zip(mass) {
        let q = (a + b) / tv;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (hi, if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

fn classify(l1: &[f64], gaps: &[f64], tv: f64) -> DichotomyVerdict {
    let m = l1.len();
    let first = l1[0];
    let last = l1[m - 1];
    let tiny = 1e-14 * first.max(tv);

    // already settled: consecutive solutions indistinguishable
    let converged = gaps[gaps.len() - 1] <= tiny && gaps[gaps.len() - 2] <= tiny;
    let tail_ratios_ok = gaps.windows(2).rev().take(3).all(|w| {
        if w[0] <= tiny {
            return w[1] <= tiny;
        }
        w[1] / w[0] <= CAUCHY_RATIO
    });
    if (converged || tail_ratios_ok) && last > SURVIVAL_FRACTION * first {
        return DichotomyVerdict::Exists;
    }
    if last < COLLAPSE_FRACTION * first && l1[m - 3] > l1[m - 2] && l1[m - 2] > l1[m - 1] {
        return DichotomyVerdict::NoSolution;
    }
    DichotomyVerdict::Inconclusive
}
