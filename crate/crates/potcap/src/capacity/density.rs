//! Approximation experiments: carving a set out of a smooth field.
//!
//! For a smooth `phi` supported away from the domain boundary, the damped
//! family `phi_j = (1 - psi_j) phi` agrees with `phi` outside the collar of
//! the set and vanishes near it. Against a data function `g` the distance
//! from `phi_j` to `phi` is measured by three weighted residuals,
//!
//! ```text
//! R_V(j)    = integral |g| |phi_j - phi| V
//! R_grad(j) = integral |g| |grad phi_j - grad phi|
//! R_lap(j)  = integral |g| |lap phi_j - lap phi|
//! ```
//!
//! and `phi_j - phi = -psi_j phi` makes all three explicit collar integrals.
//! When the set has capacity zero and `g` is admissible, every residual is
//! driven to zero along the schedule: the damped fields approximate `phi`
//! in exactly the dual pairing the weak formulation uses.
//!
//! Admissibility of `g` is the vanishing-boundary-trace condition, tested by
//! `collar_mass_decay`: averages `(1/eps) integral over {delta <= eps} |g|`
//! (with `delta` the distance to the domain boundary) must shrink by at
//! least 20 percent per halving of `eps`. Data failing that test is refused,
//! because nothing can then separate interior residual decay from mass
//! parked against the boundary.

use std::sync::Arc;

use super::vnorm::{quadrature_level, vnorm};
use super::{damped_cutoff, CapacityError, CapacitySchedule, CutoffFamily, VNorm};
use crate::fields::C2Field;
use crate::geometry::{CompactSet, Grid, MAX_DIM};
use crate::par;
use crate::potential::{set_anchors, PotentialSpec};
use crate::quadrature::GradedQuadrature;

/// Collar averages must shrink by this factor per halving to certify decay.
const DECAY_FACTOR: f64 = 0.8;

/// Derivative-norm totals may drift this factor above their first value and
/// still count as uniformly bounded.
const BOUNDED_DRIFT: f64 = 1.25;

/// Record of one residual run.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub js: Vec<f64>,
    /// integral of |g| |phi_j - phi| V
    pub residual_v: Vec<f64>,
    /// integral of |g| |grad(phi_j - phi)|
    pub residual_grad: Vec<f64>,
    /// integral of |g| |lap(phi_j - phi)|
    pub residual_lap: Vec<f64>,
    /// integral of |g| V over the shared quadrature, for the record
    pub g_v_mass: f64,
    /// the admissibility evidence for `g`
    pub collar: CollarMassReport,
    /// every residual nonincreasing from the second point on
    pub tails_monotone: bool,
    /// worst over the three residuals of final / initial
    pub final_fraction: f64,
}

/// Runs the damped family of `phi` against a schedule and measures the three
/// residuals with respect to the data `g`. The support of `phi` must stay
/// clear of the domain-boundary collar at the first scheduled sharpness.
pub fn density_approximation<G>(
    phi: Arc<dyn C2Field>,
    g: G,
    set: &CompactSet,
    v: &PotentialSpec,
    grid: &Grid,
    schedule: &CapacitySchedule,
) -> Result<DensityReport, CapacityError>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let collar = collar_mass_decay(&g, grid);
    if !collar.admissible {
        return Err(CapacityError::MassNoDecay {
            ratio: collar.worst_ratio(),
        });
    }
    let family = CutoffFamily::new(set, grid)?;
    let js: Vec<f64> = schedule
        .values()
        .iter()
        .copied()
        .filter(|&j| j >= family.j_min())
        .collect();
    if js.len() < 3 {
        return Err(CapacityError::ScheduleTooShort {
            need: 3,
            got: js.len(),
        });
    }
    // One quadrature, refined for the sharpest cutoff, shared by every
    // residual: the V-weighted integrand is then pointwise monotone in j and
    // its sums inherit that exactly.
    let level = quadrature_level(js[js.len() - 1]);
    let quad = GradedQuadrature::build(grid, &set_anchors(set), level)?;
    let g_v_mass = quad.integrate(|x| g(x).abs() * v.eval(x));

    let dim = grid.dim();
    let mut residual_v = Vec::with_capacity(js.len());
    let mut residual_grad = Vec::with_capacity(js.len());
    let mut residual_lap = Vec::with_capacity(js.len());
    let points = quad.points();
    let weights = quad.weights();
    for &j in &js {
        let psi = family.at(j)?;
        // difference jet at one node: phi_j - phi = -(psi phi)
        let terms = par::map_indices(points.len(), |i| {
            let x = &points[i][..];
            let pj = psi.jet(x);
            let fv = phi.value(x);
            let mut fg = [0.0; MAX_DIM];
            phi.gradient(x, &mut fg[..dim]);
            let mut g2 = 0.0;
            let mut cross = 0.0;
            for d in 0..dim {
                let gd = pj.grad[d] * fv + pj.value * fg[d];
                g2 += gd * gd;
                cross += pj.grad[d] * fg[d];
            }
            let lap = pj.lap * fv + 2.0 * cross + pj.value * phi.laplacian(x);
            let wg = weights[i] * g(x).abs();
            [
                wg * pj.value * fv.abs() * v.eval(x),
                wg * g2.sqrt(),
                wg * lap.abs(),
            ]
        });
        let sum = |k: usize| {
            let col: Vec<f64> = terms.iter().map(|t| t[k]).collect();
            par::chunk_sum(&col)
        };
        residual_v.push(sum(0));
        residual_grad.push(sum(1));
        residual_lap.push(sum(2));
    }
    let tail_ok = |r: &[f64]| r.windows(2).skip(1).all(|w| w[1] <= w[0]);
    let tails_monotone =
        tail_ok(&residual_v) && tail_ok(&residual_grad) && tail_ok(&residual_lap);
    let fraction = |r: &[f64]| r[r.len() - 1] / r[0];
    let final_fraction = fraction(&residual_v)
        .max(fraction(&residual_grad))
        .max(fraction(&residual_lap));
    Ok(DensityReport {
        js,
        residual_v,
        residual_grad,
        residual_lap,
        g_v_mass,
        collar,
        tails_monotone,
        final_fraction,
    })
}

/// Norms of the damped family itself along a schedule.
#[derive(Debug, Clone)]
pub struct DampedFamilyReport {
    pub js: Vec<f64>,
    pub norms: Vec<VNorm>,
    /// largest total over the schedule, the recorded uniform constant
    pub sup_total: f64,
    /// no total drifted above `1.25 x` the first
    pub uniformly_bounded: bool,
}

/// Measures the candidate norm of `(1 - psi_j) phi` along a schedule. At the
/// borderline weight `V = d^{-2}` the totals are expected to stay uniformly
/// bounded even though no single cutoff wins: carving costs nothing
/// asymptotically, which is the mechanism behind upper semicontinuity
/// arguments.
pub fn damped_family_norms(
    phi: Arc<dyn C2Field>,
    set: &CompactSet,
    v: &PotentialSpec,
    grid: &Grid,
    schedule: &CapacitySchedule,
) -> Result<DampedFamilyReport, CapacityError> {
    let family = CutoffFamily::new(set, grid)?;
    let anchors = set_anchors(set);
    let js: Vec<f64> = schedule
        .values()
        .iter()
        .copied()
        .filter(|&j| j >= family.j_min())
        .collect();
    if js.len() < 3 {
        return Err(CapacityError::ScheduleTooShort {
            need: 3,
            got: js.len(),
        });
    }
    let mut norms = Vec::with_capacity(js.len());
    for &j in &js {
        let w = damped_cutoff(family.at(j)?, phi.clone());
        norms.push(vnorm(&w, v, grid, &anchors)?);
    }
    let totals: Vec<f64> = norms.iter().map(VNorm::total).collect();
    let sup_total = totals.iter().copied().fold(0.0f64, f64::max);
    let uniformly_bounded = sup_total <= BOUNDED_DRIFT * totals[0];
    Ok(DampedFamilyReport {
        js,
        norms,
        sup_total,
        uniformly_bounded,
    })
}

/// Boundary-collar averages of `|g|` at halving widths.
#[derive(Debug, Clone)]
pub struct CollarMassReport {
    pub epsilons: Vec<f64>,
    pub averages: Vec<f64>,
    /// every halving shrank the average by the decay factor
    pub admissible: bool,
}

impl CollarMassReport {
    /// Largest halving ratio observed (1.0 means no decay at all).
    pub fn worst_ratio(&self) -> f64 {
        self.averages
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(0.0f64, f64::max)
    }
}

/// Subsampling per axis for cells cut by the domain boundary or the collar
/// threshold.
const RIM_SUBSAMPLES: usize = 3;

/// Measures `(1/eps) integral over {dist(x, boundary) <= eps} of |g|` at
/// widths `diam/8, diam/16, diam/32` and checks the averages decay under
/// halving. This is the vanishing-trace test: integrable `g` with a genuine
/// zero trace loses a fixed fraction per halving, while mass that hugs the
/// boundary keeps the averages level.
pub fn collar_mass_decay<G>(g: G, grid: &Grid) -> CollarMassReport
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let diam = grid.domain().diameter();
    let epsilons: Vec<f64> = [8.0, 16.0, 32.0].iter().map(|d| diam / d).collect();
    let averages: Vec<f64> = epsilons
        .iter()
        .map(|&eps| boundary_collar_integral(&g, grid, eps) / eps)
        .collect();
    let admissible = averages.windows(2).all(|w| w[1] <= DECAY_FACTOR * w[0]);
    CollarMassReport {
        epsilons,
        averages,
        admissible,
    }
}

/// Integral of `|g|` over `{0 < dist(x, boundary) <= eps}` by a lattice
/// sweep; cells cut by either bounding surface are subsampled.
fn boundary_collar_integral<G>(g: &G, grid: &Grid, eps: f64) -> f64
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let dim = grid.dim();
    let h = grid.spacing();
    let cell = grid.cell_measure();
    let margin = 0.5 * h * (dim as f64).sqrt();
    let domain = grid.domain();
    let contributions = par::map_indices(grid.lattice_len(), |c| {
        let mut x = [0.0; MAX_DIM];
        grid.lattice_center(c, &mut x[..dim]);
        let gap = domain.boundary_gap(&x[..dim]);
        if gap <= -margin || gap >= eps + margin {
            return 0.0;
        }
        if gap >= margin && gap <= eps - margin {
            return cell * g(&x[..dim]).abs();
        }
        // cut by the boundary or the threshold: subsample
        let sub = RIM_SUBSAMPLES;
        let step = h / sub as f64;
        let w = cell / (sub.pow(dim as u32) as f64);
        let mut sum = 0.0;
        let mut y = [0.0; MAX_DIM];
        for s in 0..sub.pow(dim as u32) {
            let mut rem = s;
            for d in 0..dim {
                let k = rem % sub;
                rem /= sub;
                y[d] = x[d] - 0.5 * h + (k as f64 + 0.5) * step;
            }
            let sgap = domain.boundary_gap(&y[..dim]);
            if sgap > 0.0 && sgap <= eps {
                sum += w * g(&y[..dim]).abs();
            }
        }
        sum
    });
    par::chunk_sum(&contributions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::RadialBump;
    use crate::geometry::Domain;

    fn setup(h: f64) -> (Grid, CompactSet) {
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let grid = Grid::new(dom, h).unwrap();
        (grid, CompactSet::point(vec![0.0, 0.0]))
    }

    /// The documented instance: g vanishes at the singular point fast enough
    /// to pay for V and carries the boundary factor for the trace condition.
    fn documented_g(x: &[f64]) -> f64 {
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        r.powi(3).min(1.0) * (1.0 - r)
    }

    #[test]
    fn residuals_decay_for_the_documented_instance() {
        let (grid, k) = setup(1.0 / 48.0);
        let v = PotentialSpec::single(k.clone(), 1.0, 3.0);
        let phi: Arc<dyn C2Field> = Arc::new(RadialBump::new(vec![0.0, 0.0], 0.6));
        let s = CapacitySchedule::geometric(8.0, 2.0, 6);
        let r = density_approximation(phi, documented_g, &k, &v, &grid, &s).unwrap();
        assert!(r.collar.admissible);
        assert!(r.tails_monotone, "residuals not monotone: {r:?}");
        assert!(
            r.final_fraction < 1e-2,
            "residuals stalled at {}",
            r.final_fraction
        );
        assert!(r.g_v_mass.is_finite());
        // The V-weighted residual shares one quadrature across j, so its
        // decrease is exact from the very first step.
        assert!(r.residual_v.windows(2).all(|w| w[1] <= w[0]));
        assert!(*r.residual_v.last().unwrap() > 0.0);
    }

    #[test]
    fn data_without_boundary_decay_is_refused() {
        let (grid, k) = setup(1.0 / 48.0);
        let v = PotentialSpec::single(k.clone(), 1.0, 3.0);
        let phi: Arc<dyn C2Field> = Arc::new(RadialBump::new(vec![0.0, 0.0], 0.6));
        let s = CapacitySchedule::geometric(8.0, 2.0, 4);
        let r = density_approximation(phi, |_: &[f64]| 1.0, &k, &v, &grid, &s);
        assert!(matches!(r, Err(CapacityError::MassNoDecay { .. })));
    }

    #[test]
    fn collar_averages_separate_traces() {
        let (grid, _) = setup(1.0 / 64.0);
        // |g| ~ distance to the boundary: averages halve with eps.
        let vanishing = collar_mass_decay(
            |x: &[f64]| 1.0 - x.iter().map(|t| t * t).sum::<f64>().sqrt(),
            &grid,
        );
        assert!(vanishing.admissible, "averages {:?}", vanishing.averages);
        let ratio = vanishing.averages[1] / vanishing.averages[0];
        assert!((ratio - 0.5).abs() < 0.08, "ratio {ratio}");

        // constant |g|: averages level off at the perimeter value.
        let level = collar_mass_decay(|_: &[f64]| 1.0, &grid);
        assert!(!level.admissible, "averages {:?}", level.averages);
        assert!(level.worst_ratio() > 0.9);
    }

    #[test]
    fn borderline_weight_keeps_damped_norms_bounded() {
        let (grid, k) = setup(1.0 / 32.0);
        let v = PotentialSpec::single(k.clone(), 1.0, 2.0);
        let phi: Arc<dyn C2Field> = Arc::new(RadialBump::new(vec![0.0, 0.0], 0.6));
        let s = CapacitySchedule::geometric(8.0, 2.0, 6);
        let r = damped_family_norms(phi, &k, &v, &grid, &s).unwrap();
        assert!(r.uniformly_bounded, "totals {:?}", r.norms);
        assert!(r.sup_total.is_finite() && r.sup_total > 0.0);
    }
}
