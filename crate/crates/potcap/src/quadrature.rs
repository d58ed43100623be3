//! Graded quadrature around singular anchors.
//!
//! A plain lattice sum cannot see a power singularity: halving `h` only
//! doubles the resolved dynamic range. The rule here keeps the lattice for
//! the bulk and swaps the cells near each anchor for exact radial shells
//! whose radii shrink geometrically, so deepening the refinement `level`
//! multiplies the resolved range by 8 per level at O(level) extra nodes.
//!
//! Invariant: the weights sum to the domain measure up to the staircase
//! error of the bulk lattice (shell and core volumes are exact; straddle
//! cells are subsampled). Integrands are evaluated pointwise, so the same
//! rule serves both integrals of a potential and integrals against test
//! function residuals.

use crate::geometry::{Domain, GeometryError, Grid};
use crate::par;
use crate::potential::SingularAnchor;

/// Per-level shrink factor of the innermost resolved radius.
pub const LEVEL_SHRINK: f64 = 8.0;

/// Subshells per octave of radius. Finer subdivision buys accuracy of the
/// piecewise-constant-in-shell representation, not of the measure.
const SHELLS_PER_OCTAVE: usize = 4;

/// Subsamples per axis when a cell straddles the domain boundary or the
/// rim of a graded ball.
const STRADDLE_SUBSAMPLES: usize = 3;

#[derive(Debug, Clone)]
struct AnchorShells {
    /// Distances to the anchor locus are measured by `SingularAnchor::locus_distance`.
    anchor: SingularAnchor,
    /// Outer radius of the graded region.
    r0: f64,
    /// Unit direction from the locus toward sample points.
    dir: Vec<f64>,
}

/// Points and weights of a graded rule on a gridded domain.
#[derive(Debug, Clone)]
pub struct GradedQuadrature {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// Index of the first shell point; everything before it is bulk lattice.
    bulk_len: usize,
    /// Innermost resolved radius, the smallest over all anchors.
    r_min: f64,
    total: f64,
}

impl GradedQuadrature {
    /// Builds the rule at the given refinement level. Level 0 already grades
    /// down to `r0 / 8`; each further level appends one more decade-of-2
    /// block of shells per anchor. Without anchors the rule degenerates to
    /// the (boundary-corrected) lattice sum.
    pub fn build(
        grid: &Grid,
        anchors: &[SingularAnchor],
        level: usize,
    ) -> Result<Self, GeometryError> {
        let domain = grid.domain();
        let dim = domain.dim();
        let shells = plan_shells(domain, anchors)?;

        let h = grid.spacing();
        // The bulk lattice must resolve each graded region, else the cell
        // exclusion degenerates to a staircase of a handful of cells.
        for s in &shells {
            if s.r0 < 4.0 * h {
                return Err(GeometryError::UnresolvedSet {
                    h,
                    clearance: s.r0,
                });
            }
        }
        let cell = grid.cell_measure();
        let margin = 0.5 * h * (dim as f64).sqrt();

        let lattice = grid.lattice_len();
        let chunks: Vec<(Vec<Vec<f64>>, Vec<f64>)> = par::map_indices(lattice, |c| {
            let mut x = vec![0.0; dim];
            grid.lattice_center(c, &mut x);
            let gap = domain.boundary_gap(&x);
            let rim = shells
                .iter()
                .map(|s| s.anchor.locus_distance(&x) - s.r0)
                .fold(f64::INFINITY, f64::min);
            if gap <= -margin || rim <= -margin {
                return (Vec::new(), Vec::new());
            }
            if gap >= margin && rim >= margin {
                return (vec![x], vec![cell]);
            }
            // Straddle cell: fraction inside the domain and outside every
            // graded ball, by midpoint subsampling. The representative point
            // must itself be admissible, so the integrand stays finite.
            let (frac, rep) = straddle_fraction(domain, &shells, &x, h);
            match rep {
                Some(rep) if frac > 0.0 => (vec![rep], vec![cell * frac]),
                _ => (Vec::new(), Vec::new()),
            }
        });

        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, w) in chunks {
            points.extend(p);
            weights.extend(w);
        }
        let bulk_len = points.len();

        // Exact shells, outermost first, then the truncated core.
        let steps = SHELLS_PER_OCTAVE * 3 * (level + 1);
        let factor = 2f64.powf(-1.0 / SHELLS_PER_OCTAVE as f64);
        let mut r_min = f64::INFINITY;
        for s in &shells {
            let radii: Vec<f64> = (0..=steps).map(|t| s.r0 * factor.powi(t as i32)).collect();
            for w in radii.windows(2) {
                let (outer, inner) = (w[0], w[1]);
                let vol = s.anchor.shell_volume(dim, inner, outer);
                let r_med = median_radius(dim, inner, outer);
                points.push(s.anchor.offset_point(&s.dir, r_med));
                weights.push(vol);
            }
            let r_core = radii[steps];
            let vol = s.anchor.shell_volume(dim, 0.0, r_core);
            let r_med = median_radius(dim, 0.0, r_core);
            points.push(s.anchor.offset_point(&s.dir, r_med));
            weights.push(vol);
            r_min = r_min.min(r_core);
        }

        let total = par::chunk_sum(&weights);
        Ok(GradedQuadrature {
            points,
            weights,
            bulk_len,
            r_min,
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bulk_len(&self) -> usize {
        self.bulk_len
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Sum of all weights; equals the domain measure up to lattice staircase
    /// error at the domain boundary.
    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// Integrates a pointwise function against the rule.
    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> f64 {
        let terms: Vec<f64> =
            par::map_indices(self.points.len(), |i| self.weights[i] * f(&self.points[i]));
        par::chunk_sum(&terms)
    }

    /// Pointwise values of `f`, aligned with `weights()`.
    pub fn evaluate<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        par::map_indices(self.points.len(), |i| f(&self.points[i]))
    }
}

fn plan_shells(
    domain: &Domain,
    anchors: &[SingularAnchor],
) -> Result<Vec<AnchorShells>, GeometryError> {
    let dim = domain.dim();
    let mut shells = Vec::with_capacity(anchors.len());
    for (i, a) in anchors.iter().enumerate() {
        let clearance = a.boundary_clearance(domain);
        let mut sep = f64::INFINITY;
        for (j, b) in anchors.iter().enumerate() {
            if i != j {
                sep = sep.min(a.locus_separation(b));
            }
        }
        let r0 = 0.4 * clearance.min(sep).min(0.5 * domain.diameter());
        if !(r0 > 0.0) {
            return Err(GeometryError::SetTouchesBoundary { clearance: r0 });
        }
        // Sample direction: toward the domain center keeps offset points
        // interior; fall back to the first axis for a centered anchor.
        let center = domain.center();
        let locus = a.locus_center();
        let mut dir: Vec<f64> = (0..dim).map(|d| center[d] - locus[d]).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in &mut dir {
                *v /= norm;
            }
        } else {
            dir.iter_mut().for_each(|v| *v = 0.0);
            dir[0] = 1.0;
        }
        shells.push(AnchorShells {
            anchor: a.clone(),
            r0,
            dir,
        });
    }
    Ok(shells)
}

fn straddle_fraction(
    domain: &Domain,
    shells: &[AnchorShells],
    center: &[f64],
    h: f64,
) -> (f64, Option<Vec<f64>>) {
    let dim = domain.dim();
    let m = STRADDLE_SUBSAMPLES;
    let sub = m.pow(dim as u32);
    let mut x = vec![0.0; dim];
    let mut hit = 0usize;
    let mut rep: Option<(f64, Vec<f64>)> = None;
    for s in 0..sub {
        let mut rem = s;
        for d in 0..dim {
            let i = rem % m;
            rem /= m;
            x[d] = center[d] + h * ((i as f64 + 0.5) / m as f64 - 0.5);
        }
        let inside = domain.boundary_gap(&x) > 0.0
            && shells.iter().all(|s| s.anchor.locus_distance(&x) >= s.r0);
        if inside {
            hit += 1;
            // Representative: the admissible subsample nearest the center.
            let d2: f64 = x
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if rep.as_ref().map_or(true, |(best, _)| d2 < *best) {
                rep = Some((d2, x.clone()));
            }
        }
    }
    (hit as f64 / sub as f64, rep.map(|(_, p)| p))
}

/// Radius splitting the shell `[inner, outer]` into equal volumes; the
/// representative point of a piecewise-constant-in-shell integrand.
fn median_radius(dim: usize, inner: f64, outer: f64) -> f64 {
    let n = dim as f64;
    (0.5 * (inner.powf(n) + outer.powf(n))).powf(1.0 / n)
}
