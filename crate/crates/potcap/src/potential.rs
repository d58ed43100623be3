//! Weights of distance-power type and tabulated weights.

use std::sync::Arc;

use crate::geometry::{CompactSet, Grid};

/// One term `b * d(x; A)^(-m)` of a distance-power weight.
#[derive(Debug, Clone)]
pub struct PotentialTerm {
    pub set: CompactSet,
    /// coefficient, must be positive
    pub coefficient: f64,
    /// exponent, must be nonnegative; `m = 0` is the constant `b`
    pub exponent: f64,
}

/// A nonnegative weight `V`. Either a finite sum of distance powers, whose
/// singular structure is known analytically, or a tabulated node field.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    DistancePowerSum(Vec<PotentialTerm>),
    Tabulated { grid: Arc<Grid>, values: Arc<Vec<f64>> },
}

impl PotentialSpec {
    pub fn single(set: CompactSet, coefficient: f64, exponent: f64) -> Self {
        assert!(coefficient > 0.0, "coefficient must be positive");
        assert!(exponent >= 0.0, "exponent must be nonnegative");
        PotentialSpec::DistancePowerSum(vec![PotentialTerm { set, coefficient, exponent }])
    }

    pub fn sum(terms: Vec<PotentialTerm>) -> Self {
        assert!(terms.iter().all(|t| t.coefficient > 0.0 && t.exponent >= 0.0));
        PotentialSpec::DistancePowerSum(terms)
    }

    pub fn tabulated(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        assert!(values.iter().all(|&v| v >= 0.0), "weight must be nonnegative");
        PotentialSpec::Tabulated { grid, values: Arc::new(values) }
    }

    /// Evaluates `V(x)`. On a singular set the value is `+inf`; grids keep
    /// nodes off singular points, so node evaluations stay finite.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PotentialSpec::DistancePowerSum(terms) => terms
                .iter()
                .map(|t| {
                    if t.exponent == 0.0 {
                        t.coefficient
                    } else {
                        let d = t.set.distance(x);
                        if d == 0.0 {
                            f64::INFINITY
                        } else {
                            t.coefficient * d.powf(-t.exponent)
                        }
                    }
                })
                .sum(),
            PotentialSpec::Tabulated { grid, values } => grid.interpolate(values, x),
        }
    }

    /// The terms with their singular sets, when the weight is analytic.
    pub fn terms(&self) -> Option<&[PotentialTerm]> {
        match self {
            PotentialSpec::DistancePowerSum(t) => Some(t),
            PotentialSpec::Tabulated { .. } => None,
        }
    }

    /// Anchor points of singular components (point components and sphere
    /// centers with positive exponent), used by graded quadratures.
    pub fn singular_anchors(&self) -> Vec<SingularAnchor> {
        let mut out = Vec::new();
        if let PotentialSpec::DistancePowerSum(terms) = self {
            for t in terms {
                if t.exponent > 0.0 {
                    collect_anchors(&t.set, &mut out);
                }
            }
        }
        out
    }
}

/// A singular locus around which integrands need graded resolution.
#[derive(Debug, Clone)]
pub enum SingularAnchor {
    Point(Vec<f64>),
    Sphere { center: Vec<f64>, radius: f64 },
}

impl SingularAnchor {
    /// Distance from `x` to the locus.
    pub fn locus_distance(&self, x: &[f64]) -> f64 {
        match self {
            SingularAnchor::Point(a) => crate::geometry::dist(x, a),
            SingularAnchor::Sphere { center, radius } => {
                (crate::geometry::dist(x, center) - radius).abs()
            }
        }
    }

    /// A reference point of the locus (the point itself, or the sphere
    /// center), used only to pick sampling directions.
    pub fn locus_center(&self) -> &[f64] {
        match self {
            SingularAnchor::Point(a) => a,
            SingularAnchor::Sphere { center, .. } => center,
        }
    }

    /// Gap between the locus and the domain boundary.
    pub fn boundary_clearance(&self, domain: &crate::geometry::Domain) -> f64 {
        match self {
            SingularAnchor::Point(a) => domain.boundary_gap(a),
            SingularAnchor::Sphere { center, radius } => domain.boundary_gap(center) - radius,
        }
    }

    /// Distance between two loci, the width of the corridor separating their
    /// graded regions.
    pub fn locus_separation(&self, other: &SingularAnchor) -> f64 {
        use SingularAnchor::*;
        match (self, other) {
            (Point(a), Point(b)) => crate::geometry::dist(a, b),
            (Point(a), Sphere { center, radius }) | (Sphere { center, radius }, Point(a)) => {
                (crate::geometry::dist(a, center) - radius).abs()
            }
            (
                Sphere { center: c1, radius: r1 },
                Sphere { center: c2, radius: r2 },
            ) => {
                let d = crate::geometry::dist(c1, c2);
                // Nested or side-by-side spheres; either way the closest
                // approach of the two surfaces.
                (d - r1 - r2).abs().min((d - (r1 - r2).abs()).abs())
            }
        }
    }

    /// Exact volume of `{ inner <= locus_distance <= outer }` while `outer`
    /// stays below the sphere radius (tube shells must not swallow the
    /// enclosed ball).
    pub fn shell_volume(&self, dim: usize, inner: f64, outer: f64) -> f64 {
        let ubv = crate::geometry::unit_ball_volume(dim);
        let n = dim as i32;
        match self {
            SingularAnchor::Point(_) => ubv * (outer.powi(n) - inner.powi(n)),
            SingularAnchor::Sphere { radius, .. } => {
                let band = |r: f64| {
                    ubv * ((radius + r).powi(n) - (radius - r).max(0.0).powi(n))
                };
                band(outer) - band(inner)
            }
        }
    }

    /// Point at distance `r` from the locus along `dir` (outward of the
    /// sphere for a sphere locus).
    pub fn offset_point(&self, dir: &[f64], r: f64) -> Vec<f64> {
        match self {
            SingularAnchor::Point(a) => {
                a.iter().zip(dir).map(|(c, d)| c + r * d).collect()
            }
            SingularAnchor::Sphere { center, radius } => center
                .iter()
                .zip(dir)
                .map(|(c, d)| c + (radius + r) * d)
                .collect(),
        }
    }
}

/// Anchors of a compact set itself, for quadratures that must resolve the
/// geometry around the set rather than around a weight.
pub fn set_anchors(set: &CompactSet) -> Vec<SingularAnchor> {
    let mut out = Vec::new();
    collect_anchors(set, &mut out);
    out
}

fn collect_anchors(set: &CompactSet, out: &mut Vec<SingularAnchor>) {
    use crate::geometry::CompactKind;
    match &set.kind {
        CompactKind::Points(points) => {
            out.extend(points.iter().cloned().map(SingularAnchor::Point));
        }
        CompactKind::Sphere { center, radius } => {
            out.push(SingularAnchor::Sphere { center: center.clone(), radius: *radius });
        }
        CompactKind::Union(members) => {
            for m in members {
                collect_anchors(m, out);
            }
        }
        CompactKind::Field { .. } => {}
    }
}
