//! Smoothed distance functions with recorded equivalence constants.
//!
//! Cutoff construction composes the transition profile with a distance-like
//! function `rho`, and the capacity norm needs `grad rho` and `lap rho` in
//! closed form. Exact distances are already smooth wherever the cutoffs look
//! at them, except at interior ridge points (the center of a sphere, the
//! medial axis of a box, midpoints between point components). There the exact
//! distance is replaced:
//!
//! * finite point sets and box walls use a power softmin
//!   `rho = (sum_i d_i^{-k})^{-1/k}`, smooth away from the set and within a
//!   factor `count^(1/k)` of the true distance;
//! * spheres and the ball boundary keep the exact distance outside the half
//!   radius and blend into a constant plateau across `[r/4, r/2]`, removing
//!   the center singularity without touching values near the set.
//!
//! Each constructed distance records the achieved equivalence constant `M`
//! (`d/M <= rho <= M d`), the gradient bound `c1 = sup |grad rho|` and the
//! curvature bound `c2 = sup |rho * lap rho|`, measured over every grid node
//! plus profile-specific dense sweeps.

use std::sync::Arc;

use super::compact::{CompactKind, CompactSet};
use super::domain::{Domain, Grid, MAX_DIM};
use super::transition::transition_h;
use super::GeometryError;
use crate::par;

const SOFTMIN_K: f64 = 6.0;

/// Value, gradient and Laplacian of a scalar function at a point.
#[derive(Debug, Clone, Copy)]
pub struct DistanceJet {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub lap: f64,
}

impl DistanceJet {
    fn zero() -> Self {
        DistanceJet { value: 0.0, grad: [0.0; MAX_DIM], lap: 0.0 }
    }

    pub fn grad_norm(&self, dim: usize) -> f64 {
        self.grad[..dim].iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// One smooth branch entering a softmin.
#[derive(Debug, Clone)]
enum Branch {
    /// |x - a|
    Point(Vec<f64>),
    /// blended distance to a sphere (exact within d <= r/2 of the surface)
    Sphere { center: Vec<f64>, radius: f64 },
    /// distance to an axis wall: sign * (x_axis - offset) > 0 inside
    Face { axis: usize, sign: f64, offset: f64 },
}

impl Branch {
    fn jet(&self, x: &[f64], dim: usize) -> DistanceJet {
        match self {
            Branch::Point(a) => {
                let mut g = [0.0; MAX_DIM];
                let mut r2 = 0.0;
                for d in 0..dim {
                    g[d] = x[d] - a[d];
                    r2 += g[d] * g[d];
                }
                let r = r2.sqrt();
                if r == 0.0 {
                    return DistanceJet::zero();
                }
                for gd in g.iter_mut().take(dim) {
                    *gd /= r;
                }
                DistanceJet { value: r, grad: g, lap: (dim as f64 - 1.0) / r }
            }
            Branch::Sphere { center, radius } => sphere_blend_jet(x, center, *radius, dim),
            Branch::Face { axis, sign, offset } => {
                let mut g = [0.0; MAX_DIM];
                g[*axis] = *sign;
                DistanceJet { value: sign * (x[*axis] - offset), grad: g, lap: 0.0 }
            }
        }
    }
}

/// Radial blend shared by spheres and the ball boundary: below `s = half`,
/// the linear profile `base - s` is steered onto the constant plateau
/// `base - half/2` so nothing singular survives at the center.
fn radial_blend(s: f64, base: f64, half: f64) -> (f64, f64, f64) {
    // returns (value, d/ds, d2/ds2) of the blended profile of s
    if s >= half {
        return (base - s, -1.0, 0.0);
    }
    let quarter = half / 2.0;
    let (w, dw, ddw) = transition_h(2.0 * s / quarter);
    // value = plateau + w * (quarter_term), plateau = base - half + quarter
    let plateau = base - half + quarter;
    let lin = (base - s) - plateau; // = quarter + half - ... simplifies to (half - quarter) - (s - ...)
    let v = plateau + w * lin;
    let scale = 2.0 / quarter;
    let dv = dw * scale * lin - w;
    let ddv = ddw * scale * scale * lin - 2.0 * dw * scale;
    (v, dv, ddv)
}

fn sphere_blend_jet(x: &[f64], center: &[f64], radius: f64, dim: usize) -> DistanceJet {
    let mut g = [0.0; MAX_DIM];
    let mut s2 = 0.0;
    for d in 0..dim {
        g[d] = x[d] - center[d];
        s2 += g[d] * g[d];
    }
    let s = s2.sqrt();
    let half = radius / 2.0;
    if s >= half {
        // exact |s - radius|
        let sigma = if s >= radius { 1.0 } else { -1.0 };
        for gd in g.iter_mut().take(dim) {
            *gd *= sigma / s;
        }
        return DistanceJet {
            value: (s - radius).abs(),
            grad: g,
            lap: sigma * (dim as f64 - 1.0) / s,
        };
    }
    // inside the blend region: radial profile of s with base = radius
    let (v, dv, ddv) = radial_blend(s, radius, half);
    if s == 0.0 || dv == 0.0 {
        return DistanceJet { value: v, grad: [0.0; MAX_DIM], lap: ddv };
    }
    for gd in g.iter_mut().take(dim) {
        *gd *= dv / s;
    }
    DistanceJet { value: v, grad: g, lap: ddv + (dim as f64 - 1.0) / s * dv }
}

/// Power softmin of positive branches. Exact when there is one branch.
fn softmin_jet(branches: &[DistanceJet], k: f64, dim: usize) -> DistanceJet {
    debug_assert!(!branches.is_empty());
    if branches.len() == 1 {
        return branches[0];
    }
    let vmin = branches.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
    debug_assert!(vmin > 0.0);
    // normalized weights a_i = (vmin/v_i)^(k+1), b_i = (vmin/v_i)^(k+2),
    // s = sum (vmin/v_i)^k; rho = vmin * s^(-1/k)
    let mut s = 0.0;
    let mut ag = [0.0; MAX_DIM]; // sum a_i grad_i
    let mut al = 0.0; // sum a_i lap_i
    let mut bg2 = 0.0; // sum b_i |grad_i|^2
    for b in branches {
        let ratio = vmin / b.value;
        let rk = ratio.powf(k);
        let a = rk * ratio;
        let bb = a * ratio;
        s += rk;
        for d in 0..dim {
            ag[d] += a * b.grad[d];
        }
        al += a * b.lap;
        bg2 += bb * b.grad[..dim].iter().map(|g| g * g).sum::<f64>();
    }
    let sp = s.powf(-1.0 / k);
    let value = vmin * sp;
    let spm1 = sp / s; // s^(-1/k - 1)
    let spm2 = spm1 / s; // s^(-1/k - 2)
    let mut grad = [0.0; MAX_DIM];
    for d in 0..dim {
        grad[d] = spm1 * ag[d];
    }
    let ag2: f64 = ag[..dim].iter().map(|g| g * g).sum();
    let lap = (k + 1.0) * spm2 * ag2 / vmin + spm1 * al - (k + 1.0) * spm1 * bg2 / vmin;
    DistanceJet { value, grad, lap }
}

#[derive(Debug, Clone)]
enum Profile {
    /// softmin over smooth branches (points, spheres, box walls)
    Blend { branches: Vec<Branch>, k: f64 },
    /// distance to the boundary of a ball, blended at the center
    BallBoundary { center: Vec<f64>, radius: f64 },
    /// tabulated values with finite-difference derivative tables
    Tabulated {
        grid: Arc<Grid>,
        values: Arc<Vec<f64>>,
        grad: Arc<Vec<f64>>,
        lap: Arc<Vec<f64>>,
    },
}

/// What the smoothed distance measures, kept for equivalence sweeps.
#[derive(Debug, Clone)]
enum Target {
    Set(CompactSet),
    Boundary(Domain),
}

impl Target {
    fn exact(&self, x: &[f64]) -> f64 {
        match self {
            Target::Set(k) => k.distance(x),
            Target::Boundary(dom) => dom.boundary_gap(x),
        }
    }
}

/// A smoothed distance: node tables, an analytic evaluator, and the recorded
/// constants of the construction.
#[derive(Debug, Clone)]
pub struct SmoothDistance {
    dim: usize,
    profile: Profile,
    target: Target,
    /// rho at every grid node
    pub values: Vec<f64>,
    /// grad rho at every grid node, node-major
    pub gradient: Vec<f64>,
    /// lap rho at every grid node
    pub laplacian: Vec<f64>,
    /// recorded equivalence: d/M <= rho <= M d on the sample family
    pub equivalence: f64,
    /// recorded sup |grad rho|
    pub grad_bound: f64,
    /// recorded sup |rho lap rho|
    pub curvature_bound: f64,
}

impl SmoothDistance {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Analytic evaluation anywhere in the domain.
    pub fn eval(&self, x: &[f64]) -> DistanceJet {
        match &self.profile {
            Profile::Blend { branches, k } => {
                let jets: Vec<DistanceJet> =
                    branches.iter().map(|b| b.jet(x, self.dim)).collect();
                softmin_jet(&jets, *k, self.dim)
            }
            Profile::BallBoundary { center, radius } => {
                let mut g = [0.0; MAX_DIM];
                let mut s2 = 0.0;
                for d in 0..self.dim {
                    g[d] = x[d] - center[d];
                    s2 += g[d] * g[d];
                }
                let s = s2.sqrt();
                let (v, dv, ddv) = radial_blend(s, *radius, radius / 2.0);
                if s == 0.0 || dv == 0.0 {
                    return DistanceJet { value: v, grad: [0.0; MAX_DIM], lap: ddv };
                }
                for gd in g.iter_mut().take(self.dim) {
                    *gd *= dv / s;
                }
                DistanceJet { value: v, grad: g, lap: ddv + (self.dim as f64 - 1.0) / s * dv }
            }
            Profile::Tabulated { grid, values, grad, lap } => {
                let mut g = [0.0; MAX_DIM];
                let d = self.dim;
                for a in 0..d {
                    let comp: Vec<f64> = (0..grid.len()).map(|i| grad[i * d + a]).collect();
                    g[a] = grid.interpolate(&comp, x);
                }
                DistanceJet {
                    value: grid.interpolate(values, x),
                    grad: g,
                    lap: grid.interpolate(lap, x),
                }
            }
        }
    }

    /// Exact distance to the underlying target (for equivalence checks).
    pub fn exact_distance(&self, x: &[f64]) -> f64 {
        self.target.exact(x)
    }

    /// Sample points in the shell `lo <= rho <= hi` hugging the target set,
    /// for sup-norm evaluation between grid nodes. `radial` controls samples
    /// across the shell, `angular` the directions per component. Empty for
    /// boundary targets (cutoffs vanish identically in the boundary collar).
    pub fn collar_points(
        &self,
        domain: &Domain,
        lo: f64,
        hi: f64,
        radial: usize,
        angular: usize,
    ) -> Vec<Vec<f64>> {
        let Profile::Blend { branches, .. } = &self.profile else {
            return Vec::new();
        };
        let dim = self.dim;
        let dirs = directions(dim, angular);
        let mut pts = Vec::new();
        let ratio = (hi / lo).max(1.0 + 1e-12);
        for branch in branches {
            for step in 0..radial {
                // log-spaced offsets covering [lo, hi]
                let r = lo * ratio.powf(step as f64 / (radial.max(2) - 1) as f64);
                match branch {
                    Branch::Point(a) => {
                        for dir in &dirs {
                            let x: Vec<f64> =
                                (0..dim).map(|d| a[d] + r * dir[d]).collect();
                            if domain.contains(&x) {
                                pts.push(x);
                            }
                        }
                    }
                    Branch::Sphere { center, radius } => {
                        for dir in &dirs {
                            for side in [1.0, -1.0] {
                                let rr = radius + side * r;
                                if rr <= 0.0 {
                                    continue;
                                }
                                let x: Vec<f64> =
                                    (0..dim).map(|d| center[d] + rr * dir[d]).collect();
                                if domain.contains(&x) {
                                    pts.push(x);
                                }
                            }
                        }
                    }
                    Branch::Face { .. } => {}
                }
            }
        }
        pts
    }
}

/// Deterministic direction set: signed axes for n=1, uniform angles for n=2,
/// a Fibonacci sphere for n=3.
pub(crate) fn directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count.max(4))
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / count.max(4) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let n = count.max(8);
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = 2.0 * std::f64::consts::PI * i as f64 / golden;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

fn collect_branches(set: &CompactSet, out: &mut Vec<Branch>) -> Result<(), GeometryError> {
    match &set.kind {
        CompactKind::Points(points) => {
            out.extend(points.iter().cloned().map(Branch::Point));
            Ok(())
        }
        CompactKind::Sphere { center, radius } => {
            out.push(Branch::Sphere { center: center.clone(), radius: *radius });
            Ok(())
        }
        CompactKind::Union(members) => {
            for m in members {
                collect_branches(m, out)?;
            }
            Ok(())
        }
        CompactKind::Field { .. } => Err(GeometryError::EmptySet),
    }
}

/// Builds the smoothed distance to a compact set over a grid.
///
/// Requires positive clearance and a spacing that resolves the set
/// (`8h < clearance`). Analytic sets get analytic profiles; tabulated sets
/// fall back to interpolation with finite-difference derivative tables, and
/// their recorded constants are measured, not guaranteed.
pub fn regularized_distance(
    set: &CompactSet,
    grid: &Grid,
) -> Result<SmoothDistance, GeometryError> {
    if set.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let clearance = set.clearance(grid.domain())?;
    if clearance.is_finite() && 8.0 * grid.spacing() >= clearance {
        return Err(GeometryError::UnresolvedSet { h: grid.spacing(), clearance });
    }
    let profile = match &set.kind {
        CompactKind::Field { grid: fgrid, distance } => {
            tabulated_profile(fgrid.clone(), distance.clone())
        }
        _ => {
            let mut branches = Vec::new();
            collect_branches(set, &mut branches)?;
            if let Some(b) = branches.iter().find_map(|b| match b {
                Branch::Point(a) => Some(a.len()),
                Branch::Sphere { center, .. } => Some(center.len()),
                _ => None,
            }) {
                if b != grid.dim() {
                    return Err(GeometryError::DimensionMismatch { set: b, grid: grid.dim() });
                }
            }
            Profile::Blend { branches, k: SOFTMIN_K }
        }
    };
    finish(profile, Target::Set(set.clone()), grid)
}

/// Builds the smoothed distance to the domain boundary.
pub fn regularized_boundary_distance(grid: &Grid) -> Result<SmoothDistance, GeometryError> {
    let profile = match grid.domain() {
        Domain::Ball { center, radius } => {
            Profile::BallBoundary { center: center.clone(), radius: *radius }
        }
        Domain::Box { lo, hi } => {
            let mut branches = Vec::new();
            for d in 0..lo.len() {
                branches.push(Branch::Face { axis: d, sign: 1.0, offset: lo[d] });
                branches.push(Branch::Face { axis: d, sign: -1.0, offset: hi[d] });
            }
            Profile::Blend { branches, k: SOFTMIN_K }
        }
    };
    finish(profile, Target::Boundary(grid.domain().clone()), grid)
}

fn tabulated_profile(grid: Arc<Grid>, values: Arc<Vec<f64>>) -> Profile {
    let dim = grid.dim();
    let h = grid.spacing();
    let n = grid.len();
    let mut grad = vec![0.0; n * dim];
    let mut lap = vec![0.0; n];
    for i in 0..n {
        let mut l = 0.0;
        for d in 0..dim {
            let vp = match grid.neighbor(i, d, 1.0) {
                super::Neighbor::Node(j) => Some(values[j]),
                _ => None,
            };
            let vm = match grid.neighbor(i, d, -1.0) {
                super::Neighbor::Node(j) => Some(values[j]),
                _ => None,
            };
            grad[i * dim + d] = match (vp, vm) {
                (Some(p), Some(m)) => (p - m) / (2.0 * h),
                (Some(p), None) => (p - values[i]) / h,
                (None, Some(m)) => (values[i] - m) / h,
                (None, None) => 0.0,
            };
            if let (Some(p), Some(m)) = (vp, vm) {
                l += (p - 2.0 * values[i] + m) / (h * h);
            }
        }
        lap[i] = l;
    }
    Profile::Tabulated { grid, values, grad: Arc::new(grad), lap: Arc::new(lap) }
}

fn finish(
    profile: Profile,
    target: Target,
    grid: &Grid,
) -> Result<SmoothDistance, GeometryError> {
    let dim = grid.dim();
    let mut sd = SmoothDistance {
        dim,
        profile,
        target,
        values: Vec::new(),
        gradient: Vec::new(),
        laplacian: Vec::new(),
        equivalence: 1.0,
        grad_bound: 0.0,
        curvature_bound: 0.0,
    };
    let jets = par::map_indices(grid.len(), |i| sd.eval(grid.node(i)));
    sd.values = jets.iter().map(|j| j.value).collect();
    sd.laplacian = jets.iter().map(|j| j.lap).collect();
    sd.gradient = Vec::with_capacity(grid.len() * dim);
    for j in &jets {
        sd.gradient.extend_from_slice(&j.grad[..dim]);
    }

    // record achieved constants over nodes plus dense profile sweeps
    let mut samples: Vec<Vec<f64>> = Vec::new();
    record_sweep_samples(&sd, grid, &mut samples);
    let mut m: f64 = 1.0;
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    let scan = |x: &[f64], jet: &DistanceJet, m: &mut f64, c1: &mut f64, c2: &mut f64| {
        let d = sd.target.exact(x);
        if d > 0.0 && jet.value > 0.0 && d.is_finite() {
            *m = m.max(jet.value / d).max(d / jet.value);
        }
        *c1 = c1.max(jet.grad_norm(dim));
        *c2 = c2.max((jet.value * jet.lap).abs());
    };
    for i in 0..grid.len() {
        scan(grid.node(i), &jets[i], &mut m, &mut c1, &mut c2);
    }
    for x in &samples {
        if sd.target.exact(x) <= f64::MIN_POSITIVE {
            continue; // on the set itself: rho = 0 has no jet
        }
        let jet = sd.eval(x);
        scan(x, &jet, &mut m, &mut c1, &mut c2);
    }
    sd.equivalence = m;
    sd.grad_bound = c1;
    sd.curvature_bound = c2;
    Ok(sd)
}

/// Dense 1-D sweeps catching off-node suprema of radial profiles: along rays
/// from each point or sphere center, along segments between point pairs, and
/// along the radius for boundary blends.
fn record_sweep_samples(sd: &SmoothDistance, grid: &Grid, out: &mut Vec<Vec<f64>>) {
    let dom = grid.domain();
    let dim = sd.dim;
    let steps = 512;
    match &sd.profile {
        Profile::Blend { branches, .. } => {
            let dirs = directions(dim, 16);
            let anchors: Vec<Vec<f64>> = branches
                .iter()
                .filter_map(|b| match b {
                    Branch::Point(a) => Some(a.clone()),
                    Branch::Sphere { center, .. } => Some(center.clone()),
                    Branch::Face { .. } => None,
                })
                .collect();
            for a in &anchors {
                for dir in &dirs {
                    for s in 1..=steps {
                        let r = dom.diameter() * s as f64 / steps as f64 / 2.0;
                        let x: Vec<f64> = (0..dim).map(|d| a[d] + r * dir[d]).collect();
                        if dom.contains(&x) {
                            out.push(x);
                        }
                    }
                }
            }
            // pairwise segments: where the softmin deviates most
            for i in 0..anchors.len() {
                for j in (i + 1)..anchors.len() {
                    for s in 1..steps {
                        let t = s as f64 / steps as f64;
                        let x: Vec<f64> = (0..dim)
                            .map(|d| anchors[i][d] * (1.0 - t) + anchors[j][d] * t)
                            .collect();
                        if dom.contains(&x) {
                            out.push(x);
                        }
                    }
                }
            }
        }
        Profile::BallBoundary { center, radius } => {
            let dirs = directions(dim, 8);
            for dir in &dirs {
                for s in 1..steps {
                    let r = radius * s as f64 / steps as f64;
                    let x: Vec<f64> = (0..dim).map(|d| center[d] + r * dir[d]).collect();
                    if dom.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
        Profile::Tabulated { .. } => {}
    }
}
