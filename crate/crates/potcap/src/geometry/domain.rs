//! Domains and cell-centered grids.
//!
//! Only balls and axis-aligned boxes are supported; both are convex, so the
//! distance to the boundary along a coordinate axis is single-valued and the
//! cut-cell fractions used by the solver are well defined. Grid nodes are
//! cell centers offset half a spacing from the lattice corner, which keeps
//! configured singular points off the node set.

use super::GeometryError;

pub const MAX_DIM: usize = 3;
const MAX_LATTICE_CELLS: usize = 40_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if center.is_empty() || center.len() > MAX_DIM {
            return Err(GeometryError::UnsupportedDimension(center.len()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::EmptyDomain);
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn rect(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        if lo.is_empty() || lo.len() > MAX_DIM || lo.len() != hi.len() {
            return Err(GeometryError::UnsupportedDimension(lo.len()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(b > a) || !a.is_finite() || !b.is_finite()) {
            return Err(GeometryError::EmptyDomain);
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    /// Distance from `x` to the boundary, negative outside.
    pub fn boundary_gap(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => {
                let r = dist(x, center);
                radius - r
            }
            Domain::Box { lo, hi } => {
                let mut gap = f64::INFINITY;
                for d in 0..lo.len() {
                    gap = gap.min(x[d] - lo[d]).min(hi[d] - x[d]);
                }
                gap
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_gap(x) > 0.0
    }

    /// Distance from `x` to the boundary along `sign * e_axis`; `x` must be
    /// inside. Well defined because the domain is convex.
    pub fn axis_gap(&self, x: &[f64], axis: usize, sign: f64) -> f64 {
        match self {
            Domain::Ball { center, radius } => {
                let a = x[axis] - center[axis];
                let mut perp2 = 0.0;
                for d in 0..center.len() {
                    if d != axis {
                        let e = x[d] - center[d];
                        perp2 += e * e;
                    }
                }
                let disc = (radius * radius - perp2).max(0.0).sqrt();
                disc - sign * a
            }
            Domain::Box { lo, hi } => {
                if sign > 0.0 {
                    hi[axis] - x[axis]
                } else {
                    x[axis] - lo[axis]
                }
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    /// Geometric center (ball center or box midpoint).
    pub fn center(&self) -> Vec<f64> {
        match self {
            Domain::Ball { center, .. } => center.clone(),
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Exact volume.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
        }
    }
}

/// Volume of the unit ball in `n` dimensions, n <= 3.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Surface area of the unit sphere in `n` dimensions (boundary of the unit
/// ball), n <= 3.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {n}"),
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// What lies one lattice step away from a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor {
    /// Another node.
    Node(usize),
    /// The boundary, at `theta * h` along the step, `0 < theta <= 1`.
    Boundary { theta: f64 },
}

/// Cell-centered grid over a domain. Nodes are the lattice cell centers that
/// fall strictly inside; every node keeps its integer lattice coordinates so
/// stencil neighbors resolve in O(1).
#[derive(Debug, Clone)]
pub struct Grid {
    domain: Domain,
    h: f64,
    origin: Vec<f64>,
    extents: Vec<usize>,
    /// raster over the bounding-box lattice: node id + 1, or 0 for no node
    raster: Vec<u32>,
    coords: Vec<f64>,
    lattice: Vec<u32>,
    boundary_gap: Vec<f64>,
}

impl Grid {
    pub fn new(domain: Domain, h: f64) -> Result<Self, GeometryError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeometryError::InvalidSpacing(h));
        }
        let dim = domain.dim();
        let (lo, hi) = domain.bounding_box();
        let mut extents = Vec::with_capacity(dim);
        let mut cells = 1usize;
        for d in 0..dim {
            let n = ((hi[d] - lo[d]) / h).ceil() as usize;
            let n = n.max(1);
            cells = cells
                .checked_mul(n)
                .filter(|&c| c <= MAX_LATTICE_CELLS)
                .ok_or(GeometryError::GridTooLarge)?;
            extents.push(n);
        }

        let mut raster = vec![0u32; cells];
        let mut coords = Vec::new();
        let mut lattice = Vec::new();
        let mut boundary_gap = Vec::new();
        let mut x = vec![0.0; dim];
        let mut idx = vec![0usize; dim];
        let mut count: u32 = 0;
        for cell in 0..cells {
            let mut rem = cell;
            for d in 0..dim {
                idx[d] = rem % extents[d];
                rem /= extents[d];
                x[d] = lo[d] + (idx[d] as f64 + 0.5) * h;
            }
            let gap = domain.boundary_gap(&x);
            if gap > 0.0 {
                count = count
                    .checked_add(1)
                    .ok_or(GeometryError::GridTooLarge)?;
                raster[cell] = count;
                coords.extend_from_slice(&x);
                lattice.extend(idx.iter().map(|&i| i as u32));
                boundary_gap.push(gap);
            }
        }
        if count == 0 {
            return Err(GeometryError::EmptyDomain);
        }
        Ok(Grid {
            domain,
            h,
            origin: lo,
            extents,
            raster,
            coords,
            lattice,
            boundary_gap,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.boundary_gap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn boundary_gap(&self, i: usize) -> f64 {
        self.boundary_gap[i]
    }

    fn cell_of_lattice(&self, idx: &[i64]) -> Option<usize> {
        let mut cell = 0usize;
        let mut stride = 1usize;
        for d in 0..self.dim() {
            if idx[d] < 0 || idx[d] >= self.extents[d] as i64 {
                return None;
            }
            cell += idx[d] as usize * stride;
            stride *= self.extents[d];
        }
        Some(cell)
    }

    /// Node at the given lattice coordinates, if any.
    pub fn node_at(&self, idx: &[i64]) -> Option<usize> {
        let cell = self.cell_of_lattice(idx)?;
        match self.raster[cell] {
            0 => None,
            id => Some(id as usize - 1),
        }
    }

    /// Node containing the point `x`, if the containing cell center is a node.
    pub fn node_containing(&self, x: &[f64]) -> Option<usize> {
        let mut idx = [0i64; MAX_DIM];
        for d in 0..self.dim() {
            idx[d] = ((x[d] - self.origin[d]) / self.h).floor() as i64;
        }
        self.node_at(&idx[..self.dim()])
    }

    /// Stencil neighbor of node `i` one step along `sign * e_axis`.
    pub fn neighbor(&self, i: usize, axis: usize, sign: f64) -> Neighbor {
        let d = self.dim();
        let mut idx = [0i64; MAX_DIM];
        for k in 0..d {
            idx[k] = self.lattice[i * d + k] as i64;
        }
        idx[axis] += if sign > 0.0 { 1 } else { -1 };
        if let Some(j) = self.node_at(&idx[..d]) {
            return Neighbor::Node(j);
        }
        let t = self.domain.axis_gap(self.node(i), axis, sign);
        // The neighbor cell center is outside (or inside the box but outside
        // the domain); the wall sits within one step by convexity.
        let theta = (t / self.h).clamp(f64::MIN_POSITIVE, 1.0);
        Neighbor::Boundary { theta }
    }

    /// Number of cells in the bounding-box lattice (nodes and non-nodes).
    pub fn lattice_len(&self) -> usize {
        self.raster.len()
    }

    /// Center of lattice cell `cell`, written into `out`.
    pub fn lattice_center(&self, cell: usize, out: &mut [f64]) {
        let mut rem = cell;
        for d in 0..self.dim() {
            let i = rem % self.extents[d];
            rem /= self.extents[d];
            out[d] = self.origin[d] + (i as f64 + 0.5) * self.h;
        }
    }

    /// Multilinear interpolation of a node field at `x`. Missing corners of
    /// the surrounding cell (outside the domain) contribute the fallback of
    /// the nearest available corner, which keeps the result defined up to the
    /// boundary.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = [0i64; MAX_DIM];
        let mut frac = [0.0f64; MAX_DIM];
        for k in 0..d {
            let s = (x[k] - self.origin[k]) / self.h - 0.5;
            let f = s.floor();
            base[k] = f as i64;
            frac[k] = s - f;
        }
        let mut acc = 0.0;
        let mut weight_sum = 0.0;
        let corners = 1usize << d;
        let mut fallback = f64::NAN;
        for c in 0..corners {
            let mut idx = [0i64; MAX_DIM];
            let mut w = 1.0;
            for k in 0..d {
                let bit = (c >> k) & 1;
                idx[k] = base[k] + bit as i64;
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
            }
            if let Some(j) = self.node_at(&idx[..d]) {
                acc += w * values[j];
                weight_sum += w;
                if fallback.is_nan() || w > 0.5 {
                    fallback = values[j];
                }
            }
        }
        if weight_sum > 0.0 {
            acc / weight_sum
        } else if !fallback.is_nan() {
            fallback
        } else {
            // No surrounding node: take the nearest node by containing cell.
            self.node_containing(x).map(|j| values[j]).unwrap_or(0.0)
        }
    }
}
