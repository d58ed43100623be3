//! Scalar fields with analytic first and second derivatives.
//!
//! Cutoff assembly, weak residuals and the approximation experiments all need
//! C^2 data they can evaluate at arbitrary points, not just at grid nodes.
//! Derivatives are always assembled from closed-form expressions; nothing in
//! this module differentiates numerically.

use crate::geometry::transition_h;

/// A twice differentiable scalar field on R^n.
pub trait C2Field: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Writes grad into `out` (length `dim`).
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn laplacian(&self, x: &[f64]) -> f64;
}

/// Radial C^2 bump: value 1 at `center`, support exactly the closed ball of
/// radius `radius`. Profile `t -> H(2 - r/radius)` built from the quintic
/// transition, so value, gradient and Laplacian all vanish at the support
/// boundary and the field is C^2 across it.
#[derive(Debug, Clone)]
pub struct RadialBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl RadialBump {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self { center, radius }
    }

    fn r(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl C2Field for RadialBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (h, _, _) = transition_h(2.0 - self.r(x) / self.radius);
        h
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let r = self.r(x);
        if r == 0.0 || r >= self.radius {
            out.fill(0.0);
            return;
        }
        let (_, dh, _) = transition_h(2.0 - r / self.radius);
        let scale = -dh / (self.radius * r);
        for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(&self.center)) {
            *o = scale * (a - b);
        }
    }

    fn laplacian(&self, x: &[f64]) -> f64 {
        let r = self.r(x);
        if r >= self.radius {
            return 0.0;
        }
        let n = self.dim() as f64;
        let (_, dh, ddh) = transition_h(2.0 - r / self.radius);
        if r == 0.0 {
            // Smooth radial profile: lap = n * f''(0); H' and H'' vanish at
            // t = 2 so this is 0, kept explicit for the r -> 0 limit.
            return n * ddh / (self.radius * self.radius);
        }
        // f(r) = H(2 - r/R): f' = -H'/R, f'' = H''/R^2.
        ddh / (self.radius * self.radius) - (n - 1.0) / r * dh / self.radius
    }
}

/// Polynomial bump `((R^2 - |x-c|^2)_+ / R^2)^2`: C^1 with Lipschitz gradient
/// and piecewise-polynomial Laplacian, cheap to evaluate. Vanishes to second
/// order on the sphere `|x-c| = R`, so it is an admissible zero-trace probe.
#[derive(Debug, Clone)]
pub struct PolyBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl PolyBump {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self { center, radius }
    }
}

impl C2Field for PolyBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let rr = self.radius * self.radius;
        let s = (rr - r2).max(0.0) / rr;
        s * s
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let rr = self.radius * self.radius;
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if r2 >= rr {
            out.fill(0.0);
            return;
        }
        // d/dx (1 - r2/rr)^2 = 2(1 - r2/rr) * (-2 (x-c)/rr)
        let scale = -4.0 * (1.0 - r2 / rr) / rr;
        for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(&self.center)) {
            *o = scale * (a - b);
        }
    }

    fn laplacian(&self, x: &[f64]) -> f64 {
        let rr = self.radius * self.radius;
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if r2 >= rr {
            return 0.0;
        }
        let n = self.dim() as f64;
        // lap (1 - r2/rr)^2 = -4n/rr (1 - r2/rr) + 8 r2 / rr^2
        -4.0 * n / rr * (1.0 - r2 / rr) + 8.0 * r2 / (rr * rr)
    }
}

/// Mollifier bump `exp(1 - 1/(1 - |x-c|^2/R^2))` on `|x-c| < R`: flat to all
/// orders on the sphere. Lattice quadratures of anything it multiplies
/// converge beyond every algebraic order, so pairings against it measure the
/// paired object alone, with no joint noise from the probe. The finitely
/// smooth bumps all shed an O(h^p) quadrature term of their own that can
/// drown a convergence-order measurement.
#[derive(Debug, Clone)]
pub struct MollifierBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Shape factors below this leave the value underflowed to zero anyway, and
/// guarding here keeps `0 * inf` out of the derivative formulas.
const MOLLIFIER_FLOOR: f64 = 1e-8;

impl MollifierBump {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self { center, radius }
    }

    /// `(w, r2)` with `w = 1 - r^2/R^2` clamped at the support edge.
    fn shape(&self, x: &[f64]) -> (f64, f64) {
        let rr = self.radius * self.radius;
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (1.0 - r2 / rr, r2)
    }
}

impl C2Field for MollifierBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (w, _) = self.shape(x);
        if w <= MOLLIFIER_FLOOR {
            return 0.0;
        }
        (1.0 - 1.0 / w).exp()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let (w, _) = self.shape(x);
        if w <= MOLLIFIER_FLOOR {
            out.fill(0.0);
            return;
        }
        let rr = self.radius * self.radius;
        let phi = (1.0 - 1.0 / w).exp();
        // d/dx exp(1 - 1/w) = exp(..) * (-1/w^2) * (-2 (x-c)/rr)... chain
        // through w = 1 - r^2/rr
        let scale = -2.0 * phi / (w * w * rr);
        for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(&self.center)) {
            *o = scale * (a - b);
        }
    }

    fn laplacian(&self, x: &[f64]) -> f64 {
        let (w, r2) = self.shape(x);
        if w <= MOLLIFIER_FLOOR {
            return 0.0;
        }
        let n = self.dim() as f64;
        let rr = self.radius * self.radius;
        let phi = (1.0 - 1.0 / w).exp();
        // with s = r^2/rr: phi_s = -phi/w^2, phi_ss = phi (1 - 2w)/w^4;
        // lap = phi_ss |grad s|^2 + phi_s lap s
        let w2 = w * w;
        phi * ((1.0 - 2.0 * w) / (w2 * w2) * 4.0 * r2 / (rr * rr) - 2.0 * n / (w2 * rr))
    }
}

/// Separable product `prod_d sin(pi (x_d - lo_d)/(hi_d - lo_d))` on a box.
/// Vanishes on the box boundary; its Laplacian is itself scaled by
/// `-pi^2 sum 1/len_d^2`. The standard smooth manufactured solution.
#[derive(Debug, Clone)]
pub struct BoxSine {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSine {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| b > a));
        Self { lo, hi }
    }

    fn phases(&self, x: &[f64]) -> Vec<(f64, f64)> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(xi, (lo, hi))| {
                let t = std::f64::consts::PI * (xi - lo) / (hi - lo);
                (t.sin(), t.cos())
            })
            .collect()
    }
}

impl C2Field for BoxSine {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.phases(x).iter().map(|(s, _)| s).product()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let ph = self.phases(x);
        let full: f64 = ph.iter().map(|(s, _)| s).product();
        for d in 0..self.dim() {
            let len = self.hi[d] - self.lo[d];
            let (s, c) = ph[d];
            // product over the others times d/dx_d sin
            let others = if s.abs() > 1e-300 {
                full / s
            } else {
                ph.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != d)
                    .map(|(_, (sv, _))| sv)
                    .product()
            };
            out[d] = others * c * std::f64::consts::PI / len;
        }
    }

    fn laplacian(&self, x: &[f64]) -> f64 {
        let v = self.value(x);
        let factor: f64 = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| {
                let len = hi - lo;
                (std::f64::consts::PI / len).powi(2)
            })
            .sum();
        -factor * v
    }
}

/// Plain scalar function without derivative information, used for densities
/// and absorption data `g` where only values enter quadratures.
pub struct ScalarFn {
    dim: usize,
    f: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl ScalarFn {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, f: Box::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl std::fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarFn").field("dim", &self.dim).finish()
    }
}
