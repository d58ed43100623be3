//! The weighted norm a cutoff is measured in.
//!
//! For a cutoff `psi` and a potential `V` the norm has three terms:
//! the plain integral of `|psi|`, the sup of `|grad psi| / sqrt(V)` and the
//! sup of `|lap psi| / V`. The infimum of the total over admissible cutoffs
//! is the quantity every experiment in this crate estimates from one side.
//!
//! The integral uses the graded quadrature, refined with `j` so the shrinking
//! plateau `{psi = 1}` stays resolved. The sups are scanned over every grid
//! node plus the collar samples of the cutoff itself; the collar is where the
//! derivatives live, and grid nodes alone would miss it entirely once the
//! collar width drops below the spacing.

use super::{CapacityError, TestFunctionField};
use crate::geometry::Grid;
use crate::par;
use crate::potential::{PotentialSpec, SingularAnchor};
use crate::quadrature::GradedQuadrature;

/// The three norm terms of one cutoff at one sharpness.
#[derive(Debug, Clone, Copy)]
pub struct VNorm {
    /// integral of |psi|
    pub l1: f64,
    /// sup of |grad psi| / sqrt(V)
    pub grad: f64,
    /// sup of |lap psi| / V
    pub lap: f64,
    /// measure of the plateau {psi = 1}, on the same quadrature as `l1`;
    /// since the integrand of `l1` dominates the plateau indicator pointwise
    /// and summation is monotone, `l1 >= one_measure` holds exactly
    pub one_measure: f64,
    /// sharpness the cutoff was evaluated at
    pub j: f64,
}

impl VNorm {
    pub fn total(&self) -> f64 {
        self.l1 + self.grad + self.lap
    }
}

/// Quadrature level that keeps shells at least as fine as the `1/j` plateau.
pub(crate) fn quadrature_level(j: f64) -> usize {
    (j.max(2.0).log2() / 3.0).ceil().max(1.0) as usize
}

/// Measures one cutoff against one potential. `anchors` locate the points the
/// integral must grade towards: the components of the cutoff's own set.
pub fn vnorm(
    psi: &TestFunctionField,
    v: &PotentialSpec,
    grid: &Grid,
    anchors: &[SingularAnchor],
) -> Result<VNorm, CapacityError> {
    let quad = GradedQuadrature::build(grid, anchors, quadrature_level(psi.j()))?;
    let l1 = quad.integrate(|x| psi.value(x).abs());
    let one_measure = quad.integrate(|x| if psi.value(x) >= 1.0 { 1.0 } else { 0.0 });
    let (grad, lap) = sup_ratios(psi, v, grid);
    Ok(VNorm {
        l1,
        grad,
        lap,
        one_measure,
        j: psi.j(),
    })
}

/// Sups of `|grad psi| / sqrt(V)` and `|lap psi| / V` over grid nodes plus
/// the cutoff's own collar samples.
pub(crate) fn sup_ratios(psi: &TestFunctionField, v: &PotentialSpec, grid: &Grid) -> (f64, f64) {
    let collar = psi.collar_samples(grid.domain());
    let nodes = grid.len();
    let total = nodes + collar.len();
    let dim = psi.dim();
    let ratios = |i: usize| -> (f64, f64) {
        let x: &[f64] = if i < nodes {
            grid.node(i)
        } else {
            &collar[i - nodes]
        };
        let jet = psi.jet(x);
        let w = v.eval(x);
        // V = +inf at the singular points gives 0/inf = 0 there; a genuine
        // 0/0 is NaN and is skipped by the max below.
        (jet.grad_norm(dim) / w.sqrt(), jet.lap.abs() / w)
    };
    let grad = par::chunk_max(total, |i| ratios(i).0);
    let lap = par::chunk_max(total, |i| ratios(i).1);
    (grad, lap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::CutoffFamily;
    use crate::geometry::{unit_ball_volume, CompactSet, Domain};
    use crate::potential::set_anchors;

    fn point_setup(h: f64) -> (Grid, CutoffFamily, CompactSet) {
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let grid = Grid::new(dom, h).unwrap();
        let k = CompactSet::point(vec![0.0, 0.0]);
        let fam = CutoffFamily::new(&k, &grid).unwrap();
        (grid, fam, k)
    }

    #[test]
    fn constant_potential_gives_transition_extrema() {
        // V = 4: grad term = sup|grad psi| / 2, lap term = sup|lap psi| / 4.
        // For an exact point distance in the plane the sups are
        // j * max H' = 1.875 j and the max over the collar of
        // |j^2 H''(u) + j H'(u) / rho| with rho = u/j.
        let (grid, fam, k) = point_setup(1.0 / 32.0);
        let v = PotentialSpec::single(CompactSet::point(vec![0.0, 0.0]), 4.0, 0.0);
        let anchors = set_anchors(&k);
        let j = 64.0;
        let psi = fam.at(j).unwrap();
        let n = vnorm(&psi, &v, &grid, &anchors).unwrap();
        assert!((n.grad - 1.875 * j / 2.0).abs() < 0.01 * n.grad, "grad {}", n.grad);
        // lap sup: max over u in [1,2] of j^2 |H''(u) + H'(u)/u|; the
        // magnitude peaks at u = 1 where H'' has its positive maximum.
        let mut expect: f64 = 0.0;
        for k in 0..=4000 {
            let u = 1.0 + (k as f64) / 4000.0;
            let (_, dh, ddh) = crate::geometry::transition_h(u);
            expect = expect.max((ddh + dh / u).abs());
        }
        expect *= j * j / 4.0;
        assert!((n.lap - expect).abs() < 0.02 * expect, "lap {} vs {}", n.lap, expect);
        assert!(n.total() > n.l1 + n.grad);
    }

    #[test]
    fn l1_tracks_the_shrinking_support() {
        // Support of psi_j is the ball of radius 2M/j, value 1 inside 1/j:
        // pi/j^2 <= l1 <= pi (2M)^2 / j^2. Check the integral lands between
        // the two enclosures and scales like 1/j^2.
        let (grid, fam, k) = point_setup(1.0 / 24.0);
        let v = PotentialSpec::single(k.clone(), 1.0, 0.0);
        let anchors = set_anchors(&k);
        let m = fam.set_equivalence();
        let mut prev = f64::INFINITY;
        for &j in &[16.0, 32.0, 64.0] {
            let psi = fam.at(j).unwrap();
            let n = vnorm(&psi, &v, &grid, &anchors).unwrap();
            let lo = unit_ball_volume(2) / (j * j);
            let hi = unit_ball_volume(2) * (2.0 * m / j).powi(2);
            assert!(n.l1 > 0.9 * lo && n.l1 < 1.1 * hi, "l1 {} outside [{lo}, {hi}]", n.l1);
            assert!(n.l1 >= n.one_measure, "l1 below the plateau measure");
            assert!(n.one_measure > 0.0, "plateau unresolved at j = {j}");
            let ratio = n.l1 / prev;
            assert!(ratio < 0.35, "doubling j should quarter l1, got ratio {ratio}");
            prev = n.l1;
        }
    }

    #[test]
    fn singular_potential_tames_the_derivative_terms() {
        // V = |x|^{-3} in the plane: on the collar sqrt(V) ~ (j/u)^{1.5}, so
        // the grad term decays like j^{-1/2} while the raw sup grows like j.
        let (grid, fam, k) = point_setup(1.0 / 32.0);
        let v = PotentialSpec::single(k.clone(), 1.0, 3.0);
        let anchors = set_anchors(&k);
        let coarse = vnorm(&fam.at(32.0).unwrap(), &v, &grid, &anchors).unwrap();
        let fine = vnorm(&fam.at(128.0).unwrap(), &v, &grid, &anchors).unwrap();
        assert!(fine.grad < coarse.grad);
        assert!(fine.lap < coarse.lap);
        let slope = (fine.grad / coarse.grad).ln() / 4.0f64.ln();
        assert!((slope + 0.5).abs() < 0.05, "grad slope {slope}");
    }

    #[test]
    fn blowup_near_the_anchor_leaves_the_sups_finite() {
        // The potential blows up at the anchor while the cutoff is flat
        // there; every scanned ratio must stay finite and the sups positive.
        let dom = Domain::rect(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let grid = Grid::new(dom, 1.0 / 16.0).unwrap();
        let k = CompactSet::point(vec![0.0, 0.0]);
        let fam = CutoffFamily::new(&k, &grid).unwrap();
        let v = PotentialSpec::single(k.clone(), 1.0, 2.0);
        let n = vnorm(&fam.at(20.0).unwrap(), &v, &grid, &set_anchors(&k)).unwrap();
        assert!(n.grad.is_finite() && n.lap.is_finite() && n.l1.is_finite());
        assert!(n.grad > 0.0 && n.lap > 0.0);
    }
}
