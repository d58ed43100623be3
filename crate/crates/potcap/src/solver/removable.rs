//! Removability of a zero-capacity set: testing only off the set already
//! pins the full-domain residuals.
//!
//! A candidate `w` claims to satisfy `-lap w + V w = 0` away from a compact
//! set K. When K carries a zero-capacity certificate, pairing `w` against
//! the damped probes `(1 - psi_j) phi` (supported off K) must control the
//! pairing against `phi` itself: the difference is the pairing against
//! `psi_j phi`, whose norm the certificate drives to zero. The check reports
//! both pairings and the bridge trace along the certificate's own schedule,
//! after two admission gates: `int |w| V` must be finite and the boundary
//! collar averages of `|w|` must decay, the same vanishing-trace test the
//! density module applies to data.
//!
//! The certificate is not taken on faith: one norm is recomputed at the
//! certificate's sharpest level against the set and potential actually
//! passed in, and a gross disagreement refuses the run.

use std::sync::Arc;

use super::SolverError;
use crate::capacity::{
    collar_mass_decay, damped_cutoff, vnorm, CapacityEstimate, CapacityVerdict, CollarMassReport,
    CutoffFamily,
};
use crate::fields::C2Field;
use crate::geometry::{CompactSet, Grid};
use crate::par;
use crate::potential::{set_anchors, PotentialSpec};

#[derive(Debug, Clone)]
pub struct RemovabilityReport {
    /// `int |w|`.
    pub w_l1: f64,
    /// `int |w| V`, the integrability gate.
    pub wv_mass: f64,
    /// Worst pairing against the damped probes `(1 - psi) phi`, supported
    /// off the set.
    pub off_set_residual: f64,
    /// Worst pairing against the plain probes; the quantity removability
    /// is about.
    pub full_domain_residual: f64,
    /// Certificate schedule the bridge was walked along.
    pub bridge_js: Vec<f64>,
    /// Pairings against `psi_j phi` for the leading probe; the certified
    /// norms drive these to zero.
    pub bridge_residuals: Vec<f64>,
    pub collar: CollarMassReport,
}

/// Pairing `int w (-lap phi + V phi)` with the probe given by value and
/// laplacian closures. Nodes where `w` vanishes contribute nothing, whatever
/// the potential does there.
fn pairing(
    grid: &Grid,
    w: &[f64],
    v: &PotentialSpec,
    phi: impl Fn(&[f64]) -> (f64, f64) + Sync,
) -> f64 {
    let terms = par::map_indices(grid.len(), |i| {
        if w[i] == 0.0 {
            return 0.0;
        }
        let x = grid.node(i);
        let (value, lap) = phi(x);
        w[i] * (-lap + v.eval(x) * value)
    });
    grid.cell_measure() * par::chunk_sum(&terms)
}

/// Checks a candidate solution-off-K against a zero-capacity certificate.
pub fn removability_check(
    v: &PotentialSpec,
    k: &CompactSet,
    grid: &Grid,
    w: &[f64],
    certificate: &CapacityEstimate,
    probes: &[Arc<dyn C2Field>],
) -> Result<RemovabilityReport, SolverError> {
    assert_eq!(w.len(), grid.len());
    assert!(!probes.is_empty(), "need at least one probe");
    if certificate.verdict != CapacityVerdict::ZeroDetected {
        return Err(SolverError::MissingCertificate);
    }

    let family = CutoffFamily::new(k, grid)?;
    let last_j = *certificate.js.last().expect("certificate has a schedule");
    let recorded = certificate.norms.last().expect("nonempty").total();
    let recomputed = vnorm(&family.at(last_j)?, v, grid, &set_anchors(k))?.total();
    if recomputed > 10.0 * recorded.max(certificate.tolerance) {
        return Err(SolverError::CertificateMismatch {
            recorded,
            recomputed,
        });
    }

    let collar = collar_mass_decay(|x: &[f64]| grid.interpolate(w, x).abs(), grid);
    if !collar.admissible {
        return Err(SolverError::Capacity(
            crate::capacity::CapacityError::MassNoDecay {
                ratio: collar.worst_ratio(),
            },
        ));
    }

    let cell = grid.cell_measure();
    let sizes = par::map_indices(grid.len(), |i| {
        let a = w[i].abs();
        if a == 0.0 {
            [0.0, 0.0]
        } else {
            [a, a * v.eval(grid.node(i))]
        }
    });
    let l1_terms: Vec<f64> = sizes.iter().map(|s| s[0]).collect();
    let mass_terms: Vec<f64> = sizes.iter().map(|s| s[1]).collect();
    let w_l1 = cell * par::chunk_sum(&l1_terms);
    let wv_mass = cell * par::chunk_sum(&mass_terms);
    if !wv_mass.is_finite() {
        return Err(SolverError::CandidateNotIntegrable);
    }

    // damping for the off-set probes uses the coarsest certificate level:
    // that collar is the widest, hence the one the grid resolves best; the
    // sharper levels reappear in the bridge trace below
    let first_j = certificate.js[0];
    let mut full_domain_residual = 0.0f64;
    let mut off_set_residual = 0.0f64;
    for probe in probes {
        let full = pairing(grid, w, v, |x| (probe.value(x), probe.laplacian(x)));
        let damped = damped_cutoff(family.at(first_j)?, probe.clone());
        let off = pairing(grid, w, v, |x| {
            let jet = damped.jet(x);
            (jet.value, jet.lap)
        });
        full_domain_residual = full_domain_residual.max(full.abs());
        off_set_residual = off_set_residual.max(off.abs());
    }

    // bridge: psi_j phi = phi - (1 - psi_j) phi, jets by linearity
    let lead = &probes[0];
    let mut bridge_residuals = Vec::with_capacity(certificate.js.len());
    for &j in &certificate.js {
        let damped = damped_cutoff(family.at(j)?, lead.clone());
        let r = pairing(grid, w, v, |x| {
            let jet = damped.jet(x);
            (lead.value(x) - jet.value, lead.laplacian(x) - jet.lap)
        });
        bridge_residuals.push(r.abs());
    }

    Ok(RemovabilityReport {
        w_l1,
        wv_mass,
        off_set_residual,
        full_domain_residual,
        bridge_js: certificate.js.clone(),
        bridge_residuals,
        collar,
    })
}
