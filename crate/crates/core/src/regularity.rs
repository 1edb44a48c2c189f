//! Local regularity at a boundary point `w0` and the non-tangential domains
//! on which the resolvent is shown to grow linearly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{cluster_centers, continue_roots_to, perturbation_data, SINGULARITY_TOLERANCE};
use crate::spectral::{
    dist_to_curve, exceptional_set, in_resolvent_set, partition, spectrum_curve, RootCounts, RootLocation, DEFAULT_TAU,
};
use crate::symbol::LaurentSymbol;

/// `w0` is in `K` when it is this close to a critical value.
pub const K_MEMBERSHIP_TOLERANCE: f64 = 1e-8;

const CURVE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub w0: Complex64,
    pub tau: f64,
    pub counts: RootCounts,
    /// Exactly one unimodular root.
    pub cond_i: bool,
    /// `m` roots inside the disk.
    pub cond_ii: bool,
    /// `k` roots outside the disk.
    pub cond_iii: bool,
    pub unimodular_roots: Vec<Complex64>,
    /// Coefficient dominance of `P(z, w0) / (z - t0)` per unimodular root
    /// (`None` when `t0` fails the root residual check).
    pub q_dominance: Vec<Option<bool>>,
    pub in_k: bool,
    pub dist_to_k: f64,
    /// The roots on or inside the circle are simple.
    pub relaxed_simplicity: bool,
    pub dist_to_curve: f64,
    /// `w0` lies within `10 tau` of `b(T)`.
    pub boundary_candidate: bool,
}

impl RegularityReport {
    /// At least one of the three local-regularity conditions holds.
    pub fn locally_regular(&self) -> bool {
        self.cond_i || self.cond_ii || self.cond_iii
    }
}

pub fn classify(b: &LaurentSymbol, w0: Complex64) -> Result<RegularityReport> {
    classify_with_tau(b, w0, DEFAULT_TAU)
}

pub fn classify_with_tau(b: &LaurentSymbol, w0: Complex64, tau: f64) -> Result<RegularityReport> {
    let divisor = partition(b, w0, tau)?;
    let counts = divisor.counts();
    let unimodular_roots = divisor.unimodular();

    let p = b.p_coefficients(w0);
    let q_dominance = unimodular_roots
        .iter()
        .map(|z| p.q_coefficients(z / z.norm()).ok().map(|q| q.has_dominant_coefficient()))
        .collect();

    let k_set = exceptional_set(b)?;
    let dist_to_k = k_set.distance(w0);

    let centers = cluster_centers(&p, &divisor.root_set.roots);
    let relaxed_simplicity = centers.iter().zip(&divisor.labels).all(|(z, label)| {
        *label == RootLocation::Ext || b.eval_derivative_unchecked(*z).norm() >= SINGULARITY_TOLERANCE
    });

    let curve = spectrum_curve(b, CURVE_SAMPLES)?;
    let dist = dist_to_curve(b, w0, &curve);

    Ok(RegularityReport {
        w0,
        tau,
        counts,
        cond_i: counts.unimodular == 1,
        cond_ii: counts.inside == b.m(),
        cond_iii: counts.outside == b.k(),
        unimodular_roots,
        q_dominance,
        in_k: dist_to_k <= K_MEMBERSHIP_TOLERANCE,
        dist_to_k,
        relaxed_simplicity,
        dist_to_curve: dist,
        boundary_candidate: dist <= 10.0 * tau,
    })
}

/// One Stolz-type sector `G_j(w0)`: the unimodular root `z_j(w0)`, `b'(z_j(w0))`,
/// and the first-order coefficient `c_j = conj(z_j(w0)) / b'(z_j(w0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainEntry {
    pub root: Complex64,
    pub derivative: Complex64,
    pub coeff: Complex64,
}

/// `Omega'(w0, eps)`: points of the resolvent set in `B(w0, eps)` lying in
/// every sector `|Re{c_j (w - w0)}| > C13 |w - w0|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonTangentialDomain {
    pub w0: Complex64,
    pub entries: Vec<DomainEntry>,
    pub c13: f64,
    pub eps: f64,
    pub tau: f64,
    pub dist_to_k: f64,
}

pub fn build_domain(b: &LaurentSymbol, w0: Complex64, c13: f64, eps: f64) -> Result<NonTangentialDomain> {
    if !(c13 > 0.0 && c13.is_finite()) {
        return Err(Error::InvalidParameter(format!("C13 must be positive, got {c13}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let k_set = exceptional_set(b)?;
    let dist_to_k = k_set.distance(w0);
    if dist_to_k <= K_MEMBERSHIP_TOLERANCE {
        let nearest = k_set
            .lambdas
            .iter()
            .zip(&k_set.points)
            .min_by(|a, b| (a.1 - w0).norm().total_cmp(&(b.1 - w0).norm()))
            .map(|(l, _)| *l)
            .unwrap_or_default();
        return Err(Error::NearExceptional { root: nearest, derivative: 0.0 });
    }
    let data = perturbation_data(b, w0)?;
    let entries: Vec<DomainEntry> = data
        .base_roots
        .iter()
        .zip(&data.derivative_at_roots)
        .filter(|(z, _)| RootLocation::classify(**z, DEFAULT_TAU) == RootLocation::Un)
        .map(|(z, d)| DomainEntry { root: *z, derivative: *d, coeff: z.conj() / d })
        .collect();
    if entries.is_empty() {
        return Err(Error::NotOnCurve);
    }
    Ok(NonTangentialDomain { w0, entries, c13, eps, tau: DEFAULT_TAU, dist_to_k })
}

impl NonTangentialDomain {
    /// The sector conditions alone, without the ball and resolvent-set checks.
    pub fn in_sectors(&self, w: Complex64) -> bool {
        let dw = w - self.w0;
        let r = dw.norm();
        r > 0.0 && self.entries.iter().all(|e| (e.coeff * dw).re.abs() > self.c13 * r)
    }

    /// Membership in `Omega'(w0, eps)`.
    ///
    /// Inside the sectors the perturbed roots sit at distance about
    /// `C13 |w - w0|` from the circle, so the circle band used for the
    /// resolvent-set test is shrunk to a tenth of that.
    pub fn contains(&self, b: &LaurentSymbol, w: Complex64) -> Result<bool> {
        let r = (w - self.w0).norm();
        if r >= self.eps || !self.in_sectors(w) {
            return Ok(false);
        }
        let tau = self.tau.min(0.1 * self.c13 * r);
        in_resolvent_set(b, w, tau)
    }

    /// `min_j |1 - |z_j(w)|| / |z_j(w) - z_j(w0)|` over the roots continued from
    /// the unimodular ones; positive values put them in Stolz angles.
    pub fn stolz_ratio(&self, b: &LaurentSymbol, w: Complex64) -> Result<f64> {
        let base = crate::roots::roots_at(b, self.w0)?;
        let next = continue_roots_to(b, &base, w)?;
        let moved = next.in_base_order().expect("continuation sets pairing");
        let mut ratio = f64::INFINITY;
        for (z0, z) in base.roots.iter().zip(&moved) {
            if !self.entries.iter().any(|e| (e.root - z0).norm() < 1e-12) {
                continue;
            }
            let disp = (z - z0).norm();
            if disp > 0.0 {
                ratio = ratio.min((1.0 - z.norm()).abs() / disp);
            }
        }
        Ok(ratio)
    }
}
