//! Divisor partitions, resolvent-set membership, the curve `b(T)`, distance to
//! the spectrum, and the exceptional set `K` of critical values.
//!
//! Membership in the resolvent set is decided by counting roots: `w` is in
//! `rho(T_b)` iff `P(z, w)` has no roots on the unit circle and exactly `m`
//! roots inside it. [`winding_number`] gives the equivalent quadrature test and
//! is kept as an independent cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::refine_periodic_min;
use crate::roots::{roots_at, solve_roots, RootSet};
use crate::symbol::{circle_angles, LaurentSymbol, PolyCoeffs};

/// Half-width of the band around the unit circle in which roots count as unimodular.
pub const DEFAULT_TAU: f64 = 1e-6;

/// Points of `K` closer than this are merged.
const K_MERGE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RootLocation {
    In,
    Un,
    Ext,
}

impl RootLocation {
    pub fn classify(z: Complex64, tau: f64) -> Self {
        let r = z.norm();
        if (r - 1.0).abs() <= tau {
            RootLocation::Un
        } else if r < 1.0 {
            RootLocation::In
        } else {
            RootLocation::Ext
        }
    }
}

/// Root counts `(|Z_in|, |Z_un|, |Z_ext|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCounts {
    pub inside: usize,
    pub unimodular: usize,
    pub outside: usize,
}

/// `Z(w)` split into the parts inside, on, and outside the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub root_set: RootSet,
    pub labels: Vec<RootLocation>,
    pub tau: f64,
}

impl Divisor {
    pub fn counts(&self) -> RootCounts {
        let count = |loc| self.labels.iter().filter(|l| **l == loc).count();
        RootCounts {
            inside: count(RootLocation::In),
            unimodular: count(RootLocation::Un),
            outside: count(RootLocation::Ext),
        }
    }

    pub fn roots_with(&self, loc: RootLocation) -> Vec<Complex64> {
        self.root_set.roots.iter().zip(&self.labels).filter(|(_, l)| **l == loc).map(|(z, _)| *z).collect()
    }

    pub fn inside(&self) -> Vec<Complex64> {
        self.roots_with(RootLocation::In)
    }

    pub fn unimodular(&self) -> Vec<Complex64> {
        self.roots_with(RootLocation::Un)
    }

    pub fn outside(&self) -> Vec<Complex64> {
        self.roots_with(RootLocation::Ext)
    }

    /// No unimodular roots and exactly `m` interior roots.
    pub fn is_resolvent(&self, m: usize) -> bool {
        let c = self.counts();
        c.unimodular == 0 && c.inside == m
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 0.1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("circle tolerance must lie in (0, 0.1], got {tau}")))
    }
}

/// Label the roots of `P(z, w)` against the band `| |z| - 1 | <= tau`.
pub fn partition(b: &LaurentSymbol, w: Complex64, tau: f64) -> Result<Divisor> {
    check_tau(tau)?;
    let root_set = roots_at(b, w)?;
    let labels = root_set.roots.iter().map(|z| RootLocation::classify(*z, tau)).collect();
    Ok(Divisor { root_set, labels, tau })
}

pub fn in_resolvent_set(b: &LaurentSymbol, w: Complex64, tau: f64) -> Result<bool> {
    Ok(partition(b, w, tau)?.is_resolvent(b.m()))
}

/// Uniform samples of `b(e^{i theta})`, the essential spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SpectrumCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub const MIN_CURVE_SAMPLES: usize = 512;

pub fn spectrum_curve(b: &LaurentSymbol, n: usize) -> Result<SpectrumCurve> {
    if n < MIN_CURVE_SAMPLES {
        return Err(Error::InvalidParameter(format!("curve needs at least {MIN_CURVE_SAMPLES} samples, got {n}")));
    }
    let thetas: Vec<f64> = circle_angles(n).collect();
    let values = thetas.iter().map(|&t| b.on_circle(t)).collect();
    Ok(SpectrumCurve { thetas, values })
}

/// `min_t |b(t) - w|` over the unit circle: grid minimum refined by golden-section search.
pub fn dist_to_curve(b: &LaurentSymbol, w: Complex64, curve: &SpectrumCurve) -> f64 {
    let samples: Vec<f64> = curve.values.iter().map(|v| (v - w).norm()).collect();
    let (_, d) = refine_periodic_min(|t| (b.on_circle(t) - w).norm(), &samples, 3);
    d
}

/// `dist(w, sigma(T_b))`; zero when `w` is not in the resolvent set.
///
/// On the resolvent set this equals the distance to `b(T)`, since the
/// boundary of the spectrum lies on `b(T)` and `b(T)` lies in the spectrum.
pub fn dist_to_spectrum(b: &LaurentSymbol, w: Complex64, curve: &SpectrumCurve) -> Result<f64> {
    dist_to_spectrum_with_tau(b, w, curve, DEFAULT_TAU)
}

pub fn dist_to_spectrum_with_tau(b: &LaurentSymbol, w: Complex64, curve: &SpectrumCurve, tau: f64) -> Result<f64> {
    if !in_resolvent_set(b, w, tau)? {
        return Ok(0.0);
    }
    Ok(dist_to_curve(b, w, curve))
}

/// Winding number of `b(T)` around `w` by summing argument increments over
/// `n` samples. Equal to `|Z_in(w)| - m` for `w` off the curve.
pub fn winding_number(b: &LaurentSymbol, w: Complex64, n: usize) -> i64 {
    let mut prev = b.on_circle(0.0) - w;
    let mut total = 0.0;
    for i in 1..=n {
        let cur = b.on_circle(2.0 * PI * i as f64 / n as f64) - w;
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

/// Critical points `lambda` (roots of `z^{m+1} b'(z)`) and critical values `K = b(lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub lambdas: Vec<Complex64>,
    pub points: Vec<Complex64>,
}

impl ExceptionalSet {
    /// `min |w - kappa|` over `K`; infinite when `K` is empty.
    pub fn distance(&self, w: Complex64) -> f64 {
        self.points.iter().map(|k| (k - w).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Coefficients of `z^{m+1} b'(z) = sum_n n b_n z^{n+m}`.
pub fn critical_polynomial(b: &LaurentSymbol) -> Result<PolyCoeffs> {
    let m = b.m() as i64;
    let coeffs = (-m..=b.k() as i64).map(|n| b.coeff(n) * n as f64).collect();
    PolyCoeffs::new(coeffs)
}

pub fn exceptional_set(b: &LaurentSymbol) -> Result<ExceptionalSet> {
    let roots = solve_roots(&critical_polynomial(b)?)?;
    let mut lambdas = Vec::new();
    let mut points: Vec<Complex64> = Vec::new();
    for lambda in roots.roots.into_iter().filter(|z| z.norm() > 0.0) {
        let value = b.eval(lambda)?;
        if points.iter().any(|p| (p - value).norm() < K_MERGE_TOLERANCE) {
            continue;
        }
        lambdas.push(lambda);
        points.push(value);
    }
    Ok(ExceptionalSet { lambdas, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_labels() {
        assert_eq!(RootLocation::classify(c(1.0 - 5e-7, 0.0), 1e-6), RootLocation::Un);
        assert_eq!(RootLocation::classify(c(0.5, 0.0), 1e-6), RootLocation::In);
        assert_eq!(RootLocation::classify(c(0.0, 1.1), 1e-6), RootLocation::Ext);
    }

    #[test]
    fn flower_partitions() {
        let b = LaurentSymbol::flower();
        let d0 = partition(&b, c(0.0, 0.0), 1e-6).unwrap().counts();
        assert_eq!((d0.inside, d0.unimodular, d0.outside), (0, 3, 0));
        let d10 = partition(&b, c(10.0, 0.0), 1e-6).unwrap().counts();
        assert_eq!((d10.inside, d10.unimodular, d10.outside), (1, 0, 2));
        assert!(partition(&b, c(1.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn flower_membership() {
        let b = LaurentSymbol::flower();
        assert!(in_resolvent_set(&b, Complex64::from_polar(0.1, PI / 3.0), DEFAULT_TAU).unwrap());
        assert!(in_resolvent_set(&b, c(3.0, 0.0), DEFAULT_TAU).unwrap());
        assert!(!in_resolvent_set(&b, c(1.0, 0.0), DEFAULT_TAU).unwrap());
        assert_eq!(winding_number(&b, c(1.0, 0.0), 4096), 1);
        assert_eq!(winding_number(&b, c(3.0, 0.0), 4096), 0);
    }

    #[test]
    fn curve_samples() {
        let b = LaurentSymbol::flower();
        assert!(spectrum_curve(&b, 100).is_err());
        let curve = spectrum_curve(&b, 2048).unwrap();
        assert!((curve.values[0] - 2.0).norm() < 1e-15);
        for i in 1..2048 {
            assert!((curve.values[2048 - i] - curve.values[i].conj()).norm() < 1e-12);
        }
        // zeros of b on the circle at +-pi/3 and pi
        let min_idx = (0..2048).min_by(|&i, &j| curve.values[i].norm().total_cmp(&curve.values[j].norm())).unwrap();
        let t = curve.thetas[min_idx];
        assert!([PI / 3.0, PI, 5.0 * PI / 3.0].iter().any(|z| (t - z).abs() < 0.01));
    }

    #[test]
    fn distance_to_flower() {
        let b = LaurentSymbol::flower();
        let curve = spectrum_curve(&b, 2048).unwrap();
        let d = dist_to_spectrum(&b, c(3.0, 0.0), &curve).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
        let on_curve = b.on_circle(0.7);
        assert!(dist_to_curve(&b, on_curve, &curve) < 1e-9);
        assert_eq!(dist_to_spectrum(&b, c(1.0, 0.0), &curve).unwrap(), 0.0);
    }

    #[test]
    fn flower_exceptional_set() {
        let b = LaurentSymbol::flower();
        let k = exceptional_set(&b).unwrap();
        assert_eq!(k.points.len(), 3);
        let modulus = 2f64.powf(1.0 / 3.0) + 2f64.powf(-2.0 / 3.0);
        for (lambda, p) in k.lambdas.iter().zip(&k.points) {
            assert!((p.norm() - modulus).abs() < 1e-8);
            assert!(b.eval_derivative(*lambda).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn joukowski_exceptional_set() {
        let b = LaurentSymbol::from_terms(1, 1, &[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let mut pts: Vec<f64> = exceptional_set(&b).unwrap().points.iter().map(|p| p.re).collect();
        pts.sort_by(f64::total_cmp);
        assert!((pts[0] + 2.0).abs() < 1e-12 && (pts[1] - 2.0).abs() < 1e-12);
    }
}
