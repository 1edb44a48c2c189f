//! Ray and grid scans near a boundary point `w0`, recording resolvent bounds
//! and the products `||R(w)|| dist(w, sigma)` that stay bounded under linear
//! resolvent growth.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularity::{build_domain, NonTangentialDomain, K_MEMBERSHIP_TOLERANCE};
use crate::resolvent::{estimate_norm, EstimateOptions};
use crate::spectral::{dist_to_curve, exceptional_set, in_resolvent_set, spectrum_curve, SpectrumCurve};
use crate::symbol::LaurentSymbol;

const CURVE_SAMPLES: usize = 4096;

/// Minimum number of domain records needed for a slope fit.
pub const MIN_FIT_RECORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub w: Complex64,
    pub r: f64,
    pub dist: f64,
    pub in_omega_prime: bool,
    pub in_resolvent: bool,
    pub lower: f64,
    /// Krein bound.
    pub upper: f64,
    pub product_lower: f64,
    pub product_upper: f64,
    pub explicit_upper: Option<f64>,
    pub section_estimate: Option<f64>,
    pub i1_norm: Option<f64>,
    pub i2_norm: Option<f64>,
}

impl ScanRecord {
    pub const CSV_HEADER: [&'static str; 9] =
        ["w_re", "w_im", "r", "dist", "in_omega_prime", "lower", "upper", "product_lower", "product_upper"];

    /// CSV fields in [`Self::CSV_HEADER`] order, 17 significant digits.
    pub fn csv_fields(&self) -> [String; 9] {
        [
            fmt17(self.w.re),
            fmt17(self.w.im),
            fmt17(self.r),
            fmt17(self.dist),
            u8::from(self.in_omega_prime).to_string(),
            fmt17(self.lower),
            fmt17(self.upper),
            fmt17(self.product_lower),
            fmt17(self.product_upper),
        ]
    }
}

/// Locale-independent scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    /// Least-squares slope of `log lower` against `log dist` over fit records.
    pub slope_fit_lower: Option<f64>,
    pub slope_fit_upper: Option<f64>,
    pub product_max_over_min: Option<f64>,
    pub slope_fit_explicit: Option<f64>,
    pub explicit_product_max_over_min: Option<f64>,
    /// `max i1_norm * dist` over fit records.
    pub i1_dist_sup: Option<f64>,
    /// `max i2_norm * r` over fit records.
    pub i2_r_sup: Option<f64>,
    pub fit_records: usize,
    pub preset_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub estimate: EstimateOptions,
    /// Require at least [`MIN_FIT_RECORDS`] domain records.
    pub require_fit: bool,
}

impl ScanOptions {
    pub fn ray() -> Self {
        Self { estimate: EstimateOptions::default(), require_fit: true }
    }

    /// Lighter estimates for dense grids; no finite sections.
    pub fn grid() -> Self {
        Self {
            estimate: EstimateOptions {
                probes: 4,
                truncation: 128,
                section: None,
                diagnostics: false,
                ..Default::default()
            },
            require_fit: false,
        }
    }
}

/// `count` radii log-spaced from `hi` down to `lo`, inclusive.
pub fn log_radii(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Radii from `hi` down to `lo` with `per_decade` points per decade.
pub fn log_radii_per_decade(hi: f64, lo: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    log_radii(hi, lo, (decades * per_decade as f64).round() as usize + 1)
}

fn check_base_point(b: &LaurentSymbol, w0: Complex64, tau: f64, curve: &SpectrumCurve) -> Result<()> {
    let k_set = exceptional_set(b)?;
    let dk = k_set.distance(w0);
    if dk <= K_MEMBERSHIP_TOLERANCE {
        return Err(Error::NearExceptional { root: w0, derivative: 0.0 });
    }
    if dist_to_curve(b, w0, curve) > 10.0 * tau {
        return Err(Error::NotOnCurve);
    }
    Ok(())
}

fn record_at(
    b: &LaurentSymbol,
    dom: &NonTangentialDomain,
    curve: &SpectrumCurve,
    w: Complex64,
    opts: &ScanOptions,
) -> Result<ScanRecord> {
    let r = (w - dom.w0).norm();
    let in_omega_prime = dom.contains(b, w)?;
    // roots sit about C13 r from the circle inside the sectors
    let tau = if r > 0.0 { dom.tau.min(0.1 * dom.c13 * r) } else { dom.tau };
    let in_resolvent = in_resolvent_set(b, w, tau)?;
    let mut rec = ScanRecord {
        w,
        r,
        dist: 0.0,
        in_omega_prime,
        in_resolvent,
        lower: f64::INFINITY,
        upper: f64::INFINITY,
        product_lower: f64::INFINITY,
        product_upper: f64::INFINITY,
        explicit_upper: None,
        section_estimate: None,
        i1_norm: None,
        i2_norm: None,
    };
    if !in_resolvent {
        return Ok(rec);
    }
    let est = estimate_norm(b, w, &EstimateOptions { tau, ..opts.estimate })?;
    let dist = dist_to_curve(b, w, curve);
    rec.dist = dist;
    rec.lower = est.lower;
    rec.upper = est.upper;
    rec.product_lower = est.lower * dist;
    rec.product_upper = est.upper * dist;
    rec.explicit_upper = est.explicit_upper;
    rec.section_estimate = est.section_estimate;
    rec.i1_norm = est.i1_norm;
    rec.i2_norm = est.i2_norm;
    Ok(rec)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn max_over_min(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo.is_finite() && lo > 0.0).then(|| hi / lo)
}

fn assemble(records: Vec<ScanRecord>, tau: f64, preset_name: &str, require_fit: bool) -> Result<ScanReport> {
    let fit: Vec<&ScanRecord> =
        records.iter().filter(|r| r.in_omega_prime && r.in_resolvent && r.dist >= 10.0 * tau).collect();
    if require_fit && fit.len() < MIN_FIT_RECORDS {
        return Err(Error::InsufficientData(format!("{} domain records, need {MIN_FIT_RECORDS}", fit.len())));
    }
    let enough = fit.len() >= MIN_FIT_RECORDS;
    let log_d: Vec<f64> = fit.iter().map(|r| r.dist.ln()).collect();
    let slope = |f: &dyn Fn(&ScanRecord) -> Option<f64>| -> Option<f64> {
        if !enough {
            return None;
        }
        let ys: Option<Vec<f64>> = fit.iter().map(|r| f(r).filter(|v| *v > 0.0).map(f64::ln)).collect();
        ls_slope(&log_d, &ys?)
    };
    let slope_fit_lower = slope(&|r| Some(r.lower));
    let slope_fit_upper = slope(&|r| Some(r.upper));
    let slope_fit_explicit = slope(&|r| r.explicit_upper);
    let product_max_over_min = if enough { max_over_min(fit.iter().map(|r| r.product_upper)) } else { None };
    let explicit_product_max_over_min = if enough && fit.iter().all(|r| r.explicit_upper.is_some()) {
        max_over_min(fit.iter().map(|r| r.explicit_upper.unwrap_or(0.0) * r.dist))
    } else {
        None
    };
    let sup = |f: &dyn Fn(&ScanRecord) -> Option<f64>| -> Option<f64> {
        let vals: Option<Vec<f64>> = fit.iter().map(|r| f(r)).collect();
        vals.filter(|v| !v.is_empty()).map(|v| v.into_iter().fold(0.0, f64::max))
    };
    let i1_dist_sup = sup(&|r| r.i1_norm.map(|v| v * r.dist));
    let i2_r_sup = sup(&|r| r.i2_norm.map(|v| v * r.r));
    let fit_records = fit.len();
    Ok(ScanReport {
        records,
        slope_fit_lower,
        slope_fit_upper,
        product_max_over_min,
        slope_fit_explicit,
        explicit_product_max_over_min,
        i1_dist_sup,
        i2_r_sup,
        fit_records,
        preset_name: preset_name.to_string(),
    })
}

/// One record per radius at `w0 + r direction`; radii must be decreasing and below `dom.eps`.
pub fn ray_scan(
    b: &LaurentSymbol,
    dom: &NonTangentialDomain,
    direction: Complex64,
    radii: &[f64],
    opts: &ScanOptions,
    preset_name: &str,
) -> Result<ScanReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && *r < dom.eps)) {
        return Err(Error::InvalidParameter(format!("radii must lie in (0, {})", dom.eps)));
    }
    if radii.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidParameter("radii must be strictly decreasing".into()));
    }
    if (direction.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("direction {direction} is not a unit vector")));
    }
    let curve = spectrum_curve(b, CURVE_SAMPLES)?;
    check_base_point(b, dom.w0, dom.tau, &curve)?;
    let records = radii
        .par_iter()
        .map(|r| record_at(b, dom, &curve, dom.w0 + direction * *r, opts))
        .collect::<Result<Vec<_>>>()?;
    assemble(records, dom.tau, preset_name, opts.require_fit)
}

/// Records on a `grid_n x grid_n` lattice over the square `w0 + [-eps, eps]^2`,
/// real part varying fastest.
pub fn grid_scan(
    b: &LaurentSymbol,
    dom: &NonTangentialDomain,
    eps: f64,
    grid_n: usize,
    opts: &ScanOptions,
    preset_name: &str,
) -> Result<ScanReport> {
    if grid_n < 2 || eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("grid needs n >= 2 and eps > 0, got {grid_n}, {eps}")));
    }
    let curve = spectrum_curve(b, CURVE_SAMPLES)?;
    check_base_point(b, dom.w0, dom.tau, &curve)?;
    let step = 2.0 * eps / (grid_n - 1) as f64;
    let points: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|idx| {
            let (i, j) = (idx % grid_n, idx / grid_n);
            dom.w0 + Complex64::new(-eps + step * i as f64, -eps + step * j as f64)
        })
        .collect();
    let records = points.par_iter().map(|w| record_at(b, dom, &curve, *w, opts)).collect::<Result<Vec<_>>>()?;
    assemble(records, dom.tau, preset_name, opts.require_fit)
}

/// The three-petal example `b(z) = z^{-1} + z^2` at `w0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowerPreset {
    pub symbol: LaurentSymbol,
    pub w0: Complex64,
    pub domain: NonTangentialDomain,
    /// Open angular sectors `(start, end)` in `[0, 2 pi)` where the resolvent set
    /// meets every neighbourhood of `0` non-tangentially.
    pub sectors: Vec<(f64, f64)>,
    pub delta: f64,
}

pub const FLOWER_C13: f64 = 1.0 / 12.0;
pub const FLOWER_EPS: f64 = 0.25;
pub const FLOWER_DELTA: f64 = PI / 36.0;

pub fn flower_preset() -> FlowerPreset {
    flower_preset_with(FLOWER_C13, FLOWER_EPS, FLOWER_DELTA)
}

pub fn flower_preset_with(c13: f64, eps: f64, delta: f64) -> FlowerPreset {
    let symbol = LaurentSymbol::flower();
    let w0 = Complex64::new(0.0, 0.0);
    let domain = build_domain(&symbol, w0, c13, eps).expect("origin is a regular boundary point of the flower");
    let sectors = vec![(PI / 6.0, PI / 2.0), (5.0 * PI / 6.0, 7.0 * PI / 6.0), (3.0 * PI / 2.0, 11.0 * PI / 6.0)];
    FlowerPreset { symbol, w0, domain, sectors, delta }
}

impl FlowerPreset {
    pub fn shrunk_sectors(&self) -> Vec<(f64, f64)> {
        self.sectors.iter().map(|(a, b)| (a + self.delta, b - self.delta)).collect()
    }

    /// `phi` in one of the open sectors, shrunk by `delta` on each side.
    pub fn in_sectors(&self, phi: f64, delta: f64) -> bool {
        let phi = phi.rem_euclid(2.0 * PI);
        self.sectors.iter().any(|(a, b)| phi > a + delta && phi < b - delta)
    }

    /// Largest `C13` for which the `delta`-shrunk sectors lie in the domain:
    /// every `|cos(phi - 2 t_j)|` vanishes at a sector edge, so the minimum over
    /// a shrunk sector is `sin(delta)`, and `|c_j| = 1/3`.
    pub fn guaranteed_c13(&self) -> f64 {
        self.delta.sin() / 3.0
    }

    pub fn total_angle(&self) -> f64 {
        self.sectors.iter().map(|(a, b)| b - a).sum()
    }
}
