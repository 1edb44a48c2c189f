//! Wiener-Hopf factorization of `b - w` and two-sided bounds for `||(T_b - w)^{-1}||`.
//!
//! For `w` in the resolvent set the roots of `P(z, w)` split into `m` inside
//! and `k` outside the unit disk, and
//!
//! ```text
//! b(z) - w = b_ext(z, w) b_in(z, w),
//! b_ext(z, w) = b_k prod_{ext} (z - z_i),   b_in(z, w) = prod_{in} (1 - z_j / z).
//! ```
//!
//! The resolvent acts as `h -> P_+(h / b_in) / b_ext`. With partial fractions
//! over the interior roots this splits into `I_1 - I_2`, where `I_1 = h / (b - w)`
//! and `I_2` collects the point evaluations `z_j^m h(z_j)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{
    difference_quotient, eval_on_grid, grid_coefficients, grid_len_for_decay, l2_norm_on_grid, rational_l2_norm,
};
use crate::optimize::refine_periodic_min;
use crate::roots::min_separation;
use crate::section::finite_section_estimate;
use crate::spectral::{dist_to_curve, partition, spectrum_curve, DEFAULT_TAU};
use crate::symbol::{circle_angles, LaurentSymbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interior roots closer than this make the partial fractions undefined.
pub const INTERIOR_SEPARATION: f64 = 1e-8;

/// Largest FFT grid used to divide by `b_ext`; closer roots use exact recursion.
const MAX_DIVISION_GRID: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerHopfFactors {
    pub w: Complex64,
    /// `b_k`.
    pub leading: Complex64,
    pub ext_roots: Vec<Complex64>,
    pub in_roots: Vec<Complex64>,
}

impl WienerHopfFactors {
    pub fn b_ext(&self, z: Complex64) -> Complex64 {
        self.ext_roots.iter().fold(self.leading, |acc, zi| acc * (z - zi))
    }

    pub fn b_in(&self, z: Complex64) -> Complex64 {
        self.in_roots.iter().fold(ONE, |acc, zj| acc * (ONE - zj / z))
    }

    /// `max_l |b_ext b_in - (b - w)| / max(1, |b - w|)` on an `n`-point circle grid.
    pub fn identity_residual(&self, b: &LaurentSymbol, n: usize) -> f64 {
        circle_angles(n)
            .map(|theta| {
                let t = Complex64::from_polar(1.0, theta);
                let target = b.eval_unchecked(t) - self.w;
                (self.b_ext(t) * self.b_in(t) - target).norm() / target.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Split the roots of `P(z, w)` by location; fails unless `w` is in the resolvent set.
pub fn factorize(b: &LaurentSymbol, w: Complex64, tau: f64) -> Result<WienerHopfFactors> {
    let divisor = partition(b, w, tau)?;
    let counts = divisor.counts();
    if !divisor.is_resolvent(b.m()) {
        return Err(Error::NotInResolventSet(format!(
            "w = {w}: |Z_in| = {}, |Z_un| = {}, |Z_ext| = {} (m = {})",
            counts.inside,
            counts.unimodular,
            counts.outside,
            b.m()
        )));
    }
    Ok(WienerHopfFactors {
        w,
        leading: b.coeff(b.k() as i64),
        ext_roots: divisor.outside(),
        in_roots: divisor.inside(),
    })
}

/// `sup_T |f|` from `n` samples, refined by golden-section search around the
/// largest grid maxima and around the given hint angles.
fn sup_on_circle<F: Fn(f64) -> f64 + Sync>(f: F, n: usize, hints: &[f64]) -> f64 {
    let neg: Vec<f64> = circle_angles(n).map(|t| -f(t)).collect();
    let (_, best) = refine_periodic_min(|t| -f(t), &neg, 3);
    let h = 2.0 * PI / n as f64;
    let mut sup = -best;
    for &center in hints {
        let (_, v) = crate::optimize::golden_section_min(|t| -f(t), center - h, center + h, 1e-15);
        sup = sup.max(-v);
    }
    sup
}

/// `||b_in^{-1}||_inf * ||b_ext^{-1}||_inf`, an upper bound for the resolvent norm.
pub fn krein_bound(f: &WienerHopfFactors, grid_n: usize) -> f64 {
    let in_hints: Vec<f64> = f.in_roots.iter().map(|z| z.arg()).collect();
    let ext_hints: Vec<f64> = f.ext_roots.iter().map(|z| z.arg()).collect();
    let sup_in = if f.in_roots.is_empty() {
        1.0
    } else {
        sup_on_circle(|t| f.b_in(Complex64::from_polar(1.0, t)).norm().recip(), grid_n, &in_hints)
    };
    let sup_ext = sup_on_circle(|t| f.b_ext(Complex64::from_polar(1.0, t)).norm().recip(), grid_n, &ext_hints);
    sup_in * sup_ext
}

/// Taylor coefficients `h_0, ..., h_{N-1}` of a function in `H^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeVector {
    pub coeffs: Vec<Complex64>,
}

impl ProbeVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn unit(n: usize, index: usize) -> Self {
        let mut coeffs = vec![ZERO; n];
        coeffs[index] = ONE;
        Self { coeffs }
    }

    /// Unit-norm vector with independent standard complex Gaussian entries.
    pub fn gaussian(n: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut coeffs: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }
}

/// The resolvent at a fixed `w`: factors plus the partial-fraction weights
/// `a_j = prod_{p != j} (z_j - z_p)^{-1}` over the interior roots.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    symbol: &'a LaurentSymbol,
    factors: WienerHopfFactors,
    weights: Vec<Complex64>,
}

impl<'a> Resolvent<'a> {
    pub fn new(b: &'a LaurentSymbol, w: Complex64, tau: f64) -> Result<Self> {
        let factors = factorize(b, w, tau)?;
        Self::from_factors(b, factors)
    }

    pub fn from_factors(b: &'a LaurentSymbol, factors: WienerHopfFactors) -> Result<Self> {
        let separation = min_separation(&factors.in_roots);
        if separation < INTERIOR_SEPARATION {
            return Err(Error::MultipleInteriorRoots { separation });
        }
        let weights = factors
            .in_roots
            .iter()
            .enumerate()
            .map(|(j, zj)| {
                factors.in_roots.iter().enumerate().filter(|(p, _)| *p != j).fold(ONE, |acc, (_, zp)| acc / (zj - zp))
            })
            .collect();
        Ok(Self { symbol: b, factors, weights })
    }

    pub fn factors(&self) -> &WienerHopfFactors {
        &self.factors
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// `P_+(h / b_in) = sum_j a_j (f(t) - f(z_j)) / (t - z_j)` with `f = t^m h`.
    fn projected_quotient(&self, h: &ProbeVector) -> Vec<Complex64> {
        let m = self.symbol.m();
        let mut f = vec![ZERO; m];
        f.extend_from_slice(&h.coeffs);
        let mut g = vec![ZERO; f.len() - 1];
        for (zj, aj) in self.factors.in_roots.iter().zip(&self.weights) {
            for (acc, q) in g.iter_mut().zip(difference_quotient(&f, *zj)) {
                *acc += aj * q;
            }
        }
        g
    }

    /// `(T_b - w)^{-1} h`, truncated to `h.len()` coefficients.
    ///
    /// Division by `b_ext` is done on a circle grid of at least `4N` points,
    /// enlarged until the Taylor tail of `1 / b_ext` is below rounding over the
    /// grid length; when that would exceed `2^18` points the division falls
    /// back to the exact recursion for `1 / (z - z_i)`.
    pub fn apply(&self, h: &ProbeVector) -> ProbeVector {
        let n = h.len();
        let g = self.projected_quotient(h);
        let rho = self.factors.ext_roots.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let len = grid_len_for_decay((4 * n).max(g.len() + 1), rho);
        let coeffs = if len <= MAX_DIVISION_GRID {
            let gv = eval_on_grid(&g, len);
            let quotient: Vec<Complex64> = gv
                .iter()
                .zip(circle_angles(len))
                .map(|(v, theta)| v / self.factors.b_ext(Complex64::from_polar(1.0, theta)))
                .collect();
            let mut c = grid_coefficients(&quotient);
            c.truncate(n);
            c
        } else {
            divide_by_ext_exact(&self.factors, &g, n)
        };
        ProbeVector { coeffs }
    }

    /// `(||I_1||_2, ||I_2||_2)` by trapezoid quadrature on a circle grid
    /// refined according to the distance of the roots from the circle.
    pub fn i_decomposition(&self, h: &ProbeVector) -> (f64, f64) {
        let b = self.symbol;
        let m = b.m() as i32;
        let delta = self
            .factors
            .in_roots
            .iter()
            .chain(&self.factors.ext_roots)
            .map(|z| (1.0 - z.norm()).abs())
            .fold(f64::INFINITY, f64::min);
        let min_len = 4 * (h.len() + b.degree());
        let len = (min_len.max((64.0 / delta).min((1u64 << 22) as f64) as usize)).next_power_of_two();
        let hv = eval_on_grid(&h.coeffs, len);
        let point_terms: Vec<Complex64> =
            self.factors.in_roots.iter().zip(&self.weights).map(|(zj, aj)| aj * zj.powi(m) * h.eval(*zj)).collect();
        let mut i1 = Vec::with_capacity(len);
        let mut i2 = Vec::with_capacity(len);
        for (hl, theta) in hv.iter().zip(circle_angles(len)) {
            let t = Complex64::from_polar(1.0, theta);
            let scale = self.factors.b_in(t) / (b.eval_unchecked(t) - self.factors.w);
            let mut s1 = ZERO;
            let mut s2 = ZERO;
            for ((zj, aj), pj) in self.factors.in_roots.iter().zip(&self.weights).zip(&point_terms) {
                let kernel = scale / (t - zj);
                s1 += aj * kernel;
                s2 += pj * kernel;
            }
            i1.push(s1 * t.powi(m) * hl);
            i2.push(s2);
        }
        (l2_norm_on_grid(&i1), l2_norm_on_grid(&i2))
    }

    /// Upper bound from the `I_1 - I_2` split:
    /// `1 / min_T |b - w| + sum_j |a_j| |z_j|^m (1 - |z_j|^2)^{-1/2} ||1 / ((t - z_j) b_ext)||_2`.
    ///
    /// `None` when the exterior roots are too close together for exact partial fractions.
    pub fn explicit_bound(&self, dist_to_curve: f64) -> Option<f64> {
        let m = self.symbol.m() as i32;
        let mut bound = dist_to_curve.recip();
        for (zj, aj) in self.factors.in_roots.iter().zip(&self.weights) {
            let mut poles = self.factors.ext_roots.clone();
            poles.push(*zj);
            let kernel_norm = rational_l2_norm(self.factors.leading.inv(), &poles)?;
            bound += aj.norm() * zj.norm().powi(m) / (1.0 - zj.norm_sqr()).sqrt() * kernel_norm;
        }
        Some(bound)
    }
}

/// Taylor coefficients of `g / b_ext` up to degree `n - 1` via
/// `1 / (z - z_i) = -(1 / z_i) sum (z / z_i)^k`.
fn divide_by_ext_exact(f: &WienerHopfFactors, g: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = g.iter().copied().chain(std::iter::repeat(ZERO)).take(n).collect();
    for zi in &f.ext_roots {
        let inv = zi.inv();
        // x (z - z_i) = y gives x_k = (x_{k-1} - y_k) / z_i
        let mut prev = ZERO;
        for c in y.iter_mut() {
            let next = -(*c - prev) * inv;
            prev = next;
            *c = next;
        }
    }
    let lead_inv = f.leading.inv();
    y.iter_mut().for_each(|c| *c *= lead_inv);
    y
}

/// `(T_b - w)^{-1} h` with the default circle band.
pub fn apply_resolvent(b: &LaurentSymbol, w: Complex64, h: &ProbeVector) -> Result<ProbeVector> {
    Ok(Resolvent::new(b, w, DEFAULT_TAU)?.apply(h))
}

pub fn i_decomposition(b: &LaurentSymbol, w: Complex64, h: &ProbeVector) -> Result<(f64, f64)> {
    Ok(Resolvent::new(b, w, DEFAULT_TAU)?.i_decomposition(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub probes: usize,
    /// Truncation degree of the probe vectors.
    pub truncation: usize,
    /// Finite-section size; `None` skips the section estimate.
    pub section: Option<usize>,
    pub grid: usize,
    pub seed: u64,
    pub tau: f64,
    /// Compute the `I_1 / I_2` norms for the best probe.
    pub diagnostics: bool,
    /// Also report the finite section of the flipped symbol.
    pub flip_caveat: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            probes: 16,
            truncation: 512,
            section: Some(800),
            grid: 4096,
            seed: 42,
            tau: DEFAULT_TAU,
            diagnostics: true,
            flip_caveat: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventEstimate {
    pub w: Complex64,
    /// Largest `||(T_b - w)^{-1} h||` over the unit probes.
    pub lower: f64,
    pub upper: f64,
    pub krein_upper: f64,
    /// Bound from the explicit resolvent formula (see [`Resolvent::explicit_bound`]).
    pub explicit_upper: Option<f64>,
    pub dist_to_curve: f64,
    pub section_estimate: Option<f64>,
    pub section_size: Option<usize>,
    /// Finite sections may overestimate the operator's resolvent norm.
    pub section_caveat: bool,
    pub flip_section_estimate: Option<f64>,
    pub i1_norm: Option<f64>,
    pub i2_norm: Option<f64>,
    pub probes_used: usize,
    pub best_probe: Option<usize>,
}

/// Probe lower bounds for the first `count` probes, in probe order.
pub fn probe_norms(res: &Resolvent<'_>, count: usize, truncation: usize, seed: u64) -> Vec<f64> {
    (0..count).into_par_iter().map(|i| res.apply(&ProbeVector::gaussian(truncation, seed, i as u64)).norm()).collect()
}

pub fn estimate_norm(b: &LaurentSymbol, w: Complex64, opts: &EstimateOptions) -> Result<ResolventEstimate> {
    if opts.truncation < 2 * b.degree() {
        return Err(Error::InvalidParameter(format!("truncation {} too small", opts.truncation)));
    }
    let res = Resolvent::new(b, w, opts.tau)?;
    let norms = probe_norms(&res, opts.probes, opts.truncation, opts.seed);
    let (best_probe, lower) =
        norms
            .iter()
            .copied()
            .enumerate()
            .fold((None, 0.0), |(bi, bv), (i, v)| if v > bv { (Some(i), v) } else { (bi, bv) });

    let krein_upper = krein_bound(res.factors(), opts.grid);
    let curve = spectrum_curve(b, opts.grid.max(crate::spectral::MIN_CURVE_SAMPLES))?;
    let dist = dist_to_curve(b, w, &curve);
    let explicit_upper = res.explicit_bound(dist);

    let (i1_norm, i2_norm) = match (opts.diagnostics, best_probe) {
        (true, Some(i)) => {
            let (a, c) = res.i_decomposition(&ProbeVector::gaussian(opts.truncation, opts.seed, i as u64));
            (Some(a), Some(c))
        }
        _ => (None, None),
    };

    let section = opts.section.map(|n| finite_section_estimate(b, w, n)).transpose()?;
    let flip_section = match (opts.flip_caveat, opts.section) {
        (true, Some(n)) => Some(finite_section_estimate(&b.flipped(), w, n)?.inverse_norm),
        _ => None,
    };

    Ok(ResolventEstimate {
        w,
        lower,
        upper: krein_upper,
        krein_upper,
        explicit_upper,
        dist_to_curve: dist,
        section_estimate: section.map(|s| s.inverse_norm),
        section_size: opts.section,
        section_caveat: section.is_some(),
        flip_section_estimate: flip_section,
        i1_norm,
        i2_norm,
        probes_used: opts.probes,
        best_probe,
    })
}
