//! Roots of `P(z, w)`, their continuation in `w`, and first-order perturbation data.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{LaurentSymbol, PolyCoeffs};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_ITER: usize = 500;

/// Below this modulus `b'(z)` is treated as vanishing.
pub const SINGULARITY_TOLERANCE: f64 = 1e-8;

/// Roots closer than this (relative to their modulus) are treated as one multiple root.
const CLUSTER_TOLERANCE: f64 = 1e-6;

/// The divisor `Z(w)` of `P(z, w)` with per-root residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub w: Option<Complex64>,
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// `paired_base[j]` is the index of the base root that `roots[j]` continues.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub paired_base: Option<Vec<usize>>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest pairwise distance between roots (infinite for fewer than two).
    pub fn min_separation(&self) -> f64 {
        min_separation(&self.roots)
    }

    /// Roots reordered so that entry `i` continues base root `i`.
    pub fn in_base_order(&self) -> Option<Vec<Complex64>> {
        let pairing = self.paired_base.as_ref()?;
        let mut out = vec![ZERO; self.roots.len()];
        for (j, &i) in pairing.iter().enumerate() {
            out[i] = self.roots[j];
        }
        Some(out)
    }
}

/// `b'(z_j(w0))` at every root of `P(z, w0)`, plus the first-order
/// coefficients `1 / b'(z_j(w0))` of the root expansion in `w - w0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationData {
    pub w0: Complex64,
    pub base_roots: Vec<Complex64>,
    pub derivative_at_roots: Vec<Complex64>,
    pub first_order_coeffs: Vec<Complex64>,
}

impl PerturbationData {
    /// First-order prediction `z_j(w0) + (w - w0) / b'(z_j(w0))`.
    pub fn predict(&self, w: Complex64) -> Vec<Complex64> {
        let dw = w - self.w0;
        self.base_roots.iter().zip(&self.first_order_coeffs).map(|(z, c)| z + dw * c).collect()
    }
}

pub(crate) fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Argument in `(-pi, pi]` with values within 1e-12 of `-pi` folded onto `pi`.
fn canonical_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI + 1e-12 {
        PI
    } else {
        a
    }
}

fn root_order(a: &Complex64, b: &Complex64) -> Ordering {
    let (aa, ab) = (canonical_arg(*a), canonical_arg(*b));
    if (aa - ab).abs() > 1e-12 {
        return aa.total_cmp(&ab);
    }
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-12 * ma.max(mb).max(1.0) {
        return ma.total_cmp(&mb);
    }
    a.re.total_cmp(&b.re)
}

/// Sort roots by argument, then modulus, then real part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(root_order);
}

fn initial_guesses(p: &PolyCoeffs) -> Vec<Complex64> {
    let d = p.degree();
    let c = p.coeffs();
    let radius = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    (0..d)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / d as f64 + 0.4;
            let r = radius * (1.0 + 0.05 * ((j % 3) as f64 - 1.0));
            Complex64::from_polar(r, theta)
        })
        .collect()
}

/// Gauss-Seidel Aberth-Ehrlich iteration. Returns true once every correction is at rounding level.
fn aberth(p: &PolyCoeffs, z: &mut [Complex64]) -> bool {
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut done = true;
        for i in 0..n {
            let (val, der) = p.eval_with_derivative(z[i]);
            if val == ZERO {
                continue;
            }
            let newton = val / der;
            let mut repulsion = ZERO;
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    repulsion += (z[i] - zj).inv();
                }
            }
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return false;
            }
            z[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done = false;
            }
        }
        if done {
            return true;
        }
    }
    false
}

fn companion_roots(p: &PolyCoeffs) -> Option<Vec<Complex64>> {
    let d = p.degree();
    let c = p.coeffs();
    let lead = c[d];
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)?;
    let ev = schur.eigenvalues()?;
    Some(ev.iter().copied().collect())
}

fn newton_polish(p: &PolyCoeffs, z: &mut Complex64) {
    for _ in 0..3 {
        let (val, der) = p.eval_with_derivative(*z);
        if der == ZERO {
            return;
        }
        let cand = *z - val / der;
        if p.eval(cand).norm() < val.norm() {
            *z = cand;
        } else {
            return;
        }
    }
}

fn residuals_ok(p: &PolyCoeffs, roots: &[Complex64]) -> (Vec<f64>, bool) {
    let res: Vec<f64> = roots.iter().map(|&z| p.eval(z).norm()).collect();
    let ok = roots.iter().zip(&res).all(|(&z, &r)| r.is_finite() && r <= p.residual_tolerance_at(z));
    (res, ok)
}

fn worst_relative_residual(p: &PolyCoeffs, roots: &[Complex64]) -> f64 {
    roots.iter().map(|&z| p.eval(z).norm() / p.residual_tolerance_at(z)).fold(0.0, |a, r| {
        if r.is_nan() {
            f64::INFINITY
        } else {
            a.max(r)
        }
    })
}

/// All roots of `p`, certified by residual and sorted deterministically.
pub fn solve_roots(p: &PolyCoeffs) -> Result<RootSet> {
    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().take_while(|c| **c == ZERO).count();
    let reduced = PolyCoeffs::new(coeffs[zeros_at_origin..].to_vec())?;
    let mut roots = vec![ZERO; zeros_at_origin];

    match reduced.degree() {
        0 => {}
        1 => {
            let c = reduced.coeffs();
            roots.push(-c[0] / c[1]);
        }
        _ => {
            let mut z = initial_guesses(&reduced);
            let converged = aberth(&reduced, &mut z);
            let (_, ok) = residuals_ok(&reduced, &z);
            if !(converged && ok) {
                // stalled: restart from companion-matrix eigenvalues and keep the better set
                if let Some(mut fallback) = companion_roots(&reduced) {
                    fallback.iter_mut().for_each(|r| newton_polish(&reduced, r));
                    aberth(&reduced, &mut fallback);
                    if worst_relative_residual(&reduced, &fallback) < worst_relative_residual(&reduced, &z) {
                        z = fallback;
                    }
                }
            }
            roots.extend(z);
        }
    }

    sort_roots(&mut roots);
    let (residuals, ok) = residuals_ok(p, &roots);
    if !ok {
        return Err(Error::SolverDiverged { roots, residuals });
    }
    Ok(RootSet { w: None, roots, residuals, paired_base: None })
}

/// Roots of `P(z, w)` for the symbol `b`.
pub fn roots_at(b: &LaurentSymbol, w: Complex64) -> Result<RootSet> {
    let mut set = solve_roots(&b.p_coefficients(w))?;
    set.w = Some(w);
    Ok(set)
}

/// Solve `p_new` and pair each new root with the nearest base root.
///
/// Fails when the nearest-neighbour assignment is not a bijection, or when the
/// largest displacement is not small against the base separation (one tenth).
pub fn continue_roots(base: &RootSet, p_new: &PolyCoeffs) -> Result<RootSet> {
    let mut next = solve_roots(p_new)?;
    if next.len() != base.len() {
        return Err(Error::AmbiguousContinuation(format!("degree changed from {} to {}", base.len(), next.len())));
    }
    let pairing: Vec<usize> = next
        .roots
        .iter()
        .map(|z| {
            base.roots
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| (*a - z).norm().total_cmp(&(*b - z).norm()))
                .map(|(i, _)| i)
                .expect("non-empty base")
        })
        .collect();
    let mut used = vec![false; base.len()];
    for &i in &pairing {
        if used[i] {
            return Err(Error::AmbiguousContinuation(format!("two new roots are nearest to base root {i}")));
        }
        used[i] = true;
    }
    let displacement = next.roots.iter().zip(&pairing).map(|(z, &i)| (z - base.roots[i]).norm()).fold(0.0, f64::max);
    let separation = base.min_separation();
    if separation.is_finite() && 10.0 * displacement > separation {
        return Err(Error::AmbiguousContinuation(format!(
            "displacement {displacement:e} too large for base separation {separation:e}"
        )));
    }
    next.w = None;
    next.paired_base = Some(pairing);
    Ok(next)
}

/// Continue the roots of `b` from `base` (computed at `base.w`) to `w`.
pub fn continue_roots_to(b: &LaurentSymbol, base: &RootSet, w: Complex64) -> Result<RootSet> {
    let mut next = continue_roots(base, &b.p_coefficients(w))?;
    next.w = Some(w);
    Ok(next)
}

/// Replace each member of a cluster of `s` nearby roots (a multiple root that
/// the solver resolved only to about the `s`-th root of machine precision) by
/// the cluster mean refined with Newton steps on `P^{(s-1)}`, of which the
/// multiple root is a simple root.
pub(crate) fn cluster_centers(p: &PolyCoeffs, roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .map(|z| {
            let tol = CLUSTER_TOLERANCE * z.norm().max(1.0);
            let members: Vec<&Complex64> = roots.iter().filter(|y| (*y - z).norm() < tol).collect();
            if members.len() == 1 {
                return *z;
            }
            let mut center = members.iter().copied().sum::<Complex64>() / members.len() as f64;
            let mut dp = p.clone();
            for _ in 1..members.len() {
                match dp.derivative() {
                    Some(d) => dp = d,
                    None => return center,
                }
            }
            for _ in 0..8 {
                let (val, der) = dp.eval_with_derivative(center);
                if der == ZERO || val == ZERO {
                    break;
                }
                let step = val / der;
                if step.norm() > tol {
                    break;
                }
                center -= step;
            }
            center
        })
        .collect()
}

/// First-order data at `w0`; fails if some `|b'(z_j(w0))|` is below
/// [`SINGULARITY_TOLERANCE`], i.e. `w0` is in or near the exceptional set.
pub fn perturbation_data(b: &LaurentSymbol, w0: Complex64) -> Result<PerturbationData> {
    let set = roots_at(b, w0)?;
    let centers = cluster_centers(&b.p_coefficients(w0), &set.roots);
    let mut derivative_at_roots = Vec::with_capacity(set.len());
    for (z, c) in set.roots.iter().zip(&centers) {
        let d = b.eval_derivative(*c)?;
        if d.norm() < SINGULARITY_TOLERANCE {
            return Err(Error::NearExceptional { root: *z, derivative: d.norm() });
        }
        derivative_at_roots.push(d);
    }
    let first_order_coeffs = derivative_at_roots.iter().map(|d| d.inv()).collect();
    Ok(PerturbationData { w0, base_roots: set.roots, derivative_at_roots, first_order_coeffs })
}
