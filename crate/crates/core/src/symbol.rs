//! Laurent polynomial symbols and the polynomials attached to them.
//!
//! A symbol `b(z) = b_{-m} z^{-m} + ... + b_0 + ... + b_k z^k` with
//! `b_{-m} b_k != 0` defines a banded Toeplitz operator. Its spectral data are
//! read off the polynomial `P(z, w) = z^m (b(z) - w)` of degree `m + k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative residual scale used to decide whether a point is a root of a polynomial.
pub const ROOT_RESIDUAL_FACTOR: f64 = 1e-8;

/// A Laurent polynomial with a pole of order `m` at the origin and degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSymbol {
    m: usize,
    k: usize,
    /// Dense storage: `coeffs[i]` is `b_{i - m}`.
    coeffs: Vec<Complex64>,
}

impl LaurentSymbol {
    /// Build from dense coefficients `b_{-m}, ..., b_k`.
    pub fn new(m: usize, k: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidSymbol(format!("need m >= 1 and k >= 1, got m = {m}, k = {k}")));
        }
        if coeffs.len() != m + k + 1 {
            return Err(Error::InvalidSymbol(format!(
                "expected {} coefficients for m = {m}, k = {k}, got {}",
                m + k + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidSymbol("non-finite coefficient".into()));
        }
        if coeffs[0] == ZERO {
            return Err(Error::InvalidSymbol(format!("b_{{-{m}}} = 0")));
        }
        if coeffs[m + k] == ZERO {
            return Err(Error::InvalidSymbol(format!("b_{k} = 0")));
        }
        Ok(Self { m, k, coeffs })
    }

    /// Build from sparse `(n, b_n)` pairs; absent indices are zero.
    pub fn from_terms(m: usize, k: usize, terms: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![ZERO; m + k + 1];
        for &(n, c) in terms {
            let idx = n + m as i64;
            if idx < 0 || idx > (m + k) as i64 {
                return Err(Error::InvalidSymbol(format!("coefficient index {n} outside -{m}..{k}")));
            }
            coeffs[idx as usize] += c;
        }
        Self::new(m, k, coeffs)
    }

    /// `b(z) = z^{-1} + z^2`, the three-petal flower.
    pub fn flower() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(1, 2, vec![one, ZERO, ZERO, one]).expect("flower symbol is valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of roots of `P(z, w)`.
    pub fn degree(&self) -> usize {
        self.m + self.k
    }

    /// `b_n`, zero outside `-m..=k`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let idx = n + self.m as i64;
        if idx < 0 || idx > (self.m + self.k) as i64 {
            ZERO
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Dense coefficients `b_{-m}, ..., b_k`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Evaluate `b(z)`; the analytic and principal parts are each done by Horner.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z == ZERO {
            return Err(Error::Pole);
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let m = self.m;
        let mut analytic = ZERO;
        for c in self.coeffs[m..].iter().rev() {
            analytic = analytic * z + c;
        }
        let zi = z.inv();
        let mut principal = ZERO;
        for c in self.coeffs[..m].iter() {
            principal = (principal + c) * zi;
        }
        analytic + principal
    }

    /// Evaluate `b'(z) = sum n b_n z^{n-1}`.
    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        if z == ZERO {
            return Err(Error::Pole);
        }
        Ok(self.eval_derivative_unchecked(z))
    }

    pub(crate) fn eval_derivative_unchecked(&self, z: Complex64) -> Complex64 {
        let m = self.m;
        // analytic part: sum_{n=1}^k n b_n z^{n-1}
        let mut analytic = ZERO;
        for (n, c) in self.coeffs[m + 1..].iter().enumerate().rev() {
            analytic = analytic * z + c * (n as f64 + 1.0);
        }
        // principal part: sum_{n=1}^m -n b_{-n} z^{-n-1}
        let zi = z.inv();
        let mut principal = ZERO;
        for (i, c) in self.coeffs[..m].iter().enumerate() {
            let n = (m - i) as f64;
            principal = (principal - c * n) * zi;
        }
        analytic + principal * zi
    }

    /// `b(e^{i theta})`.
    pub fn on_circle(&self, theta: f64) -> Complex64 {
        self.eval_unchecked(Complex64::from_polar(1.0, theta))
    }

    /// Coefficients of `P(z, w) = z^m (b(z) - w)`.
    pub fn p_coefficients(&self, w: Complex64) -> PolyCoeffs {
        let mut p = self.coeffs.clone();
        p[self.m] -= w;
        PolyCoeffs { p }
    }

    /// The symbol `z -> b(1/z)` (transposed operator).
    pub fn flipped(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { m: self.k, k: self.m, coeffs }
    }

    /// Upper bound for `max_T |b|` by the coefficient l1 norm.
    pub fn coeff_l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Apply the banded matrix `T_b - w` to a finitely supported vector,
    /// returning the first `x.len()` entries of the product.
    pub fn toeplitz_apply(&self, w: Complex64, x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        let (m, k) = (self.m as i64, self.k as i64);
        (0..n as i64)
            .map(|i| {
                let lo = (i - k).max(0);
                let hi = (i + m).min(n as i64 - 1);
                let mut acc = -w * x[i as usize];
                for j in lo..=hi {
                    acc += self.coeff(i - j) * x[j as usize];
                }
                acc
            })
            .collect()
    }
}

/// JSON form of a symbol: `{"m": 1, "k": 2, "coeffs": {"-1": [1, 0], "2": [1, 0]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolFile {
    pub m: usize,
    pub k: usize,
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

impl TryFrom<SymbolFile> for LaurentSymbol {
    type Error = Error;

    fn try_from(file: SymbolFile) -> Result<Self> {
        let mut terms = Vec::with_capacity(file.coeffs.len());
        for (key, [re, im]) in &file.coeffs {
            let n: i64 =
                key.trim().parse().map_err(|_| Error::InvalidSymbol(format!("bad coefficient index {key:?}")))?;
            terms.push((n, Complex64::new(*re, *im)));
        }
        LaurentSymbol::from_terms(file.m, file.k, &terms)
    }
}

impl From<&LaurentSymbol> for SymbolFile {
    fn from(b: &LaurentSymbol) -> Self {
        let coeffs = (-(b.m as i64)..=b.k as i64)
            .filter_map(|n| {
                let c = b.coeff(n);
                (c != ZERO).then(|| (n.to_string(), [c.re, c.im]))
            })
            .collect();
        Self { m: b.m, k: b.k, coeffs }
    }
}

impl LaurentSymbol {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidSymbol(format!("malformed symbol JSON: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SymbolFile::from(self)).expect("symbol serializes")
    }
}

/// Polynomial coefficients `p_0, ..., p_d` of `sum p_j z^j`, with `p_d != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    p: Vec<Complex64>,
}

impl PolyCoeffs {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut p: Vec<Complex64>) -> Result<Self> {
        while p.last() == Some(&ZERO) {
            p.pop();
        }
        if p.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        Ok(Self { p })
    }

    pub fn from_real(p: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `leading * prod (z - r)`.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Self {
        let mut p = vec![leading];
        for &r in roots {
            p.push(ZERO);
            for j in (1..p.len()).rev() {
                let prev = p[j - 1];
                p[j] -= r * prev;
            }
        }
        p.reverse();
        Self { p }
    }

    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.p
    }

    pub fn leading(&self) -> Complex64 {
        self.p[self.degree()]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.p.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.p.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// Value and derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut val = ZERO;
        let mut der = ZERO;
        for c in self.p.iter().rev() {
            der = der * z + val;
            val = val * z + c;
        }
        (val, der)
    }

    /// `sum |p_j| |z|^j`, the scale of rounding error in evaluating at `z`.
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Residual tolerance `1e-8 * d * max_j |p_j|` for root certification.
    pub fn residual_tolerance(&self) -> f64 {
        ROOT_RESIDUAL_FACTOR * self.degree().max(1) as f64 * self.max_abs_coeff()
    }

    /// Residual tolerance at `z`, scaled by `max(1, |z|)^d` so that roots
    /// outside the unit disk are judged relative to the size of the terms.
    pub fn residual_tolerance_at(&self, z: Complex64) -> f64 {
        self.residual_tolerance() * z.norm().max(1.0).powi(self.degree() as i32)
    }

    pub fn derivative(&self) -> Option<PolyCoeffs> {
        if self.degree() == 0 {
            return None;
        }
        let dp = self.p[1..].iter().enumerate().map(|(j, c)| c * (j as f64 + 1.0)).collect();
        PolyCoeffs::new(dp).ok()
    }

    /// Coefficients of the product with `(z - t)`.
    pub fn mul_linear(&self, t: Complex64) -> PolyCoeffs {
        let d = self.degree();
        let mut out = vec![ZERO; d + 2];
        for (j, c) in self.p.iter().enumerate() {
            out[j + 1] += c;
            out[j] -= t * c;
        }
        PolyCoeffs { p: out }
    }

    /// Quotient `Q(z) = P(z) / (z - t0)` for a unimodular root `t0`:
    /// `q_j = t0^{-j-1} sum_{i=j+1}^{d} p_i t0^i`.
    pub fn q_coefficients(&self, t0: Complex64) -> Result<PolyCoeffs> {
        if (t0.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("t0 must be unimodular, |t0| = {}", t0.norm())));
        }
        let d = self.degree();
        if d == 0 {
            return Err(Error::InvalidPolynomial("constant polynomial has no roots".into()));
        }
        let residual = self.eval(t0).norm();
        let tolerance = self.residual_tolerance();
        if residual > tolerance {
            return Err(Error::NotARoot { residual, tolerance });
        }
        let mut q = vec![ZERO; d];
        let mut suffix = ZERO;
        for j in (0..d).rev() {
            suffix += self.p[j + 1] * t0.powu(j as u32 + 1);
            q[j] = suffix * t0.powi(-(j as i32) - 1);
        }
        PolyCoeffs::new(q)
    }

    /// `|q_n| > sum_{j != n} |q_j|` for some `n`: sufficient for no zeros on the circle.
    pub fn has_dominant_coefficient(&self) -> bool {
        let mods: Vec<f64> = self.p.iter().map(|c| c.norm()).collect();
        let total: f64 = mods.iter().sum();
        mods.iter().any(|&a| a > total - a)
    }
}

/// `n` uniformly spaced angles `2 pi i / n`.
pub fn circle_angles(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
}
