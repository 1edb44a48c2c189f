//! Hardy-space helpers on the unit circle: FFT evaluation on uniform grids,
//! Fourier coefficients, the Riesz projection `P_+`, and exact `L^2` norms of
//! rational functions with simple poles off the circle.

use num_complex::Complex64;
use rustfft::FftPlanner;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Values `sum_n c_n t_l^n` at `t_l = e^{2 pi i l / len}`; coefficients beyond
/// `len` are folded (aliased) onto their residue class.
pub fn eval_on_grid(coeffs: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; len];
    for (n, c) in coeffs.iter().enumerate() {
        buf[n % len] += c;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    buf
}

/// Discrete Fourier coefficients of grid samples: entry `n` approximates
/// `c_n` for `n < len / 2` and `c_{n - len}` above.
pub fn grid_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let len = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// `P_+` of a function given by grid samples, truncated to `n_out` Taylor coefficients.
pub fn riesz_projection(values: &[Complex64], n_out: usize) -> Vec<Complex64> {
    assert!(n_out <= values.len() / 2, "projection needs n_out <= len / 2");
    let mut c = grid_coefficients(values);
    c.truncate(n_out);
    c
}

/// `(f(t) - f(alpha)) / (t - alpha)` by synthetic division.
pub fn difference_quotient(f: &[Complex64], alpha: Complex64) -> Vec<Complex64> {
    if f.len() <= 1 {
        return Vec::new();
    }
    let d = f.len() - 1;
    let mut q = vec![ZERO; d];
    q[d - 1] = f[d];
    for j in (1..d).rev() {
        q[j - 1] = f[j] + alpha * q[j];
    }
    q
}

/// `P_+(f / (t - alpha))` for `|alpha| < 1`, computed on a grid fine enough
/// that the aliased tail `|alpha|^len` is below rounding.
pub fn project_quotient_fft(f: &[Complex64], alpha: Complex64) -> Vec<Complex64> {
    let n_out = f.len().saturating_sub(1);
    if n_out == 0 {
        return Vec::new();
    }
    let len = grid_len_for_decay(4 * f.len(), alpha.norm().recip());
    let fv = eval_on_grid(f, len);
    let values: Vec<Complex64> = fv
        .iter()
        .enumerate()
        .map(|(l, v)| {
            let t = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 / len as f64);
            v / (t - alpha)
        })
        .collect();
    riesz_projection(&values, n_out)
}

/// Power-of-two grid length at least `min_len` such that a Fourier tail
/// decaying like `rho^{-n}` drops below 1e-17 over the grid length.
pub fn grid_len_for_decay(min_len: usize, rho: f64) -> usize {
    let needed = if rho > 1.0 { (40.0 / rho.ln()).ceil() } else { f64::INFINITY };
    let len = if needed.is_finite() && needed < 1e12 { min_len.max(needed as usize) } else { min_len };
    len.next_power_of_two()
}

/// Root-mean-square of grid samples, the trapezoid `L^2(T)` norm.
pub fn l2_norm_on_grid(values: &[Complex64]) -> f64 {
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64).sqrt()
}

/// Point-evaluation bound `|h(lambda)| <= ||h||_2 / sqrt(1 - |lambda|^2)` in `H^2`.
pub fn h2_evaluation_bound(h_norm: f64, lambda: Complex64) -> f64 {
    h_norm / (1.0 - lambda.norm_sqr()).sqrt()
}

/// Exact `L^2(T)` norm of `scale / prod_p (t - zeta_p)` for simple poles off the circle.
///
/// Uses partial fractions and the Gram matrix of the kernels `1 / (t - zeta)`:
/// `<1/(t-a), 1/(t-b)> = 1/(1 - a conj(b))` when both are inside, `1/(a conj(b) - 1)`
/// when both are outside, and zero otherwise. Returns `None` when two poles
/// are too close for the partial fractions to be reliable.
pub fn rational_l2_norm(scale: Complex64, poles: &[Complex64]) -> Option<f64> {
    let n = poles.len();
    if n == 0 {
        return Some(scale.norm());
    }
    let mut residues = Vec::with_capacity(n);
    for (p, zp) in poles.iter().enumerate() {
        let mut prod = scale;
        for (q, zq) in poles.iter().enumerate() {
            if q != p {
                let diff = zp - zq;
                if diff.norm() < 1e-6 * zp.norm().max(1.0) {
                    return None;
                }
                prod /= diff;
            }
        }
        residues.push(prod);
    }
    let mut total = ZERO;
    for (a, ra) in poles.iter().zip(&residues) {
        let a_in = a.norm() < 1.0;
        for (bq, rb) in poles.iter().zip(&residues) {
            let b_in = bq.norm() < 1.0;
            if a_in != b_in {
                continue;
            }
            let denom = Complex64::new(1.0, 0.0) - a * bq.conj();
            let gram = if a_in { denom.inv() } else { -denom.inv() };
            total += ra * rb.conj() * gram;
        }
    }
    Some(total.re.max(0.0).sqrt())
}
