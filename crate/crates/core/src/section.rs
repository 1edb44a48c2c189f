//! Finite sections `T_n(b) - w I` and their smallest singular value.
//!
//! The matrix is factored once by banded LU with partial pivoting; the
//! largest singular value of the inverse is then found by power iteration on
//! `(A A^H)^{-1}`, each step costing two banded triangular solves.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symbol::LaurentSymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this `sigma_min` the section is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

/// Banded LU factors of an `n x n` matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    /// Row `i` holds columns `i - kl ..= i + ku + kl` at offset `j + kl - i`.
    data: Vec<Complex64>,
    pivots: Vec<usize>,
    min_pivot: f64,
}

impl BandedLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    /// Factor a banded matrix given by `entry(i, j)` (zero outside the band).
    pub fn factor<F: Fn(usize, usize) -> Complex64>(n: usize, kl: usize, ku: usize, entry: F) -> Self {
        let width = 2 * kl + ku + 1;
        let mut lu = Self { n, kl, width, data: vec![ZERO; n * width], pivots: vec![0; n], min_pivot: f64::INFINITY };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                let k = lu.idx(i, j);
                lu.data[k] = entry(i, j);
            }
        }
        for c in 0..n {
            let last_row = (c + kl).min(n - 1);
            let last_col = (c + ku + kl).min(n - 1);
            let p = (c..=last_row)
                .max_by(|&a, &b| lu.data[lu.idx(a, c)].norm().total_cmp(&lu.data[lu.idx(b, c)].norm()))
                .unwrap_or(c);
            lu.pivots[c] = p;
            if p != c {
                for j in c..=last_col {
                    let (a, b) = (lu.idx(c, j), lu.idx(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.idx(c, c)];
            lu.min_pivot = lu.min_pivot.min(pivot.norm());
            if pivot == ZERO {
                continue;
            }
            for r in c + 1..=last_row {
                let rc = lu.idx(r, c);
                let l = lu.data[rc] / pivot;
                lu.data[rc] = l;
                if l == ZERO {
                    continue;
                }
                for j in c + 1..=last_col {
                    let (rj, cj) = (lu.idx(r, j), lu.idx(c, j));
                    let u = lu.data[cj];
                    lu.data[rj] -= l * u;
                }
            }
        }
        lu
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Solve `A x = y` in place.
    pub fn solve(&self, x: &mut [Complex64]) {
        let (n, kl) = (self.n, self.kl);
        for c in 0..n {
            x.swap(c, self.pivots[c]);
            let xc = x[c];
            for r in c + 1..=(c + kl).min(n - 1) {
                x[r] -= self.data[self.idx(r, c)] * xc;
            }
        }
        let reach = self.width - kl - 1;
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                acc -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = acc / self.data[self.idx(i, i)];
        }
    }

    /// Solve `A^H z = y` in place.
    pub fn solve_adjoint(&self, x: &mut [Complex64]) {
        let (n, kl) = (self.n, self.kl);
        let reach = self.width - kl - 1;
        for i in 0..n {
            let mut acc = x[i];
            for j in i.saturating_sub(reach)..i {
                acc -= self.data[self.idx(j, i)].conj() * x[j];
            }
            x[i] = acc / self.data[self.idx(i, i)].conj();
        }
        for c in (0..n).rev() {
            let mut acc = x[c];
            for r in c + 1..=(c + kl).min(n - 1) {
                acc -= self.data[self.idx(r, c)].conj() * x[r];
            }
            x[c] = acc;
            x.swap(c, self.pivots[c]);
        }
    }
}

/// `||(T_n(b) - w)^{-1}||` with the caveat that finite sections converge to
/// the larger of the resolvent norms for `b` and its flip `b(1/z)`, so they
/// may overestimate the norm for the operator itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionEstimate {
    pub size: usize,
    /// `1 / sigma_min`, infinite when the section is numerically singular.
    pub inverse_norm: f64,
    pub iterations: usize,
}

impl SectionEstimate {
    pub fn is_singular(&self) -> bool {
        self.inverse_norm.is_infinite()
    }
}

/// `1 / sigma_min(T_n(b) - w I)` for the `n x n` leading section.
pub fn finite_section_estimate(b: &LaurentSymbol, w: Complex64, n: usize) -> Result<SectionEstimate> {
    let min_n = 4 * b.degree();
    if n < min_n {
        return Err(Error::InvalidParameter(format!("section size {n} below 4(m+k) = {min_n}")));
    }
    let lu = BandedLu::factor(n, b.k(), b.m(), |i, j| {
        let diag = if i == j { w } else { ZERO };
        b.coeff(i as i64 - j as i64) - diag
    });
    let singular = SectionEstimate { size: n, inverse_norm: f64::INFINITY, iterations: 0 };
    if lu.min_pivot() == 0.0 || !lu.min_pivot().is_finite() {
        return Ok(singular);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC7_1047);
    let mut x: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    normalize(&mut x);
    let mut estimate = 0.0;
    let mut iterations = 0;
    for it in 1..=500 {
        iterations = it;
        lu.solve(&mut x);
        let growth = norm(&x);
        if !growth.is_finite() {
            return Ok(singular);
        }
        lu.solve_adjoint(&mut x);
        let second = norm(&x);
        // ||A^{-H} A^{-1} x|| / ||A^{-1} x|| >= ||A^{-1} x||, both converge to ||A^{-1}||
        let next = second / growth;
        normalize(&mut x);
        let converged = (next - estimate).abs() <= 1e-12 * next;
        estimate = next;
        if converged {
            break;
        }
    }
    if estimate * SINGULAR_THRESHOLD > 1.0 {
        return Ok(singular);
    }
    Ok(SectionEstimate { size: n, inverse_norm: estimate, iterations })
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let s = norm(x);
    x.iter_mut().for_each(|c| *c /= s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(b: &LaurentSymbol, w: Complex64, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |i, j| b.coeff(i as i64 - j as i64) - if i == j { w } else { ZERO })
    }

    #[test]
    fn banded_solves_match_dense() {
        let b = LaurentSymbol::from_terms(
            2,
            1,
            &[(-2, Complex64::new(0.3, 0.1)), (-1, Complex64::new(-1.0, 0.0)), (1, Complex64::new(0.2, 0.7))],
        )
        .unwrap();
        let w = Complex64::new(0.05, -0.4);
        let n = 30;
        let lu = BandedLu::factor(n, b.k(), b.m(), |i, j| dense(&b, w, n)[(i, j)]);
        let a = dense(&b, w, n);
        let rhs: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64 * 0.1)).collect();
        let mut x = rhs.clone();
        lu.solve(&mut x);
        let ax = &a * nalgebra::DVector::from_vec(x);
        for (p, q) in ax.iter().zip(&rhs) {
            assert!((p - q).norm() < 1e-10);
        }
        let mut z = rhs.clone();
        lu.solve_adjoint(&mut z);
        let ahz = a.adjoint() * nalgebra::DVector::from_vec(z);
        for (p, q) in ahz.iter().zip(&rhs) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn matches_dense_svd() {
        let b = LaurentSymbol::flower();
        for w in [Complex64::new(3.0, 0.0), Complex64::from_polar(0.2, 1.0), Complex64::new(-0.5, 1.1)] {
            let n = 48;
            let est = finite_section_estimate(&b, w, n).unwrap();
            let sv = dense(&b, w, n).singular_values();
            let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
            assert!((est.inverse_norm * smin - 1.0).abs() < 1e-8, "w = {w}: {} vs {}", est.inverse_norm, 1.0 / smin);
        }
    }

    #[test]
    fn flip_has_identical_section() {
        let b =
            LaurentSymbol::from_terms(1, 2, &[(-1, Complex64::new(1.0, 0.5)), (2, Complex64::new(0.3, 0.0))]).unwrap();
        let w = Complex64::new(0.1, 0.9);
        let a = finite_section_estimate(&b, w, 64).unwrap().inverse_norm;
        let f = finite_section_estimate(&b.flipped(), w, 64).unwrap().inverse_norm;
        assert!((a - f).abs() < 1e-9 * a);
    }

    #[test]
    fn outside_numerical_range() {
        let b = LaurentSymbol::flower();
        for w in [Complex64::new(3.0, 0.0), Complex64::new(0.0, -4.0), Complex64::new(-2.5, 2.5)] {
            let est = finite_section_estimate(&b, w, 200).unwrap();
            assert!(est.inverse_norm <= 1.0 / (w.norm() - 2.0) + 1e-12);
        }
    }

    #[test]
    fn rejects_small_sections() {
        assert!(finite_section_estimate(&LaurentSymbol::flower(), Complex64::new(3.0, 0.0), 8).is_err());
    }
}
