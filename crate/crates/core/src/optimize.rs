//! One-dimensional searches over the unit circle.

use std::f64::consts::PI;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize a unimodal `f` on `[a, b]` by golden-section search; returns `(x, f(x))`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)].into_iter().fold((x, fx), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Minimum of a smooth periodic function of the angle from grid samples
/// `values[i] = f(2 pi i / n)`, refining the `candidates` smallest local minima.
pub fn refine_periodic_min<F: Fn(f64) -> f64>(f: F, values: &[f64], candidates: usize) -> (f64, f64) {
    let n = values.len();
    let h = 2.0 * PI / n as f64;
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] <= prev && values[i] <= next
        })
        .collect();
    if minima.is_empty() {
        minima.push(0);
    }
    minima.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    minima.truncate(candidates.max(1));

    let mut best = (0.0, f64::INFINITY);
    for i in minima {
        let center = h * i as f64;
        let grid = (center, values[i]);
        let refined = golden_section_min(&f, center - h, center + h, 1e-15_f64.max(h * 1e-12));
        for cand in [grid, refined] {
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    best
}
