//! End-to-end checks on the three-petal symbol `z^{-1} + z^2` and its origin.

use std::f64::consts::PI;

use bandtoep_core::resolvent::{estimate_norm, EstimateOptions, ProbeVector, Resolvent};
use bandtoep_core::scan::{flower_preset, grid_scan, log_radii_per_decade, ray_scan, ScanOptions};
use bandtoep_core::spectral::dist_to_curve;
use bandtoep_core::{
    finite_section_estimate, in_resolvent_set, roots_at, spectrum_curve, Complex64, LaurentSymbol, DEFAULT_TAU,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn preset_divisor_and_sectors() {
    let p = flower_preset();
    let roots = roots_at(&p.symbol, p.w0).unwrap();
    for e in [Complex64::from_polar(1.0, PI / 3.0), c(-1.0, 0.0), Complex64::from_polar(1.0, -PI / 3.0)] {
        assert!(roots.roots.iter().any(|z| (z - e).norm() < 1e-10));
    }
    assert!((p.total_angle() - PI).abs() < 1e-14);
    assert_eq!((p.domain.c13, p.domain.eps, p.delta), (1.0 / 12.0, 0.25, PI / 36.0));
}

#[test]
fn shrunk_sectors_lie_in_domain() {
    let base = flower_preset();
    // C13 = 1/12 needs sin(delta) > 1/4, wider than the default delta gives
    assert!(base.guaranteed_c13() < base.domain.c13);
    let p = bandtoep_core::scan::flower_preset_with(0.99 * base.guaranteed_c13(), 0.25, base.delta);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shrunk = p.shrunk_sectors();
    let mut checked = 0;
    while checked < 10_000 {
        let (a, b) = shrunk[rng.gen_range(0..3)];
        let w = Complex64::from_polar(rng.gen_range(1e-6..p.domain.eps), rng.gen_range(a..b));
        assert!(p.domain.contains(&p.symbol, w).unwrap(), "w = {w}");
        checked += 1;
    }
}

#[test]
fn section_estimates_converge_at_three() {
    let b = LaurentSymbol::flower();
    let w = c(3.0, 0.0);
    let e: Vec<f64> =
        [200, 400, 800].iter().map(|&n| finite_section_estimate(&b, w, n).unwrap().inverse_norm).collect();
    assert!((e[1] - e[2]).abs() < 0.05 * e[2]);
}

#[test]
fn estimate_at_three() {
    let b = LaurentSymbol::flower();
    let est = estimate_norm(&b, c(3.0, 0.0), &EstimateOptions::default()).unwrap();
    assert!((est.dist_to_curve - 1.0).abs() < 1e-6);
    assert!(est.lower <= est.upper);
    assert!(est.upper / est.lower <= 50.0, "ratio {}", est.upper / est.lower);
    assert!(est.section_estimate.unwrap() >= est.lower);
}

#[test]
fn sections_see_inverse_distance_near_spectrum() {
    let b = LaurentSymbol::flower();
    let curve = spectrum_curve(&b, 4096).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut n = 0;
    while n < 20 {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let w = b.on_circle(theta) + Complex64::from_polar(rng.gen_range(0.01..0.05), rng.gen_range(0.0..2.0 * PI));
        if !in_resolvent_set(&b, w, DEFAULT_TAU).unwrap() {
            continue;
        }
        let d = dist_to_curve(&b, w, &curve);
        // sections approach 1 / dist like 1 / n, slowly once roots crowd the circle
        if !(0.01..=0.05).contains(&d) {
            continue;
        }
        let sec = finite_section_estimate(&b, w, 3200).unwrap().inverse_norm;
        assert!(sec * d >= 0.9, "w = {w}: section {sec}, dist {d}");
        n += 1;
    }
}

#[test]
fn triangle_inequality_for_i_split() {
    let b = LaurentSymbol::flower();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut n = 0;
    while n < 20 {
        let w = c(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
        if !in_resolvent_set(&b, w, DEFAULT_TAU).unwrap() {
            continue;
        }
        let res = Resolvent::new(&b, w, DEFAULT_TAU).unwrap();
        let h = ProbeVector::gaussian(200, 13, n);
        let (i1, i2) = res.i_decomposition(&h);
        assert!(res.apply(&h).norm() <= i1 + i2 + 1e-8);
        n += 1;
    }
}

#[test]
fn ray_scan_along_bisector() {
    let p = flower_preset();
    let radii = log_radii_per_decade(1e-1, 1e-4, 8);
    let dir = Complex64::from_polar(1.0, PI / 3.0);
    let report = ray_scan(&p.symbol, &p.domain, dir, &radii, &ScanOptions::ray(), "flower").unwrap();
    assert!(report.records.iter().all(|r| r.in_omega_prime));
    assert_eq!(report.fit_records, radii.len());
    for r in &report.records {
        assert!(r.product_lower <= r.product_upper);
        assert!(r.dist <= r.r + 1e-12);
        let explicit = r.explicit_upper.unwrap();
        assert!(r.lower <= explicit && explicit <= r.upper);
    }
    // the explicit bound grows linearly, the Krein bound quadratically
    let e = report.slope_fit_explicit.unwrap();
    assert!((-1.2..=-0.8).contains(&e), "explicit slope {e}");
    assert!(report.explicit_product_max_over_min.unwrap() <= 10.0);
    let k = report.slope_fit_upper.unwrap();
    assert!((k + 2.0).abs() < 0.05, "Krein slope {k}");
    // proof terms: I_1 dist and I_2 r stay bounded
    assert!(report.i1_dist_sup.unwrap() < 10.0);
    assert!(report.i2_r_sup.unwrap() < 10.0);
}

#[test]
fn grid_membership_has_threefold_symmetry() {
    let p = flower_preset();
    let dom = bandtoep_core::build_domain(&p.symbol, p.w0, 1.0 / 12.0, 0.3).unwrap();
    let report = grid_scan(&p.symbol, &dom, 0.3, 101, &ScanOptions::grid(), "flower").unwrap();
    assert_eq!(report.records.len(), 101 * 101);
    let members: Vec<_> = report.records.iter().filter(|r| r.in_omega_prime).collect();
    let frac = members.len() as f64 / report.records.len() as f64;
    assert!(frac > 0.0 && frac < 1.0);
    let rot = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
    let mut mismatches = 0;
    for r in &report.records {
        assert!(!r.in_omega_prime || r.in_resolvent);
        assert!(r.product_lower <= r.product_upper);
        mismatches += usize::from(dom.contains(&p.symbol, r.w * rot).unwrap() != r.in_omega_prime);
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn scans_are_deterministic() {
    let p = flower_preset();
    let radii = log_radii_per_decade(1e-1, 1e-2, 4);
    let dir = Complex64::from_polar(1.0, PI / 3.0);
    let a = ray_scan(&p.symbol, &p.domain, dir, &radii, &ScanOptions::ray(), "flower").unwrap();
    let b = ray_scan(&p.symbol, &p.domain, dir, &radii, &ScanOptions::ray(), "flower").unwrap();
    let rows = |r: &bandtoep_core::ScanReport| r.records.iter().map(|x| x.csv_fields().join(",")).collect::<Vec<_>>();
    assert_eq!(rows(&a), rows(&b));
}

#[test]
fn default_delta_sector_edges_leave_domain() {
    let p = flower_preset();
    let phi = 7.0 * PI / 6.0 - 1.5 * p.delta;
    assert!(p.in_sectors(phi, p.delta));
    assert!(!p.domain.contains(&p.symbol, Complex64::from_polar(0.05, phi)).unwrap());
}
