//! Benchmark fixtures shared by the criterion targets.

use bandtoep_core::{Complex64, LaurentSymbol};

/// A fixed generic symbol with `m = 3`, `k = 4`.
pub fn generic_symbol() -> LaurentSymbol {
    let coeffs = [(0.3, -0.2), (1.0, 0.4), (-0.5, 0.1), (0.2, 0.0), (0.7, -0.6), (0.1, 0.3), (-0.4, 0.2), (0.9, 0.1)]
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    LaurentSymbol::new(3, 4, coeffs).expect("nonzero extreme coefficients")
}

/// Points of the flower's resolvent set approaching the origin along the bisector of a sector.
pub fn flower_ray_points() -> Vec<Complex64> {
    [1e-1, 1e-2, 1e-3].iter().map(|r| Complex64::from_polar(*r, std::f64::consts::PI / 3.0)).collect()
}
