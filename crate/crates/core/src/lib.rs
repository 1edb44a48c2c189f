//! Banded Toeplitz operators with Laurent polynomial symbols: root divisors,
//! spectra, local regularity at boundary points, Wiener-Hopf factorization,
//! and two-sided resolvent-norm estimates.

pub mod error;
pub mod hardy;
pub mod optimize;
pub mod regularity;
pub mod resolvent;
pub mod roots;
pub mod scan;
pub mod section;
pub mod spectral;
pub mod symbol;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use regularity::{build_domain, classify, classify_with_tau, NonTangentialDomain, RegularityReport};
pub use resolvent::{
    apply_resolvent, estimate_norm, factorize, i_decomposition, krein_bound, EstimateOptions, ProbeVector, Resolvent,
    ResolventEstimate, WienerHopfFactors,
};
pub use roots::{continue_roots, perturbation_data, roots_at, solve_roots, PerturbationData, RootSet};
pub use scan::{flower_preset, grid_scan, ray_scan, FlowerPreset, ScanOptions, ScanRecord, ScanReport};
pub use section::{finite_section_estimate, SectionEstimate};
pub use spectral::{
    dist_to_spectrum, exceptional_set, in_resolvent_set, partition, spectrum_curve, Divisor, ExceptionalSet,
    RootLocation, SpectrumCurve, DEFAULT_TAU,
};
pub use symbol::{LaurentSymbol, PolyCoeffs};
