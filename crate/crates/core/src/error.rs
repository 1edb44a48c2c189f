use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The symbol has a pole at the origin.
    #[error("symbol evaluated at z = 0 (pole of order m)")]
    Pole,

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("t0 is not a root: |P(t0)| = {residual:e} exceeds {tolerance:e}")]
    NotARoot { residual: f64, tolerance: f64 },

    /// Root iteration failed; best residuals are attached.
    #[error("root solver did not converge (max residual {:e})", max_of(.residuals))]
    SolverDiverged { roots: Vec<Complex64>, residuals: Vec<f64> },

    #[error("ambiguous root continuation: {0}; reduce the step")]
    AmbiguousContinuation(String),

    #[error("w0 in or near exceptional set K: |b'(z)| = {derivative:e} at z = {root}")]
    NearExceptional { root: Complex64, derivative: f64 },

    #[error("w in spectrum: {0}")]
    NotInResolventSet(String),

    #[error("w0 not on b(T): no unimodular roots")]
    NotOnCurve,

    #[error("interior roots not simple (separation {separation:e})")]
    MultipleInteriorRoots { separation: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    /// True for mathematical infeasibility (point in the spectrum, in K, off the
    /// curve) as opposed to malformed input or numerical failure.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::Pole
                | Error::NearExceptional { .. }
                | Error::NotInResolventSet(_)
                | Error::NotOnCurve
                | Error::MultipleInteriorRoots { .. }
                | Error::NotARoot { .. }
                | Error::InsufficientData(_)
        )
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}
