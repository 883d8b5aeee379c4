//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invariant mass {m_tt} GeV is below the pair threshold {threshold} GeV")]
    BelowThreshold { m_tt: f64, threshold: f64 },

    #[error("invariant mass {m_tt} GeV exceeds the collider energy {sqrt_s} GeV")]
    AboveEnergy { m_tt: f64, sqrt_s: f64 },

    #[error("density matrix has eigenvalue {eigenvalue} below -{tolerance}")]
    NonPhysicalState { eigenvalue: f64, tolerance: f64 },

    #[error("correlation diagonal violates physicality: {excess} above bound")]
    PhysicalityViolation { excess: f64 },

    #[error("cannot normalize: trace coefficient {a} is not positive")]
    DegenerateNormalization { a: f64 },

    #[error("flight direction is collinear with the beam (sin theta = {sin_theta})")]
    CollinearDegeneracy { sin_theta: f64 },

    #[error("kinematic singularity: beta^2 cos^2(theta) = {value} too close to 1")]
    KinematicSingularity { value: f64 },

    #[error("no sign change bracketed for the requested root")]
    NoRootInBracket,

    #[error("no critical signature exists for this configuration")]
    NoSignature,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported grid format: {0}")]
    UnsupportedFormat(String),

    #[error("flavor {0} is not tabulated in the grid")]
    FlavorUnavailable(i32),

    #[error("{name} = {value} outside supported range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("quadrature failed to reach tolerance (estimate {estimate}, error {error})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("mass window carries no cross-section")]
    EmptyWindow,

    #[error("decay density is negative ({0}); input state is not physical")]
    NegativeDensity(f64),

    #[error("sample of {n} events is below the minimum {min}")]
    InsufficientSample { n: usize, min: usize },

    #[error("{name} = {value} outside domain")]
    Domain { name: &'static str, value: f64 },
}
