//! Centralized numerical tolerances and physical constants.
//!
//! Every threshold used by the library is defined here once, with the
//! default values that the rest of the crate assumes. Callers that need
//! different trade-offs construct their own [`Tolerances`].

/// Default top-quark mass in GeV.
pub const M_TOP_DEFAULT: f64 = 173.0;

/// Default strong coupling constant (fixed; not run with scale).
pub const ALPHA_S_DEFAULT: f64 = 0.118;

/// Numerical tolerances shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Density-matrix eigenvalues above `-physicality` are treated as
    /// non-negative: values in `[-physicality, 0)` clamp to zero, anything
    /// below is a physicality violation.
    pub physicality: f64,
    /// Exact-algebra comparisons (hermiticity, trace, round trips).
    pub algebra: f64,
    /// Relative tolerance for adaptive quadrature.
    pub quad_rel: f64,
    /// Absolute floor below which an integral counts as zero.
    pub quad_abs: f64,
    /// Maximum number of adaptive subdivisions before giving up.
    pub quad_max_subdiv: usize,
    /// Bisection tolerance for critical-boundary roots.
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            physicality: 1e-10,
            algebra: 1e-12,
            quad_rel: 1e-6,
            quad_abs: 1e-30,
            quad_max_subdiv: 2000,
            root: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults with a different physicality threshold.
    pub fn with_physicality(mut self, eps: f64) -> Self {
        self.physicality = eps;
        self
    }
}
