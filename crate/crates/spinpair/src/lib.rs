//! Two-qubit spin algebra and collider phenomenology for top-quark pairs.
//!
//! The crate is organized in layers. `fano` holds the basis-independent
//! two-qubit machinery: Fano coefficients, density matrices, concurrence,
//! the positive-partial-transpose test, CHSH maximization, and the scalar
//! entanglement markers built from a correlation matrix. `production`
//! evaluates the leading-order QCD spin density matrices for the two
//! partonic channels in the helicity basis, together with their critical
//! boundaries in phase space. `angular` performs the analytic and numeric
//! averages over the production angle, `pdf` parses parton-distribution
//! grids and convolves them into channel luminosities, and `hadronic`
//! combines both into mass-window-integrated physical states for a given
//! collider. `tomography` closes the loop: it samples dilepton events from
//! any two-qubit state and reconstructs the state from angular moments.

// Negated float comparisons are deliberate throughout: `!(x > 0.0)` also
// rejects NaN, which the suggested `x <= 0.0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod error;
pub mod fano;
pub mod hadronic;
pub mod pdf;
pub mod production;
pub mod quad;
pub mod tol;
pub mod tomography;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
