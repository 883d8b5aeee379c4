//! Leading-order QCD spin density matrices for top-pair production.
//!
//! Both partonic channels are evaluated in the helicity basis with the
//! correlation-matrix indices fixed as the ordered triple (k, r, n):
//! k along the top flight direction, r in the production plane toward the
//! beam, n out of plane completing the triad as n = r x k. At this order
//! the pair is unpolarized and only the (k,r) block plus the nn entry of
//! the correlation matrix are populated.

use crate::error::Error;
use crate::fano::{concurrence_unpolarized, delta_marker, FanoState};
use crate::quad::{bisect, sign_change_brackets};
use crate::tol::Tolerances;
use crate::Result;
use nalgebra::{Matrix3, Vector3};

/// The two partonic initial states that produce a top pair at this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartonChannel {
    QqBar,
    Gg,
}

impl PartonChannel {
    pub const ALL: [PartonChannel; 2] = [PartonChannel::QqBar, PartonChannel::Gg];

    pub fn label(self) -> &'static str {
        match self {
            PartonChannel::QqBar => "qqbar",
            PartonChannel::Gg => "gg",
        }
    }
}

/// Production kinematics of the pair, kept mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub m_top: f64,
    pub m_tt: f64,
    pub beta: f64,
    pub cos_theta: f64,
}

impl Kinematics {
    /// From the invariant mass; errs below the pair threshold.
    pub fn from_mass(m_top: f64, m_tt: f64, cos_theta: f64) -> Result<Self> {
        let beta = beta_of_mass(m_tt, m_top)?;
        Ok(Kinematics {
            m_top,
            m_tt,
            beta,
            cos_theta,
        })
    }

    /// From the velocity. `beta = 1` denotes the massless limit and maps
    /// to an infinite invariant mass.
    pub fn from_beta(m_top: f64, beta: f64, cos_theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Kinematics {
            m_top,
            m_tt: mass_of_beta(beta, m_top),
            beta,
            cos_theta,
        })
    }

    pub fn sin_theta(&self) -> f64 {
        (1.0 - self.cos_theta * self.cos_theta).max(0.0).sqrt()
    }
}

/// Velocity from the invariant mass: `sqrt(1 - 4 m_top^2 / m_tt^2)`.
pub fn beta_of_mass(m_tt: f64, m_top: f64) -> Result<f64> {
    let threshold = 2.0 * m_top;
    if m_tt < threshold {
        return Err(Error::BelowThreshold { m_tt, threshold });
    }
    Ok((1.0 - (threshold / m_tt).powi(2)).max(0.0).sqrt())
}

/// Invariant mass from the velocity: `2 m_top / sqrt(1 - beta^2)`.
pub fn mass_of_beta(beta: f64, m_top: f64) -> f64 {
    2.0 * m_top / (1.0 - beta * beta).sqrt()
}

/// Orthonormal helicity triad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityFrame {
    pub k_hat: Vector3<f64>,
    pub r_hat: Vector3<f64>,
    pub n_hat: Vector3<f64>,
}

/// Build the helicity triad from the top flight direction `k_hat` and the
/// beam direction `p_hat`: r points along the transverse part of the
/// beam, n = r x k. Degenerate for collinear production.
pub fn helicity_frame(k_hat: Vector3<f64>, p_hat: Vector3<f64>) -> Result<HelicityFrame> {
    let k = k_hat.normalize();
    let p = p_hat.normalize();
    let cos_theta = k.dot(&p);
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    if sin_theta < 1e-6 {
        return Err(Error::CollinearDegeneracy { sin_theta });
    }
    let r = (p - k * cos_theta) / sin_theta;
    let n = r.cross(&k);
    Ok(HelicityFrame {
        k_hat: k,
        r_hat: r,
        n_hat: n,
    })
}

/// Indices of the helicity components inside the 3x3 correlation matrix.
pub const K: usize = 0;
pub const R: usize = 1;
pub const N: usize = 2;

/// Unnormalized production spin coefficients in the helicity basis.
///
/// Returns a [`FanoState`] whose `a` is the trace coefficient: the
/// differential cross-section weight for the channel. Polarizations
/// vanish, as do the nr and nk correlations.
pub fn r_coeffs(ch: PartonChannel, kin: &Kinematics) -> Result<FanoState> {
    let beta = kin.beta;
    let b2 = beta * beta;
    let cos = kin.cos_theta;
    let sin = kin.sin_theta();
    let s2 = sin * sin;
    let sin2t = 2.0 * sin * cos;
    let mut c = Matrix3::zeros();
    let a;
    match ch {
        PartonChannel::QqBar => {
            let fq = 1.0 / 18.0;
            a = fq * (2.0 - b2 * s2);
            c[(R, R)] = fq * (2.0 - b2) * s2;
            c[(N, N)] = -fq * b2 * s2;
            c[(K, K)] = fq * (2.0 - (2.0 - b2) * s2);
            let rk = fq * (1.0 - b2).max(0.0).sqrt() * sin2t;
            c[(R, K)] = rk;
            c[(K, R)] = rk;
        }
        PartonChannel::Gg => {
            let bc2 = b2 * cos * cos;
            if bc2 > 1.0 - 1e-9 {
                return Err(Error::KinematicSingularity { value: bc2 });
            }
            let fg = (7.0 + 9.0 * bc2) / (192.0 * (1.0 - bc2) * (1.0 - bc2));
            let quart = 1.0 + s2 * s2;
            let b4 = b2 * b2;
            a = fg * (1.0 + 2.0 * b2 * s2 - b4 * quart);
            c[(R, R)] = -fg * (1.0 - b2 * (2.0 - b2) * quart);
            c[(N, N)] = -fg * (1.0 - 2.0 * b2 + b4 * quart);
            c[(K, K)] = -fg * (1.0 - 0.5 * b2 * sin2t * sin2t - b4 * quart);
            let rk = fg * (1.0 - b2).max(0.0).sqrt() * b2 * sin2t * s2;
            c[(R, K)] = rk;
            c[(K, R)] = rk;
        }
    }
    Ok(FanoState::unpolarized(a, c))
}

/// Normalized spin state of the pair for one channel at one phase-space
/// point: `C = C~ / A~`, polarizations zero.
pub fn pair_state(ch: PartonChannel, kin: &Kinematics) -> Result<FanoState> {
    r_coeffs(ch, kin)?.normalized()
}

/// Eigenvalues of the normalized correlation matrix, reported as
/// `(c_plus, c_nn, c_minus)`: the (k,r)-block pair and the out-of-plane
/// entry.
pub fn diag_eigs(ch: PartonChannel, kin: &Kinematics) -> Result<(f64, f64, f64)> {
    let f = pair_state(ch, kin)?;
    let (ckk, crr, crk) = (f.c[(K, K)], f.c[(R, R)], f.c[(R, K)]);
    let avg = 0.5 * (ckk + crr);
    let disc = (0.25 * (ckk - crr) * (ckk - crr) + crk * crk).sqrt();
    Ok((avg + disc, f.c[(N, N)], avg - disc))
}

/// Both roots of the entanglement marker for the gluon channel at fixed
/// production angle, in closed form. Between them the state is separable.
pub fn critical_beta_ph_gg(theta: f64) -> (f64, f64) {
    let s = theta.sin();
    let s2 = s * s;
    let quart = 1.0 + s2 * s2;
    let c1 = ((1.0 + s2 - std::f64::consts::SQRT_2 * s) / quart).max(0.0).sqrt();
    let c2 = quart.powf(-0.25);
    (c1, c2)
}

/// CHSH figure of merit: `tr(C^T C)` minus the smallest squared
/// eigenvalue minus one; positive iff the inequality is violated.
pub fn chsh_mu(ch: PartonChannel, kin: &Kinematics) -> Result<f64> {
    let (cp, cnn, cm) = diag_eigs(ch, kin)?;
    let sq = [cp * cp, cnn * cnn, cm * cm];
    let min = sq.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(sq.iter().sum::<f64>() - min - 1.0)
}

/// Velocity boundaries of the CHSH-violating region at fixed angle.
///
/// For the quark channel the violation covers all `beta > 0` (at nonzero
/// angle), so the degenerate boundary `(0, 1)` is returned. For gluons
/// the two roots of the figure of merit are bracketed by a 2048-point
/// scan and polished by bisection.
pub fn critical_beta_ch(ch: PartonChannel, theta: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let sin = theta.sin();
    match ch {
        PartonChannel::QqBar => {
            if sin.abs() < 1e-12 {
                return Err(Error::NoRootInBracket);
            }
            Ok((0.0, 1.0))
        }
        PartonChannel::Gg => {
            let mu = |beta: f64| {
                let kin = Kinematics::from_beta(M_TOP_REF, beta, theta.cos())
                    .expect("beta in range");
                chsh_mu(PartonChannel::Gg, &kin).unwrap_or(f64::NAN)
            };
            let lo = 1e-9;
            let hi = 1.0 - 1e-9;
            let brackets = sign_change_brackets(mu, lo, hi, 2048);
            match brackets.len() {
                0 => {
                    if mu(0.5 * (lo + hi)) > 0.0 {
                        Ok((0.0, 1.0))
                    } else {
                        Err(Error::NoRootInBracket)
                    }
                }
                _ => {
                    let first = brackets.first().unwrap();
                    let last = brackets.last().unwrap();
                    let r1 = bisect(mu, first.0, first.1, tol.root)?;
                    let r2 = if brackets.len() == 1 {
                        r1
                    } else {
                        bisect(mu, last.0, last.1, tol.root)?
                    };
                    Ok((r1, r2))
                }
            }
        }
    }
}

// The marker and CHSH boundaries depend on kinematics only through beta,
// so any reference mass works for root finding in beta.
const M_TOP_REF: f64 = crate::tol::M_TOP_DEFAULT;

/// Differential cross-section weight `alpha_s^2 beta A~ / m_tt^2`
/// per unit solid angle.
pub fn diff_xsec(ch: PartonChannel, kin: &Kinematics, alpha_s: f64) -> Result<f64> {
    if !(alpha_s > 0.0) {
        return Err(Error::Domain {
            name: "alpha_s",
            value: alpha_s,
        });
    }
    let f = r_coeffs(ch, kin)?;
    if !kin.m_tt.is_finite() {
        return Ok(0.0);
    }
    Ok(alpha_s * alpha_s * kin.beta * f.a / (kin.m_tt * kin.m_tt))
}

/// Entanglement marker of the channel state at one phase-space point.
pub fn delta_of(ch: PartonChannel, kin: &Kinematics) -> Result<f64> {
    Ok(delta_marker(&pair_state(ch, kin)?.c))
}

/// Concurrence of the channel state.
///
/// Production states are unpolarized with symmetric correlations, so the
/// exact rotation-to-Bell-diagonal route applies and no eigensolver
/// noise floor enters.
pub fn concurrence_of(ch: PartonChannel, kin: &Kinematics) -> Result<f64> {
    concurrence_unpolarized(&pair_state(ch, kin)?.c)
}
