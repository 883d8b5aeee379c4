//! Angular averages of the production spin coefficients at fixed velocity.
//!
//! Two bases coexist after averaging over the production angle. The beam
//! basis keeps fixed lab axes; azimuthal symmetry makes the averaged
//! correlation matrix axial, `diag(c_perp, c_perp, c_z)` with z along the
//! beam, and this is the matrix of a genuine mixed state. The averaged
//! helicity-basis entries `(c_kk, c_rr, c_nn)` instead describe a
//! fictitious state: each phase-space point contributes in its own
//! event-dependent frame. Both are kept unnormalized alongside the
//! averaged weight `a_tilde`; normalized accessors divide it out.

use crate::error::Error;
use crate::fano::{axial_delta, chsh_value, delta_marker};
use crate::production::{mass_of_beta, Kinematics, PartonChannel, K, N, R};
use crate::quad::{bisect, gl64_mean, sign_change_brackets};
use crate::tol::Tolerances;
use crate::Result;
use nalgebra::{Matrix3, Vector3};

/// Angle-averaged spin coefficients of one channel at fixed velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularAveraged {
    pub channel: PartonChannel,
    pub beta: f64,
    /// Averaged cross-section weight.
    pub a_tilde: f64,
    /// Beam-basis transverse correlation (xx = yy), unnormalized.
    pub c_perp: f64,
    /// Beam-basis longitudinal correlation (zz), unnormalized.
    pub c_z: f64,
    /// Averaged helicity-basis diagonal, unnormalized (fictitious state).
    pub c_rr: f64,
    pub c_nn: f64,
    pub c_kk: f64,
}

impl AngularAveraged {
    pub fn perp(&self) -> f64 {
        self.c_perp / self.a_tilde
    }

    pub fn z(&self) -> f64 {
        self.c_z / self.a_tilde
    }

    pub fn rr(&self) -> f64 {
        self.c_rr / self.a_tilde
    }

    pub fn nn(&self) -> f64 {
        self.c_nn / self.a_tilde
    }

    pub fn kk(&self) -> f64 {
        self.c_kk / self.a_tilde
    }

    /// Normalized beam-basis correlation matrix `diag(perp, perp, z)`.
    pub fn beam_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.perp(), self.perp(), self.z()))
    }

    /// Normalized fictitious helicity-averaged matrix
    /// `diag(kk, rr, nn)` in the (k, r, n) ordering.
    pub fn helicity_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.kk(), self.rr(), self.nn()))
    }

    /// Axial entanglement marker of the beam-basis state.
    pub fn delta_axial(&self) -> f64 {
        axial_delta(self.perp(), self.z())
    }

    /// Entanglement marker of the fictitious helicity-averaged state.
    pub fn delta_helicity(&self) -> f64 {
        delta_marker(&self.helicity_matrix())
    }

    /// CHSH figure of merit of the beam-basis state: positive iff the
    /// averaged state itself violates the inequality.
    pub fn mu_axial(&self) -> f64 {
        let sq = [self.perp() * self.perp(), self.perp() * self.perp(), self.z() * self.z()];
        let min = sq.iter().cloned().fold(f64::INFINITY, f64::min);
        sq.iter().sum::<f64>() - min - 1.0
    }

    /// CHSH value of the beam-basis state.
    pub fn chsh_axial(&self) -> f64 {
        2.0 * (self.mu_axial() + 1.0).max(0.0).sqrt()
    }
}

/// `(1 - sqrt(1 - beta^2))^2 / 2` without cancellation.
fn f_half(beta: f64) -> f64 {
    let b2 = beta * beta;
    let t = b2 / (1.0 + (1.0 - b2).max(0.0).sqrt());
    0.5 * t * t
}

/// `atanh(beta) / beta`, finite at zero.
fn h_of(beta: f64) -> f64 {
    if beta < 1e-8 {
        1.0 + beta * beta / 3.0
    } else {
        beta.atanh() / beta
    }
}

/// `(atanh(beta)/beta - 1) / beta^2`, series below the cancellation zone.
fn h_minus_one_over_b2(beta: f64) -> f64 {
    let b2 = beta * beta;
    if beta < 1e-2 {
        1.0 / 3.0 + b2 / 5.0 + b2 * b2 / 7.0 + b2 * b2 * b2 / 9.0
    } else {
        (h_of(beta) - 1.0) / b2
    }
}

/// Gluon transverse remainder; its bracket cancels to sixth order, so a
/// series takes over at small velocity.
fn g_term(beta: f64) -> f64 {
    let b2 = beta * beta;
    if beta < 1e-2 {
        let b6 = b2 * b2 * b2;
        b6 / 1440.0 + 67.0 * b6 * b2 / 60480.0
    } else {
        let b4 = b2 * b2;
        let h = h_of(beta);
        let bracket = 49.0 - 149.0 / 3.0 * b2 + 24.0 / 5.0 * b4
            - (49.0 - 66.0 * b2 + 17.0 * b4) * h;
        f_half(beta) / (96.0 * b4) * bracket
    }
}

/// Closed-form angular averages at fixed velocity, `0 <= beta < 1`.
pub fn angular_avg(ch: PartonChannel, beta: f64) -> Result<AngularAveraged> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let b2 = beta * beta;
    match ch {
        PartonChannel::QqBar => {
            let f = f_half(beta);
            Ok(AngularAveraged {
                channel: ch,
                beta,
                a_tilde: (1.0 - b2 / 3.0) / 9.0,
                c_perp: 2.0 / 135.0 * f,
                c_z: (1.0 - b2 / 3.0 - 4.0 / 15.0 * f) / 9.0,
                c_rr: (2.0 - b2) / 27.0,
                c_nn: -b2 / 27.0,
                c_kk: (1.0 + b2) / 27.0,
            })
        }
        PartonChannel::Gg => {
            let b4 = b2 * b2;
            let h = h_of(beta);
            let hm = h_minus_one_over_b2(beta);
            let g = g_term(beta);
            Ok(AngularAveraged {
                channel: ch,
                beta,
                a_tilde: (-59.0 + 31.0 * b2 + (66.0 - 36.0 * b2 + 2.0 * b4) * h) / 192.0,
                c_perp: (1.0 - b2) / 192.0 * (9.0 - 16.0 * h) + g,
                c_z: (-109.0 + 49.0 * b2 + (102.0 - 72.0 * b2 + 2.0 * b4) * h) / 192.0
                    - 2.0 * g,
                c_rr: -(87.0 - 31.0 * b2 + 66.0 * hm - (102.0 - 38.0 * b2 + 2.0 * b4) * h)
                    / 192.0,
                c_nn: -(41.0 - 31.0 * b2 - (34.0 - 36.0 * b2 + 2.0 * b4) * h) / 192.0,
                c_kk: -(-37.0 + 31.0 * b2 - 66.0 * hm + (66.0 - 34.0 * b2 + 2.0 * b4) * h)
                    / 192.0,
            })
        }
    }
}

/// Angular averages by 64-node Gauss-Legendre quadrature over the
/// production angle. Oracle for [`angular_avg`].
///
/// The gluon weight carries a double pole at `cos = +-1/beta`, just past
/// the endpoints at high velocity, which plain nodes cannot resolve. The
/// substitution `cos = tanh(a v)/beta` with `a = atanh(beta)` maps the
/// integrand to an entire function of `v` (the sech^2 Jacobian cancels
/// the pole), so the same 64 nodes reach machine precision at any
/// velocity.
pub fn angular_avg_numeric(ch: PartonChannel, beta: f64) -> Result<AngularAveraged> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mean = |f: &dyn Fn(f64) -> f64| -> f64 {
        if beta < 1e-3 {
            gl64_mean(f)
        } else {
            let a = beta.atanh();
            gl64_mean(|v: f64| {
                let t = (a * v).tanh();
                let cos = t / beta;
                let jac = a / beta * (1.0 - t * t);
                f(cos) * jac
            })
        }
    };
    let coeff = |cos: f64| {
        let kin = Kinematics::from_beta(crate::tol::M_TOP_DEFAULT, beta, cos)
            .expect("beta in range");
        crate::production::r_coeffs(ch, &kin).expect("interior nodes avoid the singularity")
    };
    let a_tilde = mean(&|c| coeff(c).a);
    let c_rr = mean(&|c| coeff(c).c[(R, R)]);
    let c_nn = mean(&|c| coeff(c).c[(N, N)]);
    let c_kk = mean(&|c| coeff(c).c[(K, K)]);
    // beam components via the event-frame axes: k_z = cos, r_z = sin
    let c_z = mean(&|cos| {
        let f = coeff(cos);
        let sin2 = 1.0 - cos * cos;
        f.c[(K, K)] * cos * cos + f.c[(R, R)] * sin2
            + 2.0 * f.c[(R, K)] * cos * sin2.max(0.0).sqrt()
    });
    let c_perp = mean(&|cos| {
        let f = coeff(cos);
        let sin2 = 1.0 - cos * cos;
        let xx = f.c[(K, K)] * sin2 + f.c[(R, R)] * cos * cos
            - 2.0 * f.c[(R, K)] * cos * sin2.max(0.0).sqrt();
        0.5 * (xx + f.c[(N, N)])
    });
    Ok(AngularAveraged {
        channel: ch,
        beta,
        a_tilde,
        c_perp,
        c_z,
        c_rr,
        c_nn,
        c_kk,
    })
}

/// `K_{n,m}(x) = integral of z^{2n} / (1-z^2)^m over [-x, x]`, by exact
/// recursion. Requires `0 <= x < 1`.
pub fn knm(n: usize, m: usize, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain { name: "x", value: x });
    }
    // bases K_{0,j}: downward in the power via integration by parts
    let mut col0 = vec![0.0f64; m + 1];
    col0[0] = 2.0 * x;
    if m >= 1 {
        col0[1] = 2.0 * x.atanh();
    }
    for j in 2..=m {
        let jm = j as f64 - 1.0;
        col0[j] = x / (jm * (1.0 - x * x).powi(j as i32 - 1))
            + (2.0 * jm - 1.0) / (2.0 * jm) * col0[j - 1];
    }
    // raise the power: K_{i,j} = K_{i-1,j} - K_{i-1,j-1}
    let mut prev = col0;
    for i in 1..=n {
        let mut cur = vec![0.0f64; m + 1];
        let ii = 2 * i as i32 + 1;
        cur[0] = 2.0 * x.powi(ii) / ii as f64;
        for j in 1..=m {
            cur[j] = prev[j] - prev[j - 1];
        }
        prev = cur;
    }
    Ok(prev[m])
}

/// Event-weighted angular mean of the pointwise CHSH value at fixed
/// velocity: each production angle contributes its own optimal CHSH
/// figure, weighted by the differential rate `a_tilde`. This is the
/// average of the optimum over phase space, not the CHSH value of the
/// averaged state; the latter is [`AngularAveraged::chsh_axial`].
///
/// For the quark channel the mean reduces to
/// `(1/2) int sin T sqrt((2-b^2 sin^2 T)^2 + b^4 sin^4 T) dT / (1 - b^2/3)`.
pub fn chsh_angular_avg(ch: PartonChannel, beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    // same pole-cancelling substitution as the averaged coefficients;
    // the common Jacobian drops out of the weighted ratio. Only the
    // gluon weight has the pole; the quark integrand is entire and the
    // substitution would just starve it of nodes at high velocity.
    let mean = |f: &dyn Fn(f64) -> f64| -> f64 {
        if beta < 1e-3 || ch == PartonChannel::QqBar {
            gl64_mean(f)
        } else {
            let a = beta.atanh();
            gl64_mean(|v: f64| {
                let t = (a * v).tanh();
                let jac = a / beta * (1.0 - t * t);
                f(t / beta) * jac
            })
        }
    };
    let at = |cos: f64| {
        let kin = Kinematics::from_beta(crate::tol::M_TOP_DEFAULT, beta, cos)
            .expect("beta in range");
        crate::production::r_coeffs(ch, &kin).expect("interior nodes avoid the singularity")
    };
    let num = mean(&|cos| {
        let f = at(cos);
        f.a * chsh_value(&(f.c / f.a))
    });
    let den = mean(&|cos| at(cos).a);
    Ok(num / den)
}

/// Where the angle-averaged gluon state stops being entangled and where
/// it stops violating CHSH, as velocities and pair masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialCriticals {
    pub beta_ph: f64,
    pub mass_ph: f64,
    pub beta_ch: f64,
    pub mass_ch: f64,
}

/// Lowest roots of the axial marker and of the CHSH figure of merit for
/// the angle-averaged gluon state, with the corresponding pair masses.
pub fn axial_criticals_gg(m_top: f64, tol: &Tolerances) -> Result<AxialCriticals> {
    let beta_ph = lowest_root(|b| angular_avg(PartonChannel::Gg, b).unwrap().delta_axial(), tol)?;
    let beta_ch = lowest_root(|b| angular_avg(PartonChannel::Gg, b).unwrap().mu_axial(), tol)?;
    Ok(AxialCriticals {
        beta_ph,
        mass_ph: mass_of_beta(beta_ph, m_top),
        beta_ch,
        mass_ch: mass_of_beta(beta_ch, m_top),
    })
}

/// Velocity where the averaged gluon state's transverse correlation
/// changes sign, switching the character of the residual correlations.
pub fn perp_sign_change_gg(tol: &Tolerances) -> Result<f64> {
    lowest_root(|b| angular_avg(PartonChannel::Gg, b).unwrap().c_perp, tol)
}

fn lowest_root<F: Fn(f64) -> f64>(f: F, tol: &Tolerances) -> Result<f64> {
    let brackets = sign_change_brackets(&f, 1e-6, 1.0 - 1e-9, 2048);
    let (a, b) = brackets.first().ok_or(Error::NoRootInBracket)?;
    bisect(&f, *a, *b, tol.root)
}
