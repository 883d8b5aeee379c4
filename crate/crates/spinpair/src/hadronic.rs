//! Mass-window integration over the collider spectrum.
//!
//! Combines channel luminosities with the angle-averaged spin
//! coefficients into the physical state carried by a window of pair
//! masses, the spectrum-weighted high-mass observables, and the critical
//! boundaries of entanglement and CHSH violation versus collider energy.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};

use crate::angular::angular_avg;
use crate::error::Error;
use crate::fano::{axial_delta, chsh_value, delta_marker, FanoState};
use crate::pdf::{channel_weights, luminosity, mass_spectrum_integral, ColliderConfig};
use crate::production::{beta_of_mass, mass_of_beta, r_coeffs, Kinematics, PartonChannel};
use crate::quad::{bisect, gl64_mean, integrate};
use crate::tol::Tolerances;
use crate::Result;

/// Basis tag for beam-frame correlation matrices of physical states.
pub const BASIS_BEAM: &str = "beam";

/// Basis tag for angle-averaged helicity-frame matrices. Each event
/// contributes in its own axes, so these means do not form the
/// correlation matrix of any actual state.
pub const BASIS_HELICITY_AVG: &str = "helicity-averaged(fictitious)";

/// Pair-mass selection window in GeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassWindow {
    pub lo: f64,
    pub hi: f64,
}

impl MassWindow {
    /// Requires `0 < lo < hi`; collider bounds are checked at use.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0) {
            return Err(Error::Domain {
                name: "window.lo",
                value: lo,
            });
        }
        if !(hi > lo) {
            return Err(Error::EmptyWindow);
        }
        Ok(MassWindow { lo, hi })
    }

    /// The full accessible mass range of a collider.
    pub fn full(cfg: &ColliderConfig) -> Self {
        MassWindow {
            lo: 2.0 * cfg.m_top,
            hi: cfg.sqrt_s,
        }
    }

    fn validate(&self, cfg: &ColliderConfig) -> Result<()> {
        let threshold = 2.0 * cfg.m_top;
        if self.lo < threshold * (1.0 - 1e-12) {
            return Err(Error::BelowThreshold {
                m_tt: self.lo,
                threshold,
            });
        }
        if self.hi > cfg.sqrt_s * (1.0 + 1e-12) {
            return Err(Error::AboveEnergy {
                m_tt: self.hi,
                sqrt_s: cfg.sqrt_s,
            });
        }
        Ok(())
    }
}

/// Memoized channel luminosities: window scans and nested quadratures
/// revisit the same pair masses many times.
struct LumiCache<'a> {
    cfg: &'a ColliderConfig,
    map: RefCell<HashMap<u64, (f64, f64)>>,
}

impl<'a> LumiCache<'a> {
    fn new(cfg: &'a ColliderConfig) -> Self {
        LumiCache {
            cfg,
            map: RefCell::new(HashMap::new()),
        }
    }

    fn get(&self, m_tt: f64) -> Result<(f64, f64)> {
        if let Some(&hit) = self.map.borrow().get(&m_tt.to_bits()) {
            return Ok(hit);
        }
        let pair = (
            luminosity(self.cfg, PartonChannel::QqBar, m_tt)?,
            luminosity(self.cfg, PartonChannel::Gg, m_tt)?,
        );
        self.map.borrow_mut().insert(m_tt.to_bits(), pair);
        Ok(pair)
    }
}

/// One luminosity-weighted sum of angle-averaged channel coefficients.
#[derive(Clone, Copy)]
enum Component {
    Rate,
    RateGg,
    Perp,
    Z,
    Rr,
    Nn,
    Kk,
}

fn mixed_component(cache: &LumiCache, m_tt: f64, beta: f64, which: Component) -> Result<f64> {
    let (l_qq, l_gg) = cache.get(m_tt)?;
    let q = angular_avg(PartonChannel::QqBar, beta)?;
    let g = angular_avg(PartonChannel::Gg, beta)?;
    Ok(match which {
        Component::Rate => l_qq * q.a_tilde + l_gg * g.a_tilde,
        Component::RateGg => l_gg * g.a_tilde,
        Component::Perp => l_qq * q.c_perp + l_gg * g.c_perp,
        Component::Z => l_qq * q.c_z + l_gg * g.c_z,
        Component::Rr => l_qq * q.c_rr + l_gg * g.c_rr,
        Component::Nn => l_qq * q.c_nn + l_gg * g.c_nn,
        Component::Kk => l_qq * q.c_kk + l_gg * g.c_kk,
    })
}

/// Quadrature variable for the window integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassQuadrature {
    /// Integrate in the pair mass, with a refined threshold panel.
    DirectMass,
    /// Integrate in velocity; same measure, used as a cross-check.
    BetaSubstitution,
}

fn window_integral(
    cfg: &ColliderConfig,
    cache: &LumiCache,
    w: &MassWindow,
    method: MassQuadrature,
    which: Component,
) -> Result<f64> {
    match method {
        MassQuadrature::DirectMass => {
            mass_spectrum_integral(cfg, w.lo, w.hi, |m, b| mixed_component(cache, m, b, which))
        }
        MassQuadrature::BetaSubstitution => {
            let threshold = 2.0 * cfg.m_top;
            let b_lo = beta_of_mass(w.lo.max(threshold), cfg.m_top)?;
            let b_hi = beta_of_mass(w.hi.min(cfg.sqrt_s), cfg.m_top)?;
            if !(b_hi > b_lo) {
                return Err(Error::EmptyWindow);
            }
            let f = |b: f64| -> f64 {
                let m = mass_of_beta(b, cfg.m_top);
                let jac = 2.0 * cfg.m_top * b / (1.0 - b * b).powf(1.5);
                match mixed_component(cache, m, b, which) {
                    Ok(v) => b * v / (m * m) * jac,
                    Err(_) => f64::NAN,
                }
            };
            let total = integrate(f, b_lo, b_hi, 1e-6, 1e-30, 2000)?;
            if !total.is_finite() {
                return Err(Error::QuadratureFailure {
                    estimate: total,
                    error: f64::NAN,
                });
            }
            Ok(total)
        }
    }
}

/// Spin state and yield shares carried by one mass window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassIntegrated {
    pub window: MassWindow,
    /// Window yield with couplings and overall constants stripped.
    pub sigma: f64,
    pub w_qq: f64,
    pub w_gg: f64,
    /// Integrated beam-basis correlations, normalized ([`BASIS_BEAM`]).
    pub c_perp: f64,
    pub c_z: f64,
    /// Integrated helicity means, normalized ([`BASIS_HELICITY_AVG`]).
    pub c_rr: f64,
    pub c_nn: f64,
    pub c_kk: f64,
}

impl MassIntegrated {
    /// The physical two-qubit state of the window, beam basis.
    pub fn state(&self) -> FanoState {
        FanoState::unpolarized(1.0, self.beam_matrix())
    }

    pub fn beam_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.c_perp, self.c_perp, self.c_z))
    }

    /// Averaged helicity means in the (k, r, n) ordering; fictitious.
    pub fn helicity_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.c_kk, self.c_rr, self.c_nn))
    }

    /// Entanglement marker of the axial beam-basis state.
    pub fn delta_axial(&self) -> f64 {
        axial_delta(self.c_perp, self.c_z)
    }

    /// Marker evaluated on the fictitious helicity means.
    pub fn delta_helicity(&self) -> f64 {
        delta_marker(&self.helicity_matrix())
    }

    /// One-parameter CHSH figure of merit: positive iff the transverse
    /// correlation alone certifies a violation.
    pub fn mu_perp(&self) -> f64 {
        2.0 * self.c_perp * self.c_perp - 1.0
    }

    /// Diagonal mean of the beam-basis correlations.
    pub fn d_value(&self) -> f64 {
        (2.0 * self.c_perp + self.c_z) / 3.0
    }

    /// Entanglement witness: negative only for entangled states.
    pub fn witness(&self) -> f64 {
        self.d_value() + 1.0 / 3.0
    }

    /// Concurrence of the axial state.
    pub fn concurrence(&self) -> f64 {
        self.delta_axial().max(0.0)
    }
}

/// Integrate the channel-mixed angular states over a mass window into
/// the physical beam-basis state of the selected events.
pub fn mass_integrated_state(cfg: &ColliderConfig, w: &MassWindow) -> Result<MassIntegrated> {
    mass_integrated_state_with(cfg, w, MassQuadrature::DirectMass)
}

/// Same, choosing the quadrature variable explicitly.
pub fn mass_integrated_state_with(
    cfg: &ColliderConfig,
    w: &MassWindow,
    method: MassQuadrature,
) -> Result<MassIntegrated> {
    w.validate(cfg)?;
    let cache = LumiCache::new(cfg);
    integrated_with_cache(cfg, &cache, w, method)
}

fn integrated_with_cache(
    cfg: &ColliderConfig,
    cache: &LumiCache,
    w: &MassWindow,
    method: MassQuadrature,
) -> Result<MassIntegrated> {
    let part = |which: Component| window_integral(cfg, cache, w, method, which);
    let sigma = part(Component::Rate)?;
    if sigma <= 1e-30 {
        return Err(Error::EmptyWindow);
    }
    let gg = part(Component::RateGg)?;
    Ok(MassIntegrated {
        window: *w,
        sigma,
        w_qq: 1.0 - gg / sigma,
        w_gg: gg / sigma,
        c_perp: part(Component::Perp)? / sigma,
        c_z: part(Component::Z)? / sigma,
        c_rr: part(Component::Rr)? / sigma,
        c_nn: part(Component::Nn)? / sigma,
        c_kk: part(Component::Kk)? / sigma,
    })
}

/// Channel-mixed angle-averaged state at a single pair mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedAngular {
    pub m_tt: f64,
    pub beta: f64,
    /// Differential spectral weight, luminosity times averaged rate
    /// summed over channels; the mass spectrum is `beta/M^2` times this.
    pub rate: f64,
    pub w_qq: f64,
    pub w_gg: f64,
    /// Normalized beam-basis correlations ([`BASIS_BEAM`]).
    pub c_perp: f64,
    pub c_z: f64,
    /// Normalized helicity means ([`BASIS_HELICITY_AVG`]).
    pub c_rr: f64,
    pub c_nn: f64,
    pub c_kk: f64,
}

impl MixedAngular {
    /// The physical angle-averaged state at this mass, beam basis.
    pub fn state(&self) -> FanoState {
        FanoState::unpolarized(1.0, self.beam_matrix())
    }

    pub fn beam_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.c_perp, self.c_perp, self.c_z))
    }

    /// Averaged helicity means in the (k, r, n) ordering; fictitious.
    pub fn helicity_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.c_kk, self.c_rr, self.c_nn))
    }

    pub fn delta_axial(&self) -> f64 {
        axial_delta(self.c_perp, self.c_z)
    }

    pub fn delta_helicity(&self) -> f64 {
        delta_marker(&self.helicity_matrix())
    }

    pub fn mu_perp(&self) -> f64 {
        2.0 * self.c_perp * self.c_perp - 1.0
    }

    pub fn d_value(&self) -> f64 {
        (2.0 * self.c_perp + self.c_z) / 3.0
    }
}

/// Mix the two channels at one pair mass with luminosity weights.
pub fn mixed_angular(cfg: &ColliderConfig, m_tt: f64) -> Result<MixedAngular> {
    let beta = beta_of_mass(m_tt, cfg.m_top)?;
    let l_qq = luminosity(cfg, PartonChannel::QqBar, m_tt)?;
    let l_gg = luminosity(cfg, PartonChannel::Gg, m_tt)?;
    let q = angular_avg(PartonChannel::QqBar, beta)?;
    let g = angular_avg(PartonChannel::Gg, beta)?;
    let rate = l_qq * q.a_tilde + l_gg * g.a_tilde;
    if !(rate > 0.0) {
        return Err(Error::DegenerateNormalization { a: rate });
    }
    Ok(MixedAngular {
        m_tt,
        beta,
        rate,
        w_qq: l_qq * q.a_tilde / rate,
        w_gg: l_gg * g.a_tilde / rate,
        c_perp: (l_qq * q.c_perp + l_gg * g.c_perp) / rate,
        c_z: (l_qq * q.c_z + l_gg * g.c_z) / rate,
        c_rr: (l_qq * q.c_rr + l_gg * g.c_rr) / rate,
        c_nn: (l_qq * q.c_nn + l_gg * g.c_nn) / rate,
        c_kk: (l_qq * q.c_kk + l_gg * g.c_kk) / rate,
    })
}

/// Weighted angular means of the pointwise CHSH value and of the rate
/// for a two-luminosity mixture at fixed velocity. The pole-cancelling
/// substitution is applied whenever the gluon channel contributes.
fn pointwise_chsh_means(m_top: f64, beta: f64, l_qq: f64, l_gg: f64) -> (f64, f64) {
    let mean = |f: &dyn Fn(f64) -> f64| -> f64 {
        if beta < 1e-3 || l_gg == 0.0 {
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
    let eval = |cos: f64| -> (f64, f64) {
        let kin = Kinematics::from_beta(m_top, beta, cos).expect("velocity within range");
        let q = r_coeffs(PartonChannel::QqBar, &kin).expect("interior node");
        let g = r_coeffs(PartonChannel::Gg, &kin).expect("interior node");
        let weight = l_qq * q.a + l_gg * g.a;
        let c = (l_qq * q.c + l_gg * g.c) / weight;
        (weight, chsh_value(&c))
    };
    let num = mean(&|cos| {
        let (w, b) = eval(cos);
        w * b
    });
    let den = mean(&|cos| eval(cos).0);
    (num, den)
}

/// Event-weighted angular mean of the pointwise CHSH value of the
/// channel-mixed state at one pair mass.
pub fn mixed_chsh(cfg: &ColliderConfig, m_tt: f64) -> Result<f64> {
    let beta = beta_of_mass(m_tt, cfg.m_top)?;
    let l_qq = luminosity(cfg, PartonChannel::QqBar, m_tt)?;
    let l_gg = luminosity(cfg, PartonChannel::Gg, m_tt)?;
    let (num, den) = pointwise_chsh_means(cfg.m_top, beta, l_qq, l_gg);
    if !(den > 0.0) {
        return Err(Error::DegenerateNormalization { a: den });
    }
    Ok(num / den)
}

/// Spectrum-weighted means of the helicity marker and of the angular
/// CHSH value over all pair masses above a cut.
pub fn delta_high_pt(cfg: &ColliderConfig, m_cut: f64) -> Result<(f64, f64)> {
    let threshold = 2.0 * cfg.m_top;
    if !(m_cut >= threshold * (1.0 - 1e-12) && m_cut < cfg.sqrt_s) {
        return Err(Error::OutOfRange {
            name: "m_cut",
            value: m_cut,
            lo: threshold,
            hi: cfg.sqrt_s,
        });
    }
    let cache = LumiCache::new(cfg);
    let den = mass_spectrum_integral(cfg, m_cut, cfg.sqrt_s, |m, b| {
        mixed_component(&cache, m, b, Component::Rate)
    })?;
    if den <= 1e-30 {
        return Err(Error::EmptyWindow);
    }
    let num_delta = mass_spectrum_integral(cfg, m_cut, cfg.sqrt_s, |m, b| {
        let (l_qq, l_gg) = cache.get(m)?;
        let q = angular_avg(PartonChannel::QqBar, b)?;
        let g = angular_avg(PartonChannel::Gg, b)?;
        let rate = l_qq * q.a_tilde + l_gg * g.a_tilde;
        let kk = (l_qq * q.c_kk + l_gg * g.c_kk) / rate;
        let rr = (l_qq * q.c_rr + l_gg * g.c_rr) / rate;
        let nn = (l_qq * q.c_nn + l_gg * g.c_nn) / rate;
        Ok(rate * 0.5 * (-nn + (kk + rr).abs() - 1.0))
    })?;
    let num_chsh = mass_spectrum_integral(cfg, m_cut, cfg.sqrt_s, |m, b| {
        let (l_qq, l_gg) = cache.get(m)?;
        Ok(pointwise_chsh_means(cfg.m_top, b, l_qq, l_gg).0)
    })?;
    Ok((num_delta / den, num_chsh / den))
}

/// Which critical boundary to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    /// Entanglement boundary of the window state.
    PeresHorodecki,
    /// CHSH-violation boundary from the transverse correlation.
    Chsh,
}

/// Largest velocity whose threshold-side window `[2 m_top, M(beta)]`
/// still carries the signature: a positive axial marker for
/// [`CriticalKind::PeresHorodecki`], or `2 c_perp^2 > 1` for
/// [`CriticalKind::Chsh`]. Threshold-anchored windows only dilute the
/// signature as the edge rises, so the last sign change is the boundary.
pub fn critical_beta_vs_energy(
    cfg: &ColliderConfig,
    kind: CriticalKind,
    tol: &Tolerances,
) -> Result<f64> {
    let threshold = 2.0 * cfg.m_top;
    let (_, w_gg) = channel_weights(cfg, threshold)?;
    // collapsed-window limit: the constant-weight threshold mixture
    let at_threshold = match kind {
        CriticalKind::PeresHorodecki => 2.0 * w_gg - 1.0,
        CriticalKind::Chsh => 2.0 * w_gg * w_gg - 1.0,
    };
    if at_threshold <= 0.0 {
        return Err(Error::NoSignature);
    }
    let cache = LumiCache::new(cfg);
    let beta_max = beta_of_mass(cfg.sqrt_s, cfg.m_top)?;
    let marker = |beta: f64| -> f64 {
        let hi = mass_of_beta(beta, cfg.m_top);
        if hi - threshold < 1e-6 {
            return at_threshold;
        }
        let w = MassWindow { lo: threshold, hi };
        match integrated_with_cache(cfg, &cache, &w, MassQuadrature::DirectMass) {
            Ok(st) => match kind {
                CriticalKind::PeresHorodecki => st.delta_axial(),
                CriticalKind::Chsh => st.mu_perp(),
            },
            Err(_) => f64::NAN,
        }
    };
    let n = 64;
    let mut prev = (0.0f64, at_threshold);
    let mut bracket = None;
    for k in 1..=n {
        let b = beta_max * k as f64 / n as f64;
        let v = marker(b);
        if prev.1 > 0.0 && v <= 0.0 {
            bracket = Some((prev.0, b));
        }
        prev = (b, v);
    }
    match bracket {
        Some((a, b)) => bisect(marker, a, b, tol.root),
        None if prev.1 > 0.0 => Ok(beta_max),
        None => Err(Error::NoSignature),
    }
}

/// Constant-weight mixture of the two threshold states: a beam-aligned
/// classically correlated quark component and a gluon singlet.
pub fn threshold_mixture(w_gg: f64) -> Result<FanoState> {
    if !(0.0..=1.0).contains(&w_gg) {
        return Err(Error::OutOfRange {
            name: "w_gg",
            value: w_gg,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let c = Matrix3::from_diagonal(&Vector3::new(-w_gg, -w_gg, 1.0 - 2.0 * w_gg));
    Ok(FanoState::unpolarized(1.0, c))
}

/// Channel weights in the threshold limit of a collider.
pub fn threshold_weights(cfg: &ColliderConfig) -> Result<(f64, f64)> {
    channel_weights(cfg, 2.0 * cfg.m_top)
}
