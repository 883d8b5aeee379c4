//! End-to-end acceptance gate. Each numbered check prints exactly one
//! PASS/FAIL line with the measured values and its wall time; the test
//! fails at the end if any line failed. Checks cover the guarantees the
//! crate ships: critical kinematic points, closed-form identities,
//! mixture transitions, luminosity landmarks on the bundled grid,
//! high-pT signatures, Monte Carlo closure, and cross-validation of the
//! entanglement and CHSH machinery against independent oracles.
//!
//! Run alone with output:
//! `cargo test -p spinpair --test acceptance -- --nocapture`

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use spinpair::angular::{angular_avg, angular_avg_numeric, axial_criticals_gg, knm};
use spinpair::fano::{
    assemble_density, chsh_brute_force, chsh_value, concurrence, concurrence_unpolarized,
    delta_marker, extract_fano, peres_horodecki, random_mixed_state, FanoState,
};
use spinpair::hadronic::{
    delta_high_pt, mass_integrated_state, threshold_mixture, threshold_weights, MassWindow,
};
use spinpair::pdf::{
    gluon_fraction, luminosity, parse_lhagrid, Beam, ColliderConfig, Interp, Pdf, QScaleRule,
    ToyPdf,
};
use spinpair::production::{
    beta_of_mass, chsh_mu, critical_beta_ch, critical_beta_ph_gg, diag_eigs, mass_of_beta,
    pair_state, r_coeffs, Kinematics, PartonChannel,
};
use spinpair::quad::{bisect, gauss_legendre, integrate_tight};
use spinpair::tol::Tolerances;
use spinpair::tomography::{dilepton_density, estimate_state, sample_events, DecayConfig};

const M_TOP: f64 = 173.0;
const ALPHA_S: f64 = 0.118;
/// Wall-time budget per check; the Monte Carlo closure gets a larger one.
const BUDGET: Duration = Duration::from_secs(120);
const BUDGET_CLOSURE: Duration = Duration::from_secs(600);

struct Gate {
    failures: Vec<&'static str>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn report(&mut self, name: &'static str, started: Instant, budget: Duration, pass: bool, detail: String) {
        let elapsed = started.elapsed();
        let in_time = elapsed <= budget;
        let ok = pass && in_time;
        println!(
            "{} {name}: {detail} [{:.1}s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { " OVER BUDGET" },
        );
        if !ok {
            self.failures.push(name);
        }
    }
}

fn kin(beta: f64, cos_theta: f64) -> Kinematics {
    Kinematics::from_beta(M_TOP, beta, cos_theta).unwrap()
}

/// Largest `x` in `[lo, hi]` with `pred` false, assuming a single
/// false-to-true transition.
fn transition<F: Fn(f64) -> bool>(pred: F, mut lo: f64, mut hi: f64) -> f64 {
    assert!(!pred(lo) && pred(hi));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn synthetic_grid() -> Arc<dyn Pdf> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/synthetic-proton.dat");
    let text = std::fs::read_to_string(path).expect("bundled grid file");
    Arc::new(
        parse_lhagrid(&text)
            .expect("bundled grid parses")
            .with_interpolation(Interp::Bicubic)
            .with_name("synthetic-proton"),
    )
}

fn collider(beam: Beam, sqrt_s: f64, pdf: Arc<dyn Pdf>) -> ColliderConfig {
    ColliderConfig::new(beam, sqrt_s, M_TOP, ALPHA_S, QScaleRule::Mtt, pdf).unwrap()
}

/// Quark-only density with flat `x f = 1`: collapses the hadronic
/// pipeline onto the pure quark channel.
struct FlatQuark;

impl Pdf for FlatQuark {
    fn xfx(&self, flavor: i32, _x: f64, _q: f64) -> spinpair::Result<f64> {
        Ok(if flavor == spinpair::pdf::GLUON_ID { 0.0 } else { 1.0 })
    }

    fn x_min(&self) -> f64 {
        0.0
    }

    fn name(&self) -> &str {
        "flat-quark"
    }
}

/// Moments of the dilepton decay density by direct product-sphere
/// quadrature: returns (normalization, E[cos phi], E[l+_i l-_j]).
/// The integrand is a polynomial of degree <= 2 per sphere, so 16-node
/// Gauss-Legendre in each cosine and 16 uniform azimuthal points are
/// exact to rounding.
fn sphere_moments(state: &FanoState, cfg: &DecayConfig) -> (f64, f64, Matrix3<f64>) {
    let nodes = gauss_legendre(16);
    let nphi = 16usize;
    let wphi = TAU / nphi as f64;
    let dirs: Vec<(Vector3<f64>, f64)> = nodes
        .iter()
        .flat_map(|&(c, wc)| {
            let s = (1.0 - c * c).max(0.0).sqrt();
            (0..nphi).map(move |i| {
                let phi = TAU * i as f64 / nphi as f64;
                (Vector3::new(s * phi.cos(), s * phi.sin(), c), wc * wphi)
            })
        })
        .collect();
    let mut norm = 0.0;
    let mut e_cos = 0.0;
    let mut e_x = Matrix3::zeros();
    for (lp, wp) in &dirs {
        for (lm, wm) in &dirs {
            let w = wp * wm * dilepton_density(state, lp, lm, cfg).unwrap();
            norm += w;
            e_cos += w * lp.dot(lm);
            e_x += lp * lm.transpose() * w;
        }
    }
    (norm, e_cos, e_x)
}

fn check_critical_points(gate: &mut Gate) {
    let t = Instant::now();
    let ax = axial_criticals_gg(M_TOP, &Tolerances::default()).unwrap();
    let pass = (ax.beta_ph - 0.632).abs() <= 1e-3
        && (ax.mass_ph - 446.0).abs() <= 1.0
        && (ax.beta_ch - 0.378).abs() <= 1e-3
        && (ax.mass_ch - 374.0).abs() <= 1.0;
    gate.report(
        "gg-averaged-critical-points",
        t,
        BUDGET,
        pass,
        format!(
            "marker root beta {:.4} (0.632+-0.001) mass {:.2} (446+-1); chsh root beta {:.4} (0.378+-0.001) mass {:.2} (374+-1)",
            ax.beta_ph, ax.mass_ph, ax.beta_ch, ax.mass_ch
        ),
    );
}

fn check_equatorial_boundaries(gate: &mut Gate) {
    let t = Instant::now();
    let (p1, p2) = critical_beta_ph_gg(PI / 2.0);
    let (c1, c2) = critical_beta_ch(PartonChannel::Gg, PI / 2.0, &Tolerances::default()).unwrap();
    let pass = (p1 - 0.5412).abs() <= 1e-4
        && (p2 - 0.8409).abs() <= 1e-4
        && (c1 - 0.367).abs() <= 2e-3
        && (c2 - 0.931).abs() <= 2e-3;
    gate.report(
        "gg-equatorial-boundaries",
        t,
        BUDGET,
        pass,
        format!(
            "separability edge ({p1:.5}, {p2:.5}) vs (0.5412, 0.8409)+-1e-4; chsh edge ({c1:.4}, {c2:.4}) vs (0.367, 0.931)+-0.002"
        ),
    );
}

// the rounded boundary literal is itself the stated target, not a
// stand-in for the exact constant
#[allow(clippy::approx_constant)]
fn check_mixture_transitions(gate: &mut Gate) {
    let t = Instant::now();
    let conc = |w: f64| {
        let f = threshold_mixture(w).unwrap();
        concurrence(&assemble_density(&f, "beam")).unwrap()
    };
    let w_ent = transition(|w| conc(w) > 1e-12, 0.0, 1.0);
    let w_chsh = transition(
        |w| chsh_value(&threshold_mixture(w).unwrap().c) > 2.0,
        0.0,
        1.0,
    );
    // the partial-transpose flag must flip across the same boundary
    let flag = |w: f64| {
        let f = threshold_mixture(w).unwrap();
        peres_horodecki(&assemble_density(&f, "beam")).unwrap().1
    };
    let pass = (w_ent - 0.5).abs() <= 1e-6
        && (w_chsh - 0.70711).abs() <= 1e-5
        && !flag(w_ent - 1e-5)
        && flag(w_ent + 1e-5);
    gate.report(
        "threshold-mixture-transitions",
        t,
        BUDGET,
        pass,
        format!("entangled above w_gg {w_ent:.8} (0.5+-1e-6); chsh violated above {w_chsh:.7} (0.70711+-1e-5)"),
    );
}

fn check_qq_identities(gate: &mut Gate) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let beta = 0.9999 * i as f64 / 99.0;
        for j in 0..100 {
            let theta = PI * j as f64 / 99.0;
            let k = kin(beta, theta.cos());
            let f = pair_state(PartonChannel::QqBar, &k).unwrap();
            let delta = delta_marker(&f.c);
            let (c_plus, _, _) = diag_eigs(PartonChannel::QqBar, &k).unwrap();
            let mu = chsh_mu(PartonChannel::QqBar, &k).unwrap();
            // closed form: exact for these zero-polarization states,
            // unlike the general eigensolver route whose square roots
            // amplify rounding on rank-deficient matrices past 1e-9
            let conc = concurrence_unpolarized(&f.c).unwrap();
            worst = worst
                .max((delta + f.c[(2, 2)]).abs())
                .max((c_plus - 1.0).abs())
                .max((mu - delta * delta).abs())
                .max((conc - delta.max(0.0)).abs());
        }
    }
    gate.report(
        "qq-closed-form-identities",
        t,
        BUDGET,
        worst < 1e-9,
        format!("marker = -c_nn, c_plus = 1, mu = marker^2, concurrence = max(marker, 0) on 100x100; worst dev {worst:.2e} (<1e-9)"),
    );
}

fn check_qq_window_collapse(gate: &mut Gate) {
    let t = Instant::now();
    let cfg = collider(Beam::Pp, 13_000.0, Arc::new(FlatQuark));
    let mut worst = 0.0f64;
    for &beta in &[0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.97] {
        let m = mass_of_beta(beta, M_TOP);
        let w = MassWindow::new(m, m + 1e-5).unwrap();
        let mi = mass_integrated_state(&cfg, &w).unwrap();
        let closed = beta * beta / (3.0 - beta * beta);
        worst = worst.max((mi.delta_helicity() - closed).abs());
    }
    gate.report(
        "qq-window-collapse",
        t,
        BUDGET,
        worst <= 1e-6,
        format!("collapsed-window marker vs beta^2/(3-beta^2) at 7 velocities; worst dev {worst:.2e} (<=1e-6)"),
    );
}

fn check_trace_identity(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let beta = 0.9999 * rng.random::<f64>();
        for ch in [PartonChannel::QqBar, PartonChannel::Gg] {
            let aa = angular_avg(ch, beta).unwrap();
            let lhs = 2.0 * aa.perp() + aa.z();
            let rhs = (aa.c_rr + aa.c_nn + aa.c_kk) / aa.a_tilde;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    gate.report(
        "beam-helicity-trace-identity",
        t,
        BUDGET,
        worst < 1e-9,
        format!("2 c_perp + c_z = c_rr + c_nn + c_kk, both channels, 1000 random velocities; worst dev {worst:.2e} (<1e-9)"),
    );
}

fn check_angular_closed_forms(gate: &mut Gate) {
    let t = Instant::now();
    let mut worst_avg = 0.0f64;
    for k in 0..=200 {
        let beta = 0.999 * k as f64 / 200.0;
        for ch in [PartonChannel::QqBar, PartonChannel::Gg] {
            let a = angular_avg(ch, beta).unwrap();
            let b = angular_avg_numeric(ch, beta).unwrap();
            for (x, y) in [
                (a.a_tilde, b.a_tilde),
                (a.c_perp, b.c_perp),
                (a.c_z, b.c_z),
                (a.c_rr, b.c_rr),
                (a.c_nn, b.c_nn),
                (a.c_kk, b.c_kk),
            ] {
                worst_avg = worst_avg.max((x - y).abs());
            }
        }
    }
    // kernel recursion against direct adaptive quadrature, relative once
    // the endpoint singularity inflates the values
    let mut worst_knm = 0.0f64;
    for &x in &[0.1, 0.35, 0.6, 0.85, 0.97] {
        for n in 0..=6usize {
            for m in 0..=6usize {
                let direct = integrate_tight(
                    |z: f64| z.powi(2 * n as i32) / (1.0 - z * z).powi(m as i32),
                    -x,
                    x,
                )
                .unwrap();
                let rec = knm(n, m, x).unwrap();
                worst_knm = worst_knm.max((rec - direct).abs() / direct.abs().max(1.0));
            }
        }
    }
    gate.report(
        "angular-average-closed-forms",
        t,
        BUDGET,
        worst_avg < 1e-9 && worst_knm < 1e-10,
        format!("closed vs 64-node averages, beta <= 0.999: worst dev {worst_avg:.2e} (<1e-9); kernel recursion n,m <= 6: worst dev {worst_knm:.2e} (<1e-10)"),
    );
}

fn check_grid_landmarks(gate: &mut Gate, grid: &Arc<dyn Pdf>) {
    let t = Instant::now();
    let w_gg_at = |beam: Beam, sqrt_s: f64| threshold_weights(&collider(beam, sqrt_s, grid.clone())).unwrap().1;
    let e_half = bisect(|e| w_gg_at(Beam::Pp, e) - 0.5, 3_000.0, 8_000.0, 1e-3).unwrap();
    let e_root2 = bisect(
        |e| w_gg_at(Beam::Pp, e) - FRAC_1_SQRT_2,
        7_000.0,
        15_000.0,
        1e-3,
    )
    .unwrap();
    let f13 = gluon_fraction(&collider(Beam::Pp, 13_000.0, grid.clone())).unwrap();
    let w_tevatron = w_gg_at(Beam::Ppbar, 1_960.0);

    // regression pins for the built-in toy density, frozen from the
    // first verified run
    let toy = collider(Beam::Pp, 13_000.0, Arc::new(ToyPdf::default()));
    let (w_qq_toy, w_gg_toy) = threshold_weights(&toy).unwrap();
    let mi = mass_integrated_state(&toy, &MassWindow::new(346.0, 400.0).unwrap()).unwrap();
    let h = mi.helicity_matrix();
    let l_qq = luminosity(&toy, PartonChannel::QqBar, 400.0).unwrap();
    let l_gg = luminosity(&toy, PartonChannel::Gg, 400.0).unwrap();
    let pins = [
        (w_qq_toy, 2.85847718647006e-2),
        (w_gg_toy, 9.714152281352993e-1),
        (mi.beam_matrix()[(0, 0)], -6.785029306869327e-1),
        (mi.beam_matrix()[(2, 2)], -5.256654783356086e-1),
        (mi.d_value(), -6.275571132364913e-1),
        (h[(0, 0)], -7.716089308889426e-1),
        (h[(1, 1)], -4.859826312809313e-1),
        (h[(2, 2)], -6.250797775395995e-1),
        (l_qq, 1.287185507209894e-3),
        (l_gg, 1.129449982247652e-1),
    ];
    let worst_pin = pins
        .iter()
        .map(|(got, want)| (got - want).abs() / want.abs())
        .fold(0.0f64, f64::max);

    let pass = (e_half - 5_000.0).abs() <= 1_000.0
        && (e_root2 - 10_000.0).abs() <= 1_500.0
        && (0.85..=0.95).contains(&f13)
        && w_tevatron < 0.5
        && worst_pin < 1e-9;
    gate.report(
        "grid-luminosity-landmarks",
        t,
        BUDGET,
        pass,
        format!(
            "w_gg = 1/2 at {:.0} GeV (5000+-1000), = 1/sqrt2 at {:.0} GeV (10000+-1500); f_gg(13 TeV) {f13:.4} in [0.85, 0.95]; ppbar 1.96 TeV w_gg {w_tevatron:.4} (<0.5); toy pins worst rel dev {worst_pin:.2e} (<1e-9)",
            e_half, e_root2
        ),
    );
}

fn check_high_pt_signatures(gate: &mut Gate, grid: &Arc<dyn Pdf>) {
    let t = Instant::now();
    let cfg = collider(Beam::Ppbar, 2_000.0, grid.clone());
    let mut min_delta = f64::INFINITY;
    for k in 0..=13 {
        let m_cut = 346.0 + (1_000.0 - 346.0) * k as f64 / 13.0;
        let (delta, _) = delta_high_pt(&cfg, m_cut).unwrap();
        min_delta = min_delta.min(delta);
    }
    let m_star = bisect(|m| delta_high_pt(&cfg, m).unwrap().1 - 2.0, 360.0, 700.0, 1e-4).unwrap();
    let beta_star = beta_of_mass(m_star, M_TOP).unwrap();
    let pass = min_delta > 0.0 && (beta_star - 0.652).abs() <= 0.01;
    gate.report(
        "ppbar-high-pt-signatures",
        t,
        BUDGET,
        pass,
        format!(
            "marker positive on every cut in [346, 1000] (min {min_delta:.4}); chsh crosses 2 at cut {m_star:.1} GeV, beta {beta_star:.4} (0.652+-0.01)"
        ),
    );
}

fn check_tomography_closure(gate: &mut Gate) {
    let t = Instant::now();
    let cfg = DecayConfig::default();
    let singlet = threshold_mixture(1.0).unwrap();
    let sample = sample_events(&singlet, 1_000_000, 20_260_816, &cfg).unwrap();
    let est = estimate_state(&sample, &cfg).unwrap();
    let mut max_pull = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let pull = (est.state.c[(i, j)] - singlet.c[(i, j)]).abs() / est.se_c[(i, j)];
            max_pull = max_pull.max(pull);
        }
    }
    let d_err = (est.d_direct + 1.0).abs();

    // independent product-sphere quadrature of the decay density against
    // the moment map the estimators invert
    let mut worst_oracle = 0.0f64;
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    let generic = extract_fano(&random_mixed_state(&mut rng, 3));
    for state in [&singlet, &pair_state(PartonChannel::Gg, &kin(0.9, 1.0f64.cos())).unwrap(), &generic] {
        let f = state.normalized().unwrap();
        let (norm, e_cos, e_x) = sphere_moments(&f, &cfg);
        let kk = cfg.kappa_plus * cfg.kappa_minus;
        let d = f.c.trace() / 3.0;
        worst_oracle = worst_oracle.max((norm - 1.0).abs());
        worst_oracle = worst_oracle.max((e_cos - kk * d / 3.0).abs());
        for i in 0..3 {
            for j in 0..3 {
                worst_oracle = worst_oracle.max((e_x[(i, j)] - kk * f.c[(i, j)] / 9.0).abs());
            }
        }
    }
    let pass = max_pull <= 5.0 && d_err <= 0.005 && worst_oracle <= 1e-6;
    gate.report(
        "tomography-closure",
        t,
        BUDGET_CLOSURE,
        pass,
        format!(
            "singlet, 1e6 events: max correlation pull {max_pull:.2} sigma (<=5); |D + 1| {d_err:.4} (<=0.005); moment oracles by quadrature, worst dev {worst_oracle:.2e} (<=1e-6)"
        ),
    );
}

fn check_random_state_cross_checks(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1_104);
    let mut ph_mismatch = 0usize;
    let mut chsh_without_ent = 0usize;
    let mut bound_excess = 0.0f64;
    let mut worst_brute = 0.0f64;
    for k in 0..10_000usize {
        let rho = random_mixed_state(&mut rng, 1 + k % 4);
        let f = extract_fano(&rho);
        let conc = concurrence(&rho).unwrap();
        let (pt_min, flagged) = peres_horodecki(&rho).unwrap();
        // both criteria are exact for two qubits; disagreement only
        // counts away from the shared numerical boundary
        if (conc > 1e-9) != flagged && pt_min.abs() > 1e-9 {
            ph_mismatch += 1;
        }
        let chsh = chsh_value(&f.c);
        if chsh > 2.0 + 1e-6 && conc <= 0.0 {
            chsh_without_ent += 1;
        }
        bound_excess = bound_excess.max(chsh - (2.0 * SQRT_2 + 1e-9));
        let brute = chsh_brute_force(&f.c, 600, 2_500, &mut rng);
        worst_brute = worst_brute.max((chsh - brute).abs());
    }
    let pass =
        ph_mismatch == 0 && chsh_without_ent == 0 && bound_excess <= 0.0 && worst_brute <= 1e-3;
    gate.report(
        "random-state-cross-checks",
        t,
        BUDGET,
        pass,
        format!(
            "10000 random states: partial-transpose/concurrence mismatches {ph_mismatch}; chsh violations without entanglement {chsh_without_ent}; bound excess {bound_excess:.1e} (<=0); worst brute-force dev {worst_brute:.2e} (<=1e-3)"
        ),
    );
}

fn check_map_shape(gate: &mut Gate, grid: &Arc<dyn Pdf>) {
    let t = Instant::now();
    // two disjoint entangled velocity bands for gluons at theta = pi/2,
    // with edges on the closed-form boundaries
    let (b_lo, b_hi) = critical_beta_ph_gg(PI / 2.0);
    let n = 500usize;
    let flags: Vec<bool> = (0..=n)
        .map(|k| {
            let beta = 0.999 * k as f64 / n as f64;
            let f = pair_state(PartonChannel::Gg, &kin(beta, 0.0)).unwrap();
            concurrence(&assemble_density(&f, "helicity")).unwrap() > 1e-12
        })
        .collect();
    let mut edges = Vec::new();
    for k in 1..flags.len() {
        if flags[k] != flags[k - 1] {
            edges.push(0.999 * (k as f64 - 0.5) / n as f64);
        }
    }
    let bands_ok = flags[0]
        && *flags.last().unwrap()
        && edges.len() == 2
        && (edges[0] - b_lo).abs() <= 0.003
        && (edges[1] - b_hi).abs() <= 0.003;

    // mirror symmetry of the production angle: diagonal entries even,
    // off-diagonal coupling odd
    let mut worst_mirror = 0.0f64;
    for ch in [PartonChannel::QqBar, PartonChannel::Gg] {
        for i in 0..10 {
            let beta = 0.05 + 0.9 * i as f64 / 9.0;
            for j in 0..12 {
                let cos = 0.02 + 0.96 * j as f64 / 11.0;
                let a = r_coeffs(ch, &kin(beta, cos)).unwrap();
                let b = r_coeffs(ch, &kin(beta, -cos)).unwrap();
                worst_mirror = worst_mirror
                    .max((a.a - b.a).abs())
                    .max((a.c[(0, 0)] - b.c[(0, 0)]).abs())
                    .max((a.c[(1, 1)] - b.c[(1, 1)]).abs())
                    .max((a.c[(2, 2)] - b.c[(2, 2)]).abs())
                    .max((a.c[(1, 0)] + b.c[(1, 0)]).abs());
            }
        }
    }

    // gluon dominance grows monotonically with collider energy, and the
    // beam type stops mattering at asymptotic energies
    let energies = [2e3, 5e3, 1e4, 2e4, 5e4, 1e5];
    let fracs: Vec<f64> = energies
        .iter()
        .map(|&e| gluon_fraction(&collider(Beam::Pp, e, grid.clone())).unwrap())
        .collect();
    let monotone = fracs.windows(2).all(|w| w[1] > w[0]);
    let f_pp = fracs[5];
    let f_ppbar = gluon_fraction(&collider(Beam::Ppbar, 1e5, grid.clone())).unwrap();
    let beam_gap = (f_pp - f_ppbar).abs();

    let pass = bands_ok && worst_mirror <= 1e-12 && monotone && beam_gap < 0.02;
    gate.report(
        "phase-space-shape",
        t,
        BUDGET,
        pass,
        format!(
            "plot-level comparison is out of scope; shape proxies instead: gluon entangled bands at edges ({:.4}, {:.4}) vs closed form ({b_lo:.4}, {b_hi:.4}); mirror dev {worst_mirror:.1e} (<=1e-12); f_gg monotone over 2-100 TeV {monotone}; beam gap at 100 TeV {beam_gap:.4} (<0.02)",
            edges.first().copied().unwrap_or(f64::NAN),
            edges.last().copied().unwrap_or(f64::NAN),
        ),
    );
}

#[test]
fn acceptance() {
    println!();
    let mut gate = Gate::new();
    let grid = synthetic_grid();
    check_critical_points(&mut gate);
    check_equatorial_boundaries(&mut gate);
    check_mixture_transitions(&mut gate);
    check_qq_identities(&mut gate);
    check_qq_window_collapse(&mut gate);
    check_trace_identity(&mut gate);
    check_angular_closed_forms(&mut gate);
    check_grid_landmarks(&mut gate, &grid);
    check_high_pt_signatures(&mut gate, &grid);
    check_tomography_closure(&mut gate);
    check_random_state_cross_checks(&mut gate);
    check_map_shape(&mut gate, &grid);
    assert!(
        gate.failures.is_empty(),
        "acceptance checks failed: {}",
        gate.failures.join(", ")
    );
}
