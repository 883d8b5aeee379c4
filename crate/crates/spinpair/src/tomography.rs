//! Dilepton decay modeling, Monte Carlo event generation, and moment-based
//! reconstruction of the pair spin state.
//!
//! Charged leptons from the weak decay chain are spin analyzers: in the
//! respective parent rest frames the joint angular distribution is
//!
//! ```text
//! p(l+, l-) = [1 + k+ B+.l+ + k- B-.l- + k+ k- l+.C.l-] / (4 pi)^2
//! ```
//!
//! with analyzing powers `k+` (positively charged lepton) and `k-`
//! (negatively charged), both `|k| <= 1`. Every Fano coefficient is a low
//! angular moment of that density, so averaging decay directions inverts
//! the map: that inversion is the tomography implemented here.
//!
//! Event generation uses rejection sampling from the uniform distribution
//! on the product of two unit spheres. Randomness comes from the ChaCha12
//! stream cipher; events are produced in fixed chunks of 16384, chunk `k`
//! reading stream `k` of the seed, so samples are bit-identical for a
//! given seed no matter how many worker threads participate. Moment
//! accumulation reduces over the same fixed chunks in index order, which
//! makes the estimates deterministic as well.
//!
//! External formats: samples serialize to CSV (header
//! `lx+,ly+,lz+,lx-,ly-,lz-`), reports to JSON.

use std::f64::consts::PI;
use std::io;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::fano::{
    assemble_density, axial_delta, chsh_value, concurrence, extract_fano, peres_horodecki,
    DensityMatrix4, FanoState, C64, M4,
};
use crate::hadronic::{mass_integrated_state, MassIntegrated, MassWindow, BASIS_BEAM};
use crate::pdf::ColliderConfig;
use crate::tol::Tolerances;
use crate::Result;

/// Events below this count carry too little information for a 15-parameter
/// moment fit.
pub const MIN_SAMPLE: usize = 100;

/// Direction vectors must be unit-norm to this tolerance.
pub const UNIT_TOL: f64 = 1e-12;

/// Fixed RNG chunk: chunk `k` of a sample draws from stream `k`, so the
/// event list is independent of the thread count.
const STREAM_CHUNK: usize = 1 << 14;

const CSV_HEADER: [&str; 6] = ["lx+", "ly+", "lz+", "lx-", "ly-", "lz-"];

fn four_pi_sq() -> f64 {
    let s = 4.0 * PI;
    s * s
}

/// Spin analyzing powers of the two decay leptons.
///
/// Defaults model the standard chain: `+1` for the positively charged
/// lepton and `-1` for the negatively charged one. Both are exposed
/// because the exact values are slightly below unit magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayConfig {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            kappa_plus: 1.0,
            kappa_minus: -1.0,
        }
    }
}

impl DecayConfig {
    /// Err if either analyzing power exceeds unit magnitude.
    pub fn new(kappa_plus: f64, kappa_minus: f64) -> Result<Self> {
        for (name, k) in [("kappa_plus", kappa_plus), ("kappa_minus", kappa_minus)] {
            if !(k.abs() <= 1.0) {
                return Err(Error::OutOfRange {
                    name,
                    value: k,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        Ok(DecayConfig {
            kappa_plus,
            kappa_minus,
        })
    }

    fn product(&self) -> f64 {
        self.kappa_plus * self.kappa_minus
    }
}

/// Both analyzing powers must be nonzero for the moment estimators to be
/// invertible; `kappa = 0` erases the corresponding signal entirely.
fn require_analyzing_power(cfg: &DecayConfig) -> Result<()> {
    for (name, k) in [
        ("kappa_plus", cfg.kappa_plus),
        ("kappa_minus", cfg.kappa_minus),
    ] {
        if k == 0.0 {
            return Err(Error::Domain { name, value: 0.0 });
        }
    }
    Ok(())
}

/// Direction pairs `(l+, l-)` of one event batch.
type EventVec = Vec<(Vector3<f64>, Vector3<f64>)>;

/// A set of dilepton direction pairs together with the seed that produced
/// it. Directions are unit vectors in the measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EventSample {
    events: EventVec,
    seed: u64,
}

impl EventSample {
    /// Wrap a list of direction pairs, enforcing unit norms to 1e-12.
    pub fn new(events: Vec<(Vector3<f64>, Vector3<f64>)>, seed: u64) -> Result<Self> {
        for (lp, lm) in &events {
            for l in [lp, lm] {
                let norm = l.norm();
                if !((norm - 1.0).abs() <= UNIT_TOL) {
                    return Err(Error::Domain {
                        name: "lepton direction norm",
                        value: norm,
                    });
                }
            }
        }
        Ok(EventSample { events, seed })
    }

    pub fn events(&self) -> &[(Vector3<f64>, Vector3<f64>)] {
        &self.events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// Write the sample as CSV with the fixed header
    /// `lx+,ly+,lz+,lx-,ly-,lz-`. Floats print in shortest round-trip
    /// form, so a read-back reproduces the events bit for bit.
    pub fn write_csv<W: io::Write>(&self, sink: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(CSV_HEADER).map_err(csv_to_io)?;
        for (lp, lm) in &self.events {
            w.serialize((lp.x, lp.y, lp.z, lm.x, lm.y, lm.z))
                .map_err(csv_to_io)?;
        }
        w.flush()
    }

    /// Parse a CSV sample written by [`write_csv`](Self::write_csv). The
    /// header must match exactly; every row must hold six unit-vector
    /// components. The seed is not part of the format and is supplied by
    /// the caller.
    pub fn read_csv<R: io::Read>(source: R, seed: u64) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(source);
        {
            let got = r.headers().map_err(csv_to_parse)?;
            if got.len() != CSV_HEADER.len() || got.iter().zip(CSV_HEADER).any(|(a, b)| a != b) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header {}", CSV_HEADER.join(",")),
                });
            }
        }
        let mut events = Vec::new();
        for rec in r.deserialize::<(f64, f64, f64, f64, f64, f64)>() {
            let (px, py, pz, mx, my, mz) = rec.map_err(csv_to_parse)?;
            events.push((Vector3::new(px, py, pz), Vector3::new(mx, my, mz)));
        }
        EventSample::new(events, seed)
    }
}

fn csv_to_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn csv_to_parse(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// The square bracket of the decay density, without the 1/(4 pi)^2
/// normalization. Rejection sampling needs only this ratio.
fn density_bracket(
    f: &FanoState,
    l_plus: &Vector3<f64>,
    l_minus: &Vector3<f64>,
    cfg: &DecayConfig,
) -> f64 {
    1.0 + cfg.kappa_plus * f.bplus.dot(l_plus)
        + cfg.kappa_minus * f.bminus.dot(l_minus)
        + cfg.product() * l_plus.dot(&(f.c * l_minus))
}

/// Supremum of the density bracket over both spheres. Exact for
/// unpolarized states (the production matrices here), an upper bound in
/// general since the three maximizing directions need not coincide.
fn envelope_bracket(f: &FanoState, cfg: &DecayConfig) -> f64 {
    let smax = f.c.singular_values().max();
    1.0 + cfg.kappa_plus.abs() * f.bplus.norm()
        + cfg.kappa_minus.abs() * f.bminus.norm()
        + cfg.product().abs() * smax
}

/// Joint angular density of the two decay leptons for a normalized state.
///
/// `p = [1 + k+ B+.l+ + k- B-.l- + k+ k- l+.C.l-] / (4 pi)^2`, which
/// integrates to one over both spheres and is nonnegative for physical
/// states with `|k| <= 1`. Values inside the rounding band
/// `[-1e-12, 0)` clamp to zero; anything lower reports the input state as
/// non-physical.
pub fn dilepton_density(
    state: &FanoState,
    l_plus: &Vector3<f64>,
    l_minus: &Vector3<f64>,
    cfg: &DecayConfig,
) -> Result<f64> {
    let f = state.normalized()?;
    let p = density_bracket(&f, l_plus, l_minus, cfg) / four_pi_sq();
    if p < -1e-12 {
        return Err(Error::NegativeDensity(p));
    }
    Ok(p.max(0.0))
}

/// Chunk layout for a sample of `n` events: (stream index, events to
/// draw). Fixed so that results never depend on scheduling.
fn chunk_layout(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(STREAM_CHUNK))
        .map(|k| (k as u64, STREAM_CHUNK.min(n - k * STREAM_CHUNK)))
        .collect()
}

/// Draw `take` events from one RNG stream; returns the events and the
/// number of proposals consumed.
fn rejection_chunk(
    f: &FanoState,
    cfg: &DecayConfig,
    envelope: f64,
    seed: u64,
    stream: u64,
    take: usize,
) -> (EventVec, u64) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::with_capacity(take);
    let mut trials = 0u64;
    while out.len() < take {
        trials += 1;
        let p: [f64; 3] = UnitSphere.sample(&mut rng);
        let m: [f64; 3] = UnitSphere.sample(&mut rng);
        let u: f64 = rng.random();
        let lp = Vector3::new(p[0], p[1], p[2]);
        let lm = Vector3::new(m[0], m[1], m[2]);
        if u * envelope <= density_bracket(f, &lp, &lm, cfg).max(0.0) {
            out.push((lp, lm));
        }
    }
    (out, trials)
}

/// Draw `n` independent events from the decay density of `state` by
/// rejection against the uniform distribution on the sphere product.
///
/// Deterministic for a given seed: chunk `k` of 16384 events reads
/// ChaCha12 stream `k`, chunks are generated in parallel and concatenated
/// in index order.
pub fn sample_events(
    state: &FanoState,
    n: usize,
    seed: u64,
    cfg: &DecayConfig,
) -> Result<EventSample> {
    let f = state.normalized()?;
    let envelope = envelope_bracket(&f, cfg);
    let pieces: Vec<EventVec> = chunk_layout(n)
        .into_par_iter()
        .map(|(stream, take)| rejection_chunk(&f, cfg, envelope, seed, stream, take).0)
        .collect();
    let mut events = Vec::with_capacity(n);
    for p in pieces {
        events.extend(p);
    }
    Ok(EventSample { events, seed })
}

/// Moment accumulator. Slots 0..3 hold cos theta+ components, 3..6
/// cos theta-, 6..15 the products x_ij row-major, 15 the opening-angle
/// cosine (equal to the diagonal product sum per event).
#[derive(Clone)]
struct Accum {
    n: u64,
    sum: [f64; 16],
    sq: [f64; 16],
    /// Cross products of the diagonal slots (xx*yy, xx*zz, yy*zz); feed
    /// the covariance of linear combinations of diagonal moments.
    cross: [f64; 3],
}

impl Accum {
    fn new() -> Self {
        Accum {
            n: 0,
            sum: [0.0; 16],
            sq: [0.0; 16],
            cross: [0.0; 3],
        }
    }

    fn push(&mut self, lp: &Vector3<f64>, lm: &Vector3<f64>) {
        let mut v = [0.0; 16];
        v[0] = lp.x;
        v[1] = lp.y;
        v[2] = lp.z;
        v[3] = lm.x;
        v[4] = lm.y;
        v[5] = lm.z;
        for i in 0..3 {
            for j in 0..3 {
                v[6 + 3 * i + j] = lp[i] * lm[j];
            }
        }
        v[15] = v[6] + v[10] + v[14];
        for ((s, q), &vk) in self.sum.iter_mut().zip(self.sq.iter_mut()).zip(&v) {
            *s += vk;
            *q += vk * vk;
        }
        self.cross[0] += v[6] * v[10];
        self.cross[1] += v[6] * v[14];
        self.cross[2] += v[10] * v[14];
        self.n += 1;
    }

    fn merge(&mut self, other: &Accum) {
        self.n += other.n;
        for k in 0..16 {
            self.sum[k] += other.sum[k];
            self.sq[k] += other.sq[k];
        }
        for k in 0..3 {
            self.cross[k] += other.cross[k];
        }
    }

    fn finish(&self) -> Moments {
        let n = self.n as f64;
        let mean = |k: usize| self.sum[k] / n;
        // Variance of the sample mean with the n-1 correction.
        let vmean = |k: usize| -> f64 {
            if self.n < 2 {
                return 0.0;
            }
            let m = mean(k);
            (self.sq[k] / n - m * m).max(0.0) / (n - 1.0)
        };
        let se = |k: usize| vmean(k).sqrt();
        let diag = [6usize, 10, 14];
        let mut cov_diag = Matrix3::zeros();
        for (a, &ka) in diag.iter().enumerate() {
            cov_diag[(a, a)] = vmean(ka);
        }
        if self.n >= 2 {
            let pairs = [(0usize, 1usize, 0usize), (0, 2, 1), (1, 2, 2)];
            for (a, b, k) in pairs {
                let c = (self.cross[k] / n - mean(diag[a]) * mean(diag[b])) / (n - 1.0);
                cov_diag[(a, b)] = c;
                cov_diag[(b, a)] = c;
            }
        }
        Moments {
            n: self.n as usize,
            cos_plus: Vector3::new(mean(0), mean(1), mean(2)),
            cos_minus: Vector3::new(mean(3), mean(4), mean(5)),
            x: Matrix3::from_fn(|i, j| mean(6 + 3 * i + j)),
            cos_phi: mean(15),
            se_cos_plus: Vector3::new(se(0), se(1), se(2)),
            se_cos_minus: Vector3::new(se(3), se(4), se(5)),
            se_x: Matrix3::from_fn(|i, j| se(6 + 3 * i + j)),
            se_cos_phi: se(15),
            cov_diag,
        }
    }
}

/// Raw angular moments of a sample, before any analyzing-power scaling.
/// Standard errors are standard deviations of the corresponding sample
/// means.
#[derive(Clone, Debug)]
pub struct Moments {
    pub n: usize,
    /// Mean direction components of the positive lepton.
    pub cos_plus: Vector3<f64>,
    /// Mean direction components of the negative lepton.
    pub cos_minus: Vector3<f64>,
    /// Mean component products `l+_i l-_j`.
    pub x: Matrix3<f64>,
    /// Mean opening-angle cosine; per event this equals the trace of the
    /// product matrix, so it carries the same information as `x` diagonals.
    pub cos_phi: f64,
    pub se_cos_plus: Vector3<f64>,
    pub se_cos_minus: Vector3<f64>,
    pub se_x: Matrix3<f64>,
    pub se_cos_phi: f64,
    /// Covariance matrix of the three diagonal product means
    /// `(x_xx, x_yy, x_zz)`; exact error propagation for their linear
    /// combinations, where per-entry errors alone would pretend
    /// independence.
    pub cov_diag: Matrix3<f64>,
}

/// Accumulate the raw moments of a sample. Reduction runs over fixed
/// 16384-event chunks merged in index order, so the result is
/// deterministic and matches the streaming path used by reports.
pub fn sample_moments(sample: &EventSample) -> Moments {
    let partials: Vec<Accum> = sample
        .events
        .par_chunks(STREAM_CHUNK)
        .map(|chunk| {
            let mut acc = Accum::new();
            for (lp, lm) in chunk {
                acc.push(lp, lm);
            }
            acc
        })
        .collect();
    let mut total = Accum::new();
    for a in &partials {
        total.merge(a);
    }
    total.finish()
}

/// Generate and accumulate without materializing the event list; used by
/// reports where `n` can reach 1e7. Identical arithmetic to sampling then
/// calling [`sample_moments`].
fn streamed_moments(f: &FanoState, n: usize, seed: u64, cfg: &DecayConfig) -> Moments {
    let envelope = envelope_bracket(f, cfg);
    let partials: Vec<Accum> = chunk_layout(n)
        .into_par_iter()
        .map(|(stream, take)| {
            let (events, _) = rejection_chunk(f, cfg, envelope, seed, stream, take);
            let mut acc = Accum::new();
            for (lp, lm) in &events {
                acc.push(lp, lm);
            }
            acc
        })
        .collect();
    let mut total = Accum::new();
    for a in &partials {
        total.merge(a);
    }
    total.finish()
}

/// Moment-based state estimate with per-entry standard errors. The
/// underlying `state` is the raw estimate: unbiased but not guaranteed
/// physical at finite sample size (see [`project_physical`]).
#[derive(Clone, Debug)]
pub struct StateEstimate {
    /// Raw Fano estimate, trace-normalized by construction.
    pub state: FanoState,
    pub se_bplus: Vector3<f64>,
    pub se_bminus: Vector3<f64>,
    pub se_c: Matrix3<f64>,
    /// Scalar mean of the correlation matrix from the opening-angle
    /// moment.
    pub d_direct: f64,
    pub se_d_direct: f64,
    /// Raw moments behind the estimate.
    pub moments: Moments,
}

impl StateEstimate {
    /// The trace route to the same scalar. In this simulation the
    /// opening-angle cosine is computed per event as the diagonal product
    /// sum, so the two routes coincide up to summation order.
    pub fn d_from_trace(&self) -> f64 {
        self.state.c.trace() / 3.0
    }
}

fn scaled_estimate(m: Moments, cfg: &DecayConfig) -> StateEstimate {
    let kp = cfg.kappa_plus;
    let km = cfg.kappa_minus;
    let kk = cfg.product();
    StateEstimate {
        state: FanoState::new(1.0, m.cos_plus * (3.0 / kp), m.cos_minus * (3.0 / km), m.x * (9.0 / kk)),
        se_bplus: m.se_cos_plus * (3.0 / kp.abs()),
        se_bminus: m.se_cos_minus * (3.0 / km.abs()),
        se_c: m.se_x * (9.0 / kk.abs()),
        d_direct: 3.0 * m.cos_phi / kk,
        se_d_direct: 3.0 * m.se_cos_phi / kk.abs(),
        moments: m,
    }
}

/// Reconstruct the state from a sample by inverting the moment map:
/// `B+_i = 3<cos theta+_i>/k+`, `B-_i = 3<cos theta-_i>/k-`,
/// `C_ij = 9<l+_i l-_j>/(k+ k-)`, and the scalar mean
/// `D = 3<cos phi>/(k+ k-)` directly from the opening angle. With the
/// default analyzing powers `(+1, -1)` these reduce to the familiar
/// signed forms `-3<cos theta-_i>`, `-9<l+_i l-_j>`, `-3<cos phi>`.
/// Standard errors are the sample-mean standard deviations under the same
/// scaling.
pub fn estimate_state(sample: &EventSample, cfg: &DecayConfig) -> Result<StateEstimate> {
    if sample.n() < MIN_SAMPLE {
        return Err(Error::InsufficientSample {
            n: sample.n(),
            min: MIN_SAMPLE,
        });
    }
    require_analyzing_power(cfg)?;
    Ok(scaled_estimate(sample_moments(sample), cfg))
}

/// Project a (possibly non-physical) trace-normalized estimate onto the
/// physical set: clip negative density-matrix eigenvalues to zero and
/// renormalize the trace. Identity on states that are already physical.
pub fn project_physical(state: &FanoState) -> Result<FanoState> {
    let f = state.normalized()?;
    let rho = assemble_density(&f, BASIS_BEAM);
    let eig = rho.entries().symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateNormalization { a: total });
    }
    let mut m = M4::zeros();
    for (i, w) in clipped.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(i).into_owned();
        m += (v * v.adjoint()) * C64::new(w / total, 0.0);
    }
    let rebuilt = DensityMatrix4::from_matrix(m, BASIS_BEAM, &Tolerances::default())?;
    Ok(extract_fano(&rebuilt))
}

/// A point estimate with its propagated standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MarkerEstimate {
    pub value: f64,
    pub error: f64,
}

/// One assumption tier of the reconstruction: a named parameter list with
/// matching values and errors.
#[derive(Clone, Debug, Serialize)]
pub struct TierEstimate {
    pub label: String,
    pub parameter_count: usize,
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl TierEstimate {
    fn new(label: &str, names: Vec<&str>, values: Vec<f64>, errors: Vec<f64>) -> Self {
        assert_eq!(names.len(), values.len());
        assert_eq!(names.len(), errors.len());
        TierEstimate {
            label: label.to_owned(),
            parameter_count: names.len(),
            names: names.into_iter().map(str::to_owned).collect(),
            values,
            errors,
        }
    }
}

/// Exact values of the generating state, for closure comparisons.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruthSummary {
    pub c_perp: f64,
    pub c_z: f64,
    pub d: f64,
    pub delta: f64,
    pub witness: f64,
    pub concurrence: f64,
    pub chsh: f64,
}

/// The physical (projected) reconstruction and its entanglement verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectedSummary {
    pub bplus: [f64; 3],
    pub bminus: [f64; 3],
    pub c: [[f64; 3]; 3],
    pub concurrence: f64,
    pub pt_min_eigenvalue: f64,
    pub entangled: bool,
    pub chsh: f64,
}

/// Derived markers of the raw estimate with propagated errors. The
/// significance is `-witness/error` when the witness is negative, zero
/// otherwise.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReportMarkers {
    pub delta: MarkerEstimate,
    pub d: MarkerEstimate,
    pub witness: MarkerEstimate,
    pub witness_significance: f64,
    pub mu_perp: MarkerEstimate,
    pub chsh: f64,
}

/// Full tomography closure report for one collider window.
#[derive(Clone, Debug, Serialize)]
pub struct TomographyReport {
    pub basis: String,
    pub n: usize,
    pub seed: u64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub window: [f64; 2],
    pub truth: TruthSummary,
    pub tiers: Vec<TierEstimate>,
    pub markers: ReportMarkers,
    pub projected: ProjectedSummary,
}

impl TomographyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn quad_form(w: [f64; 3], v: &Matrix3<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += w[i] * w[j] * v[(i, j)];
        }
    }
    s.max(0.0)
}

fn vec3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn mat3(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

/// Simulate a measurement of the mass-integrated state of `cfg` over `w`
/// with the default analyzing powers and reconstruct it at three
/// assumption tiers: axial symmetry with production-constrained shape
/// (2 parameters), axial symmetry alone (4), and no assumption (15).
pub fn tomography_report(
    cfg: &ColliderConfig,
    w: &MassWindow,
    n: usize,
    seed: u64,
) -> Result<TomographyReport> {
    tomography_report_with(cfg, w, n, seed, &DecayConfig::default())
}

/// [`tomography_report`] with explicit analyzing powers.
pub fn tomography_report_with(
    cfg: &ColliderConfig,
    w: &MassWindow,
    n: usize,
    seed: u64,
    decay: &DecayConfig,
) -> Result<TomographyReport> {
    if n < MIN_SAMPLE {
        return Err(Error::InsufficientSample { n, min: MIN_SAMPLE });
    }
    require_analyzing_power(decay)?;
    let mi: MassIntegrated = mass_integrated_state(cfg, w)?;
    let truth_state = mi.state();
    let m = streamed_moments(&truth_state, n, seed, decay);
    let est = scaled_estimate(m, decay);

    let kk_abs = decay.product().abs();
    let scale = 9.0 / kk_abs;
    let mx = &est.moments.x;
    let cov = &est.moments.cov_diag;
    let c_perp_hat = 9.0 * (mx[(0, 0)] + mx[(1, 1)]) / (2.0 * decay.product());
    let c_z_hat = est.state.c[(2, 2)];
    let se_perp = scale * quad_form([0.5, 0.5, 0.0], cov).sqrt();
    let se_z = est.se_c[(2, 2)];
    let sign = if c_perp_hat < 0.0 { -1.0 } else { 1.0 };
    let se_delta = scale * quad_form([0.5 * sign, 0.5 * sign, -0.5], cov).sqrt();

    let tiers = vec![
        TierEstimate::new(
            "axial",
            vec!["c_perp", "c_z"],
            vec![c_perp_hat, c_z_hat],
            vec![se_perp, se_z],
        ),
        TierEstimate::new(
            "axial-polarized",
            vec!["c_perp", "c_z", "b_plus_z", "b_minus_z"],
            vec![c_perp_hat, c_z_hat, est.state.bplus[2], est.state.bminus[2]],
            vec![se_perp, se_z, est.se_bplus[2], est.se_bminus[2]],
        ),
        full_tier(&est),
    ];

    let witness_value = est.d_direct + 1.0 / 3.0;
    let witness = MarkerEstimate {
        value: witness_value,
        error: est.se_d_direct,
    };
    let witness_significance = if witness.value < 0.0 && witness.error > 0.0 {
        -witness.value / witness.error
    } else {
        0.0
    };

    let proj = project_physical(&est.state)?;
    let rho_p = assemble_density(&proj, BASIS_BEAM);
    let (pt_min, entangled) = peres_horodecki(&rho_p)?;
    let proj_chsh = chsh_value(&proj.c);
    let projected = ProjectedSummary {
        bplus: vec3(&proj.bplus),
        bminus: vec3(&proj.bminus),
        c: mat3(&proj.c),
        concurrence: concurrence(&rho_p)?,
        pt_min_eigenvalue: pt_min,
        entangled,
        chsh: proj_chsh,
    };

    let markers = ReportMarkers {
        delta: MarkerEstimate {
            value: axial_delta(c_perp_hat, c_z_hat),
            error: se_delta,
        },
        d: MarkerEstimate {
            value: est.d_direct,
            error: est.se_d_direct,
        },
        witness,
        witness_significance,
        mu_perp: MarkerEstimate {
            value: 2.0 * c_perp_hat * c_perp_hat - 1.0,
            error: 4.0 * c_perp_hat.abs() * se_perp,
        },
        chsh: proj_chsh,
    };

    let truth = TruthSummary {
        c_perp: mi.c_perp,
        c_z: mi.c_z,
        d: mi.d_value(),
        delta: mi.delta_axial(),
        witness: mi.witness(),
        concurrence: mi.concurrence(),
        chsh: chsh_value(&mi.beam_matrix()),
    };

    Ok(TomographyReport {
        basis: BASIS_BEAM.to_owned(),
        n,
        seed,
        kappa_plus: decay.kappa_plus,
        kappa_minus: decay.kappa_minus,
        window: [w.lo, w.hi],
        truth,
        tiers,
        markers,
        projected,
    })
}

fn full_tier(est: &StateEstimate) -> TierEstimate {
    let mut names = Vec::with_capacity(15);
    let mut values = Vec::with_capacity(15);
    let mut errors = Vec::with_capacity(15);
    let axes = ["x", "y", "z"];
    for (i, ax) in axes.iter().enumerate() {
        names.push(format!("b_plus_{ax}"));
        values.push(est.state.bplus[i]);
        errors.push(est.se_bplus[i]);
    }
    for (i, ax) in axes.iter().enumerate() {
        names.push(format!("b_minus_{ax}"));
        values.push(est.state.bminus[i]);
        errors.push(est.se_bminus[i]);
    }
    for (i, ai) in axes.iter().enumerate() {
        for (j, aj) in axes.iter().enumerate() {
            names.push(format!("c_{ai}{aj}"));
            values.push(est.state.c[(i, j)]);
            errors.push(est.se_c[(i, j)]);
        }
    }
    TierEstimate {
        label: "general".to_owned(),
        parameter_count: names.len(),
        names,
        values,
        errors,
    }
}
