//! Command-line front end: reproducible tables and reports for the
//! spin-correlation observables of top-quark pair production.
//!
//! Every command writes one output file atomically (temp file plus
//! rename) and is byte-identical across repeat runs with the same
//! arguments. Numbers print with 9 significant digits. CSV outputs are a
//! header row plus data rows; JSON outputs follow the schema files under
//! `schema/` at the repository root.
//!
//! Exit codes: 0 success, 2 usage error, 3 data or parse error,
//! 4 numeric failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use spinpair::fano::{chsh_value, concurrence_unpolarized, delta_marker};
use spinpair::hadronic::{
    critical_beta_vs_energy, delta_high_pt, mass_integrated_state, threshold_weights,
    CriticalKind, MassWindow,
};
use spinpair::pdf::{
    Interp,
    channel_weights, gluon_fraction, luminosity, parse_lhagrid, Beam, ColliderConfig, Pdf,
    QScaleRule, ToyPdf,
};
use spinpair::production::{
    critical_beta_ch, critical_beta_ph_gg, pair_state, r_coeffs, Kinematics, PartonChannel,
};
use spinpair::tol::Tolerances;
use spinpair::tomography::tomography_report;
use spinpair::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "spinpair",
    version,
    about = "Spin correlations, entanglement markers, and dilepton tomography \
             for top-quark pairs at leading order"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase-space map of entanglement markers over (beta, Theta).
    ScanMap(ScanArgs),
    /// Mass-window-integrated observables against the window cut.
    Observables(ObsArgs),
    /// Critical velocities and channel weights against collider energy.
    Critical(CriticalArgs),
    /// Monte Carlo tomography closure report (JSON).
    Tomography(TomoArgs),
    /// Parton luminosities and channel weights against pair mass.
    Luminosity(LumiArgs),
}

#[derive(Args)]
struct ColliderArgs {
    /// Beam configuration.
    #[arg(long, value_enum, default_value_t = BeamOpt::Pp)]
    beam: BeamOpt,
    /// Collider center-of-mass energy in GeV.
    #[arg(long = "sqrt-s", default_value_t = 13_000.0)]
    sqrt_s: f64,
    /// Top-quark mass in GeV.
    #[arg(long, default_value_t = 173.0)]
    mtop: f64,
    /// Strong coupling used in overall cross-section factors.
    #[arg(long = "alpha-s", default_value_t = 0.118)]
    alpha_s: f64,
    /// Parton distributions: a grid file path, or "toy-v1" for the
    /// built-in analytic set.
    #[arg(long, default_value = "toy-v1")]
    pdf: String,
    /// Factorization scale rule: "mtt", "mtt/2", or "fixed:GEV".
    #[arg(long = "q-scale", default_value = "mtt")]
    q_scale: String,
}

#[derive(Args)]
struct OutArgs {
    /// Output table format. Tomography reports are always JSON.
    #[arg(long, value_enum, default_value_t = FormatOpt::Csv)]
    format: FormatOpt,
    /// Output file path (written atomically).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Partonic channel to scan.
    #[arg(long, value_enum, conflicts_with = "mixture")]
    channel: Option<ChannelOpt>,
    /// Channel mixture: "lumi" for luminosity weights from the collider
    /// options, or a constant gg probability in [0, 1].
    #[arg(long)]
    mixture: Option<String>,
    /// Grid resolution "NxM": N velocities (outer), M angles (inner).
    #[arg(long, default_value = "60x60")]
    grid: String,
    /// Largest pair velocity on the grid.
    #[arg(long = "beta-max", default_value_t = 0.999)]
    beta_max: f64,
    #[command(flatten)]
    collider: ColliderArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ObsArgs {
    /// Cut-axis range "LO:HI" in GeV: upper window edges for threshold
    /// windows, lower edges for high-pT windows.
    #[arg(long)]
    window: String,
    /// Number of cuts (an "NxM" grid uses N).
    #[arg(long, default_value = "25")]
    grid: String,
    /// Window family: integrate [2 m_top, cut] (threshold) or
    /// [cut, sqrt_s] (high-pt); "auto" picks threshold for pp and
    /// high-pt for ppbar.
    #[arg(long = "window-kind", value_enum, default_value_t = WindowKind::Auto)]
    window_kind: WindowKind,
    #[command(flatten)]
    collider: ColliderArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CriticalArgs {
    /// Collider energy range "LO:HI" in GeV, sampled geometrically.
    #[arg(long)]
    window: String,
    /// Number of energies (an "NxM" grid uses N).
    #[arg(long, default_value = "8")]
    grid: String,
    #[command(flatten)]
    collider: ColliderArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TomoArgs {
    /// Pair-mass window "LO:HI" in GeV.
    #[arg(long)]
    window: String,
    /// Number of simulated dilepton events.
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    collider: ColliderArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct LumiArgs {
    /// Pair-mass range "LO:HI" in GeV.
    #[arg(long)]
    window: String,
    /// Number of mass points (an "NxM" grid uses N).
    #[arg(long, default_value = "25")]
    grid: String,
    #[command(flatten)]
    collider: ColliderArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum BeamOpt {
    Pp,
    Ppbar,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatOpt {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ChannelOpt {
    /// Quark-antiquark annihilation.
    Qq,
    /// Gluon fusion.
    Gg,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WindowKind {
    Auto,
    Threshold,
    HighPt,
}

enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnsupportedFormat(_) | Error::FlavorUnavailable(_) => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::ScanMap(a) => cmd_scan_map(a),
        Cmd::Observables(a) => cmd_observables(a),
        Cmd::Critical(a) => cmd_critical(a),
        Cmd::Tomography(a) => cmd_tomography(a),
        Cmd::Luminosity(a) => cmd_luminosity(a),
    }
}

// ---------------------------------------------------------------------
// Option parsing helpers

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = s.split('x').collect();
    let parse = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("invalid grid component {p:?}")))
    };
    let (n, m) = match parts.as_slice() {
        [n] => {
            let n = parse(n)?;
            (n, n)
        }
        [n, m] => (parse(n)?, parse(m)?),
        _ => return Err(usage(format!("invalid grid {s:?}, expected N or NxM"))),
    };
    if n < 2 || m < 2 {
        return Err(usage(format!("grid {s:?} too small, resolutions must be >= 2")));
    }
    Ok((n, m))
}

fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("invalid window {s:?}, expected LO:HI")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| usage(format!("invalid window edge {lo:?}")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| usage(format!("invalid window edge {hi:?}")))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(usage(format!("window {s:?} must satisfy LO < HI")));
    }
    Ok((lo, hi))
}

fn parse_q_scale(s: &str) -> Result<QScaleRule, CliError> {
    match s {
        "mtt" => Ok(QScaleRule::Mtt),
        "mtt/2" => Ok(QScaleRule::MttHalf),
        _ => {
            if let Some(v) = s.strip_prefix("fixed:") {
                let q: f64 = v
                    .parse()
                    .map_err(|_| usage(format!("invalid fixed scale {v:?}")))?;
                if !(q.is_finite() && q > 0.0) {
                    return Err(usage(format!("fixed scale {v:?} must be positive")));
                }
                Ok(QScaleRule::Fixed(q))
            } else {
                Err(usage(format!(
                    "invalid q-scale {s:?}, expected mtt, mtt/2, or fixed:GEV"
                )))
            }
        }
    }
}

fn load_pdf(spec: &str) -> Result<Arc<dyn Pdf>, CliError> {
    if spec == "toy-v1" {
        return Ok(Arc::new(ToyPdf::default()));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| CliError::Data(format!("cannot read pdf grid {spec:?}: {e}")))?;
    let name = Path::new(spec)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_owned());
    let grid = parse_lhagrid(&text)?
        .with_interpolation(Interp::Bicubic)
        .with_name(&name);
    Ok(Arc::new(grid))
}

fn collider_config(a: &ColliderArgs) -> Result<ColliderConfig, CliError> {
    collider_config_at(a, a.sqrt_s)
}

fn collider_config_at(a: &ColliderArgs, sqrt_s: f64) -> Result<ColliderConfig, CliError> {
    let beam = match a.beam {
        BeamOpt::Pp => Beam::Pp,
        BeamOpt::Ppbar => Beam::Ppbar,
    };
    let q_scale = parse_q_scale(&a.q_scale)?;
    let pdf = load_pdf(&a.pdf)?;
    Ok(ColliderConfig::new(
        beam, sqrt_s, a.mtop, a.alpha_s, q_scale, pdf,
    )?)
}

fn beam_label(a: &ColliderArgs) -> &'static str {
    match a.beam {
        BeamOpt::Pp => "pp",
        BeamOpt::Ppbar => "ppbar",
    }
}

// ---------------------------------------------------------------------
// Output plumbing

/// A cell of an output table. NaN marks absent values ("nan" in CSV,
/// null in JSON).
#[derive(Clone)]
enum Cell {
    F(f64),
    I(i64),
    S(&'static str),
}

struct Table {
    command: &'static str,
    meta: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

/// 9 significant digits, locale-free; stable across runs.
fn fmt9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

/// Round to the printed 9-digit value so JSON and CSV agree.
fn round9(x: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}").parse().ok()
}

impl Table {
    fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    s.push(',');
                }
                first = false;
                match cell {
                    Cell::F(x) => s.push_str(&fmt9(*x)),
                    Cell::I(i) => {
                        let _ = write!(s, "{i}");
                    }
                    Cell::S(t) => s.push_str(t),
                }
            }
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> String {
        use serde_json::{json, Map, Number, Value};
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert((*k).to_owned(), Value::String(v.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Cell::F(x) => round9(*x)
                                .and_then(Number::from_f64)
                                .map(Value::Number)
                                .unwrap_or(Value::Null),
                            Cell::I(i) => Value::Number((*i).into()),
                            Cell::S(t) => Value::String((*t).to_owned()),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "meta": Value::Object(meta),
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    fn write(&self, out: &OutArgs) -> Result<(), CliError> {
        let body = match out.format {
            FormatOpt::Csv => self.to_csv(),
            FormatOpt::Json => self.to_json(),
        };
        write_atomic(&out.out, body.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| CliError::Data(format!("cannot write {path:?}: {e}")))?;
    Ok(())
}

fn common_meta(a: &ColliderArgs, cfg: &ColliderConfig) -> Vec<(&'static str, String)> {
    vec![
        ("beam", beam_label(a).to_owned()),
        ("sqrt_s", fmt9(a.sqrt_s)),
        ("m_top", fmt9(a.mtop)),
        ("alpha_s", fmt9(a.alpha_s)),
        ("q_scale", a.q_scale.clone()),
        ("pdf", cfg.pdf.name().to_owned()),
    ]
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

// ---------------------------------------------------------------------
// scan-map

enum ScanMode {
    Channel(PartonChannel),
    FixedMixture(f64),
    LumiMixture,
}

fn cmd_scan_map(a: ScanArgs) -> Result<(), CliError> {
    let (nb, nt) = parse_grid(&a.grid)?;
    if !(a.beta_max > 0.0 && a.beta_max < 1.0) {
        return Err(usage("beta-max must lie in (0, 1)"));
    }
    let mode = match (&a.channel, &a.mixture) {
        (Some(ChannelOpt::Qq), None) => ScanMode::Channel(PartonChannel::QqBar),
        (Some(ChannelOpt::Gg), None) => ScanMode::Channel(PartonChannel::Gg),
        (None, Some(m)) if m == "lumi" => ScanMode::LumiMixture,
        (None, Some(m)) => {
            let w: f64 = m
                .parse()
                .map_err(|_| usage(format!("invalid mixture {m:?}, expected lumi or a weight")))?;
            if !(0.0..=1.0).contains(&w) {
                return Err(usage("mixture weight must lie in [0, 1]"));
            }
            ScanMode::FixedMixture(w)
        }
        (None, None) => return Err(usage("scan-map needs --channel or --mixture")),
        _ => unreachable!("clap conflicts_with"),
    };

    // The luminosity mixture needs the collider; the other modes only
    // use the top mass.
    let cfg = match mode {
        ScanMode::LumiMixture => Some(collider_config(&a.collider)?),
        _ => None,
    };
    let m_top = a.collider.mtop;
    let tol = Tolerances::default();

    // Velocity rows: for the luminosity mixture the pair mass must stay
    // below the collider energy.
    let beta_hi = match &cfg {
        Some(c) => {
            let cap = spinpair::production::beta_of_mass(0.9999 * c.sqrt_s, m_top)
                .map_err(CliError::from)?;
            a.beta_max.min(cap)
        }
        None => a.beta_max,
    };
    let betas = linspace(0.0, beta_hi, nb);
    let thetas = linspace(0.0, std::f64::consts::PI, nt);

    let mode_label = match mode {
        ScanMode::Channel(PartonChannel::QqBar) => "qq".to_owned(),
        ScanMode::Channel(PartonChannel::Gg) => "gg".to_owned(),
        ScanMode::FixedMixture(w) => format!("fixed:{}", fmt9(w)),
        ScanMode::LumiMixture => "lumi".to_owned(),
    };

    let rows: Vec<Vec<Cell>> = betas
        .par_iter()
        .map(|&beta| -> Result<Vec<Vec<Cell>>, Error> {
            // Luminosities depend on beta only.
            let lumis = match &cfg {
                Some(c) => {
                    let m = spinpair::production::mass_of_beta(beta, m_top);
                    Some((
                        luminosity(c, PartonChannel::QqBar, m)?,
                        luminosity(c, PartonChannel::Gg, m)?,
                    ))
                }
                None => None,
            };
            let mut out = Vec::with_capacity(thetas.len());
            for &theta in &thetas {
                let kin = Kinematics::from_beta(m_top, beta, theta.cos())?;
                let c = match &mode {
                    ScanMode::Channel(ch) => pair_state(*ch, &kin)?.c,
                    ScanMode::FixedMixture(w) => {
                        let g = pair_state(PartonChannel::Gg, &kin)?.c;
                        let q = pair_state(PartonChannel::QqBar, &kin)?.c;
                        g * *w + q * (1.0 - *w)
                    }
                    ScanMode::LumiMixture => {
                        let (lq, lg) = lumis.expect("lumi mode computes luminosities");
                        let g = r_coeffs(PartonChannel::Gg, &kin)?;
                        let q = r_coeffs(PartonChannel::QqBar, &kin)?;
                        let at = lq * q.a + lg * g.a;
                        (q.c * lq + g.c * lg) / at
                    }
                };
                let conc = concurrence_unpolarized(&c)?;
                let delta = delta_marker(&c);
                let chsh = chsh_value(&c);
                let (ph_lo, ph_hi, ch_lo, ch_hi) = match &mode {
                    ScanMode::Channel(PartonChannel::Gg) => {
                        let (p1, p2) = critical_beta_ph_gg(theta);
                        let (c1, c2) = critical_beta_ch(PartonChannel::Gg, theta, &tol)
                            .unwrap_or((f64::NAN, f64::NAN));
                        (p1, p2, c1, c2)
                    }
                    ScanMode::Channel(PartonChannel::QqBar) => {
                        let (c1, c2) = critical_beta_ch(PartonChannel::QqBar, theta, &tol)
                            .unwrap_or((f64::NAN, f64::NAN));
                        (0.0, 0.0, c1, c2)
                    }
                    _ => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
                };
                out.push(vec![
                    Cell::F(beta),
                    Cell::F(theta),
                    Cell::F(conc),
                    Cell::F(delta),
                    Cell::F(chsh),
                    Cell::I((conc > 0.0) as i64),
                    Cell::I((chsh > 2.0) as i64),
                    Cell::F(ph_lo),
                    Cell::F(ph_hi),
                    Cell::F(ch_lo),
                    Cell::F(ch_hi),
                ]);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut meta = vec![
        ("mode", mode_label),
        ("grid", format!("{nb}x{nt}")),
        ("beta_max", fmt9(beta_hi)),
        ("m_top", fmt9(m_top)),
    ];
    if let Some(c) = &cfg {
        meta.extend(common_meta(&a.collider, c));
    }
    Table {
        command: "scan-map",
        meta,
        columns: vec![
            "beta",
            "theta",
            "concurrence",
            "delta",
            "chsh",
            "entangled",
            "chsh_violated",
            "beta_c_ph_lo",
            "beta_c_ph_hi",
            "beta_c_ch_lo",
            "beta_c_ch_hi",
        ],
        rows,
    }
    .write(&a.out)
}

// ---------------------------------------------------------------------
// observables

fn cmd_observables(a: ObsArgs) -> Result<(), CliError> {
    let (n, _) = parse_grid(&a.grid)?;
    let (lo, hi) = parse_window(&a.window)?;
    let cfg = collider_config(&a.collider)?;
    let threshold_kind = match a.window_kind {
        WindowKind::Threshold => true,
        WindowKind::HighPt => false,
        WindowKind::Auto => a.collider.beam == BeamOpt::Pp,
    };
    let cuts = linspace(lo, hi, n);

    let rows: Vec<Vec<Cell>> = cuts
        .par_iter()
        .map(|&cut| -> Result<Vec<Cell>, Error> {
            let w = if threshold_kind {
                MassWindow::new(2.0 * cfg.m_top, cut)?
            } else {
                MassWindow::new(cut, cfg.sqrt_s)?
            };
            let mi = mass_integrated_state(&cfg, &w)?;
            let (delta, chsh) = if threshold_kind {
                (mi.delta_axial(), chsh_value(&mi.beam_matrix()))
            } else {
                delta_high_pt(&cfg, cut)?
            };
            Ok(vec![
                Cell::F(cut),
                Cell::F(mi.c_perp),
                Cell::F(mi.c_z),
                Cell::F(mi.d_value()),
                Cell::F(delta),
                Cell::F(chsh / 2.0),
                Cell::F(mi.c_rr),
                Cell::F(mi.c_nn),
                Cell::F(mi.c_kk),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut meta = common_meta(&a.collider, &cfg);
    meta.push((
        "window_kind",
        if threshold_kind { "threshold" } else { "high-pt" }.to_owned(),
    ));
    meta.push(("cut_range", format!("{}:{}", fmt9(lo), fmt9(hi))));
    Table {
        command: "observables",
        meta,
        columns: vec![
            "m_cut", "c_perp", "c_z", "d", "delta", "chsh_half", "c_rr", "c_nn", "c_kk",
        ],
        rows,
    }
    .write(&a.out)
}

// ---------------------------------------------------------------------
// critical

fn cmd_critical(a: CriticalArgs) -> Result<(), CliError> {
    let (n, _) = parse_grid(&a.grid)?;
    let (lo, hi) = parse_window(&a.window)?;
    if lo <= 2.0 * a.collider.mtop {
        return Err(usage("energy range must start above the pair threshold"));
    }
    let energies = geomspace(lo, hi, n);
    let tol = Tolerances::default();

    let beams = [Beam::Pp, Beam::Ppbar];
    let tasks: Vec<(f64, Beam)> = energies
        .iter()
        .flat_map(|&s| beams.iter().map(move |&b| (s, b)))
        .collect();

    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(sqrt_s, beam)| -> Result<Vec<Cell>, CliError> {
            let mut args = ColliderArgs {
                beam: match beam {
                    Beam::Pp => BeamOpt::Pp,
                    Beam::Ppbar => BeamOpt::Ppbar,
                },
                ..clone_collider(&a.collider)
            };
            args.sqrt_s = sqrt_s;
            let cfg = collider_config_at(&args, sqrt_s)?;
            let f_gg = gluon_fraction(&cfg)?;
            let (_, w_gg) = threshold_weights(&cfg)?;
            let ph = critical_or_nan(&cfg, CriticalKind::PeresHorodecki, &tol)?;
            let ch = critical_or_nan(&cfg, CriticalKind::Chsh, &tol)?;
            Ok(vec![
                Cell::F(sqrt_s),
                Cell::S(beam.label()),
                Cell::F(f_gg),
                Cell::F(w_gg),
                Cell::F(ph),
                Cell::F(ch),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut meta = vec![
        ("energy_range", format!("{}:{}", fmt9(lo), fmt9(hi))),
        ("points", n.to_string()),
    ];
    meta.extend(
        common_meta(&a.collider, &collider_config(&a.collider)?)
            .into_iter()
            .filter(|(k, _)| *k != "beam" && *k != "sqrt_s"),
    );
    Table {
        command: "critical",
        meta,
        columns: vec![
            "sqrt_s",
            "beam",
            "f_gg",
            "w_gg_threshold",
            "beta_c_ph",
            "beta_c_ch",
        ],
        rows,
    }
    .write(&a.out)
}

fn clone_collider(a: &ColliderArgs) -> ColliderArgs {
    ColliderArgs {
        beam: a.beam,
        sqrt_s: a.sqrt_s,
        mtop: a.mtop,
        alpha_s: a.alpha_s,
        pdf: a.pdf.clone(),
        q_scale: a.q_scale.clone(),
    }
}

/// NoSignature is a value here (no entangled or violating window exists
/// at this energy), not a failure.
fn critical_or_nan(
    cfg: &ColliderConfig,
    kind: CriticalKind,
    tol: &Tolerances,
) -> Result<f64, CliError> {
    match critical_beta_vs_energy(cfg, kind, tol) {
        Ok(b) => Ok(b),
        Err(Error::NoSignature) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------
// tomography

fn cmd_tomography(a: TomoArgs) -> Result<(), CliError> {
    if a.out.format == FormatOpt::Csv {
        return Err(usage("tomography reports are JSON; pass --format json"));
    }
    let (lo, hi) = parse_window(&a.window)?;
    let cfg = collider_config(&a.collider)?;
    let w = MassWindow::new(lo, hi)?;
    let report = tomography_report(&cfg, &w, a.n, a.seed)?;
    let mut doc: serde_json::Value =
        serde_json::from_str(&report.to_json()).expect("report round-trips");
    round_numbers(&mut doc);
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_atomic(&a.out.out, text.as_bytes())
}

/// Round every fractional number in place to the printed 9-digit value;
/// integers pass through.
fn round_numbers(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) => {
            if !n.is_u64() && !n.is_i64() {
                if let Some(x) = n.as_f64() {
                    *v = round9(x)
                        .and_then(serde_json::Number::from_f64)
                        .map(Value::Number)
                        .unwrap_or(Value::Null);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

// ---------------------------------------------------------------------
// luminosity

fn cmd_luminosity(a: LumiArgs) -> Result<(), CliError> {
    let (n, _) = parse_grid(&a.grid)?;
    let (lo, hi) = parse_window(&a.window)?;
    let cfg = collider_config(&a.collider)?;
    let masses = linspace(lo, hi, n);

    let rows: Vec<Vec<Cell>> = masses
        .par_iter()
        .map(|&m| -> Result<Vec<Cell>, Error> {
            let l_qq = luminosity(&cfg, PartonChannel::QqBar, m)?;
            let l_gg = luminosity(&cfg, PartonChannel::Gg, m)?;
            let (w_qq, w_gg) = channel_weights(&cfg, m)?;
            Ok(vec![
                Cell::F(m),
                Cell::F(l_qq),
                Cell::F(l_gg),
                Cell::F(w_qq),
                Cell::F(w_gg),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut meta = common_meta(&a.collider, &cfg);
    meta.push(("mass_range", format!("{}:{}", fmt9(lo), fmt9(hi))));
    Table {
        command: "luminosity",
        meta,
        columns: vec!["m_tt", "l_qq", "l_gg", "w_qq", "w_gg"],
        rows,
    }
    .write(&a.out)
}
