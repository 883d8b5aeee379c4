//! Parton distribution grids, luminosities, and channel mixing weights.
//!
//! Grids follow the LHAPDF6 `lhagrid1` member layout and interpolate
//! x·f(x,Q) log-bilinearly (optionally log-bicubically) in (ln x, ln Q²).
//! Luminosities convolve two hadrons' densities at fixed pair mass; the
//! channel weights fold in the angle-averaged production weights, and the
//! gluon fraction additionally integrates over the accessible mass range.

use crate::angular::angular_avg;
use crate::error::Error;
use crate::production::{beta_of_mass, PartonChannel};
use crate::quad;
use crate::Result;
use std::sync::Arc;

/// Quark flavors participating in pair production (PDG ids; no top).
pub const QUARK_FLAVORS: [i32; 5] = [1, 2, 3, 4, 5];

/// PDG id of the gluon; id 0 is accepted as an alias on input.
pub const GLUON_ID: i32 = 21;

/// Read-only access to a parton density, as x·f(x, Q).
pub trait Pdf: Send + Sync {
    /// Momentum density x·f for one flavor. Implementations clamp Q to
    /// their tabulated range and may error below their x floor.
    fn xfx(&self, flavor: i32, x: f64, q: f64) -> Result<f64>;

    /// Smallest supported x (0 when the density is defined on all of
    /// (0, 1]).
    fn x_min(&self) -> f64;

    /// Identifier used in reports and output metadata.
    fn name(&self) -> &str;
}

/// Interpolation order applied to a parsed grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Bilinear in (ln x, ln Q²); the default.
    Bilinear,
    /// Cubic Hermite in both log variables, finite-difference slopes.
    Bicubic,
}

/// Tabulated parton distribution member.
#[derive(Debug, Clone)]
pub struct PdfGrid {
    x_knots: Vec<f64>,
    q_knots: Vec<f64>,
    flavor_ids: Vec<i32>,
    /// x·f values, index = (ix * nq + iq) * nflav + ifl.
    values: Vec<f64>,
    ln_x: Vec<f64>,
    ln_q: Vec<f64>,
    interp: Interp,
    freeze_below_floor: bool,
    clamp_negative: bool,
    name: String,
}

impl PdfGrid {
    pub fn x_knots(&self) -> &[f64] {
        &self.x_knots
    }

    pub fn q_knots(&self) -> &[f64] {
        &self.q_knots
    }

    pub fn flavor_ids(&self) -> &[i32] {
        &self.flavor_ids
    }

    /// Evaluate x·f below the lowest x knot as its value at the knot
    /// instead of erroring.
    pub fn with_freeze_below_floor(mut self, on: bool) -> Self {
        self.freeze_below_floor = on;
        self
    }

    /// Clamp negative tabulated excursions to zero on evaluation.
    pub fn with_clamp_negative(mut self, on: bool) -> Self {
        self.clamp_negative = on;
        self
    }

    pub fn with_interpolation(mut self, interp: Interp) -> Self {
        self.interp = interp;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn flavor_index(&self, flavor: i32) -> Result<usize> {
        let want = if flavor == 0 { GLUON_ID } else { flavor };
        self.flavor_ids
            .iter()
            .position(|&f| {
                let have = if f == 0 { GLUON_ID } else { f };
                have == want
            })
            .ok_or(Error::FlavorUnavailable(flavor))
    }

    fn value(&self, ix: usize, iq: usize, ifl: usize) -> f64 {
        self.values[(ix * self.q_knots.len() + iq) * self.flavor_ids.len() + ifl]
    }

    fn interpolate(&self, ix: usize, iq: usize, wx: f64, wq: f64, ifl: usize) -> f64 {
        match self.interp {
            Interp::Bilinear => {
                (1.0 - wx) * (1.0 - wq) * self.value(ix, iq, ifl)
                    + (1.0 - wx) * wq * self.value(ix, iq + 1, ifl)
                    + wx * (1.0 - wq) * self.value(ix + 1, iq, ifl)
                    + wx * wq * self.value(ix + 1, iq + 1, ifl)
            }
            Interp::Bicubic => {
                // interpolate along q at four x knots, then along x
                let nx = self.x_knots.len();
                let mut xs = [0.0; 4];
                let mut ys = [0.0; 4];
                for (slot, off) in (-1i64..=2).enumerate() {
                    let jx = (ix as i64 + off).clamp(0, nx as i64 - 1) as usize;
                    xs[slot] = self.ln_x[jx];
                    ys[slot] =
                        hermite_1d(&self.ln_q, iq, wq, &|j| self.value(jx, j, ifl));
                }
                let u = self.ln_x[ix] + wx * (self.ln_x[ix + 1] - self.ln_x[ix]);
                hermite_4pt(&xs, &ys, u, wx)
            }
        }
    }
}

/// Cubic Hermite on cell `[knots[i], knots[i+1]]` at local weight `w`,
/// slopes from neighboring divided differences (one-sided at the edges).
fn hermite_1d(knots: &[f64], i: usize, w: f64, value: &dyn Fn(usize) -> f64) -> f64 {
    if w == 0.0 {
        return value(i);
    }
    if w == 1.0 {
        return value(i + 1);
    }
    let n = knots.len();
    let h = knots[i + 1] - knots[i];
    let s = (value(i + 1) - value(i)) / h;
    let d0 = if i == 0 {
        s
    } else {
        let hp = knots[i] - knots[i - 1];
        let sp = (value(i) - value(i - 1)) / hp;
        (h * sp + hp * s) / (h + hp)
    };
    let d1 = if i + 2 >= n {
        s
    } else {
        let hn = knots[i + 2] - knots[i + 1];
        let sn = (value(i + 2) - value(i + 1)) / hn;
        (hn * s + h * sn) / (h + hn)
    };
    hermite_cell(value(i), value(i + 1), d0, d1, h, w)
}

/// Hermite through four (x, y) samples, evaluated on the middle cell
/// `[xs[1], xs[2]]`. `w` is the local weight there; `u` the coordinate.
fn hermite_4pt(xs: &[f64; 4], ys: &[f64; 4], u: f64, w: f64) -> f64 {
    let _ = u;
    if w == 0.0 {
        return ys[1];
    }
    if w == 1.0 {
        return ys[2];
    }
    let h = xs[2] - xs[1];
    let s = (ys[2] - ys[1]) / h;
    let d1 = if xs[0] == xs[1] {
        s
    } else {
        let hp = xs[1] - xs[0];
        let sp = (ys[1] - ys[0]) / hp;
        (h * sp + hp * s) / (h + hp)
    };
    let d2 = if xs[3] == xs[2] {
        s
    } else {
        let hn = xs[3] - xs[2];
        let sn = (ys[3] - ys[2]) / hn;
        (hn * s + h * sn) / (h + hn)
    };
    hermite_cell(ys[1], ys[2], d1, d2, h, w)
}

fn hermite_cell(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + h * d0 * (t3 - 2.0 * t2 + t)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + h * d1 * (t3 - t2)
}

/// Cell index such that `knots[i] <= v < knots[i+1]`, clamped to the
/// valid cells; an exact hit on the last knot lands in the final cell.
fn cell_index(knots: &[f64], v: f64) -> usize {
    let n = knots.len();
    let raw = knots.partition_point(|k| *k <= v);
    raw.saturating_sub(1).min(n - 2)
}

impl Pdf for PdfGrid {
    fn xfx(&self, flavor: i32, x: f64, q: f64) -> Result<f64> {
        let ifl = self.flavor_index(flavor)?;
        let floor = self.x_knots[0];
        if x > 1.0 || (x < floor && !self.freeze_below_floor) || x <= 0.0 {
            return Err(Error::OutOfRange {
                name: "x",
                value: x,
                lo: floor,
                hi: 1.0,
            });
        }
        let x = x.max(floor);
        let q = q.clamp(self.q_knots[0], self.q_knots[self.q_knots.len() - 1]);
        let ix = cell_index(&self.x_knots, x);
        let iq = cell_index(&self.q_knots, q);
        let wx = if x == self.x_knots[ix] {
            0.0
        } else if x == self.x_knots[ix + 1] {
            1.0
        } else {
            (x.ln() - self.ln_x[ix]) / (self.ln_x[ix + 1] - self.ln_x[ix])
        };
        let wq = if q == self.q_knots[iq] {
            0.0
        } else if q == self.q_knots[iq + 1] {
            1.0
        } else {
            (q.ln() - self.ln_q[iq]) / (self.ln_q[iq + 1] - self.ln_q[iq])
        };
        let v = self.interpolate(ix, iq, wx, wq, ifl);
        Ok(if self.clamp_negative { v.max(0.0) } else { v })
    }

    fn x_min(&self) -> f64 {
        if self.freeze_below_floor {
            0.0
        } else {
            self.x_knots[0]
        }
    }

    fn name(&self) -> &str {
        &self.name
    }
}

fn parse_floats(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("expected a number, found {tok:?}"),
            })
        })
        .collect()
}

fn parse_ints(line: &str, lineno: usize) -> Result<Vec<i32>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<i32>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("expected an integer flavor id, found {tok:?}"),
            })
        })
        .collect()
}

fn require_ascending(knots: &[f64], what: &str, lineno: usize) -> Result<()> {
    if knots.is_empty() {
        return Err(Error::Parse {
            line: lineno,
            message: format!("empty {what} knot list"),
        });
    }
    if knots.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse {
            line: lineno,
            message: format!("non-finite {what} knot"),
        });
    }
    if knots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            line: lineno,
            message: format!("{what} knots not strictly ascending"),
        });
    }
    Ok(())
}

/// Parse one LHAPDF6 `lhagrid1` member: a `Key: value` header closed by
/// `---`, then one or more subgrid blocks (x knots, Q knots, flavor ids,
/// x-major value rows), each closed by `---`. Subgrids are merged along
/// Q with duplicate boundary knots collapsed.
pub fn parse_lhagrid(text: &str) -> Result<PdfGrid> {
    let mut lines = text.lines().enumerate().peekable();

    let mut format_key: Option<String> = None;
    loop {
        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "unterminated header: missing ---".into(),
        })?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed == "---" {
            break;
        }
        if trimmed.is_empty() {
            continue;
        }
        let (key, value) = trimmed.split_once(':').ok_or(Error::Parse {
            line: lineno,
            message: "header line is not 'Key: value'".into(),
        })?;
        if key.trim() == "Format" {
            format_key = Some(value.trim().to_string());
        }
    }
    match format_key.as_deref() {
        Some("lhagrid1") => {}
        Some(other) => return Err(Error::UnsupportedFormat(other.to_string())),
        None => return Err(Error::UnsupportedFormat("(missing Format key)".into())),
    }

    let mut x_knots: Option<Vec<f64>> = None;
    let mut flavor_ids: Option<Vec<i32>> = None;
    let mut q_knots: Vec<f64> = Vec::new();
    // per flavor-major row chunks keyed by (ix, global iq)
    let mut value_rows: Vec<Vec<f64>> = Vec::new();

    while lines.peek().is_some() {
        // skip trailing blank lines after the final block
        while matches!(lines.peek(), Some((_, l)) if l.trim().is_empty()) {
            lines.next();
        }
        if lines.peek().is_none() {
            break;
        }
        let (idx, line) = lines.next().unwrap();
        let xs = parse_floats(line, idx + 1)?;
        require_ascending(&xs, "x", idx + 1)?;
        if *xs.last().unwrap() > 1.0 || xs[0] <= 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                message: "x knots must lie in (0, 1]".into(),
            });
        }
        match &x_knots {
            None => x_knots = Some(xs.clone()),
            Some(prev) if *prev == xs => {}
            Some(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "subgrid x knots differ from the first block".into(),
                })
            }
        }

        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: idx + 2,
            message: "missing Q knot line".into(),
        })?;
        let qs = parse_floats(line, idx + 1)?;
        require_ascending(&qs, "Q", idx + 1)?;
        if qs[0] <= 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                message: "Q knots must be positive".into(),
            });
        }
        let mut skip_first_q = false;
        if let Some(&last) = q_knots.last() {
            if qs[0] == last {
                skip_first_q = true;
            } else if qs[0] < last {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "subgrid Q ranges overlap".into(),
                });
            }
        }

        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: idx + 2,
            message: "missing flavor id line".into(),
        })?;
        let flavors = parse_ints(line, idx + 1)?;
        if flavors.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                message: "empty flavor list".into(),
            });
        }
        match &flavor_ids {
            None => flavor_ids = Some(flavors.clone()),
            Some(prev) if *prev == flavors => {}
            Some(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "subgrid flavor ids differ from the first block".into(),
                })
            }
        }

        let nx = x_knots.as_ref().unwrap().len();
        let nq_block = qs.len();
        let nf = flavors.len();
        // collect this block's rows, x-major
        let mut block_rows: Vec<Vec<f64>> = Vec::with_capacity(nx * nq_block);
        for row in 0..nx * nq_block {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: idx + 2 + row,
                message: format!(
                    "value table truncated: expected {} rows, found {row}",
                    nx * nq_block
                ),
            })?;
            let lineno = idx + 1;
            if line.trim() == "---" {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!(
                        "value table truncated: expected {} rows, found {row}",
                        nx * nq_block
                    ),
                });
            }
            let vals = parse_floats(line, lineno)?;
            if vals.len() != nf {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {nf} columns, found {}", vals.len()),
                });
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line: lineno,
                    message: "non-finite value".into(),
                });
            }
            block_rows.push(vals);
        }
        match lines.next() {
            Some((_, l)) if l.trim() == "---" => {}
            Some((idx, _)) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected --- after subgrid value table".into(),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    message: "missing --- after final subgrid".into(),
                })
            }
        }

        // merge into the global table: rows arrive as ix-major, iq-minor
        let offset = q_knots.len();
        let keep = if skip_first_q { 1..nq_block } else { 0..nq_block };
        let mut merged: Vec<Vec<f64>> = Vec::with_capacity(nx * (q_knots.len() + keep.len()));
        for ix in 0..nx {
            for iq in 0..offset {
                merged.push(std::mem::take(&mut value_rows[ix * offset + iq]));
            }
            for iq in keep.clone() {
                merged.push(block_rows[ix * nq_block + iq].clone());
            }
        }
        value_rows = merged;
        q_knots.extend_from_slice(&qs[if skip_first_q { 1 } else { 0 }..]);
    }

    let x_knots = x_knots.ok_or(Error::Parse {
        line: 0,
        message: "no subgrid blocks found".into(),
    })?;
    let flavor_ids = flavor_ids.unwrap();
    let values: Vec<f64> = value_rows.into_iter().flatten().collect();
    debug_assert_eq!(values.len(), x_knots.len() * q_knots.len() * flavor_ids.len());
    let ln_x = x_knots.iter().map(|v| v.ln()).collect();
    let ln_q = q_knots.iter().map(|v| v.ln()).collect();
    Ok(PdfGrid {
        x_knots,
        q_knots,
        flavor_ids,
        values,
        ln_x,
        ln_q,
        interp: Interp::Bilinear,
        freeze_below_floor: false,
        clamp_negative: false,
        name: "lhagrid1".into(),
    })
}

/// Built-in analytic density for hermetic tests: Q-independent,
/// `x·f_g = a_g (1-x)^5` and `x·f_q = a_q sqrt(x) (1-x)^3` for each of
/// the five flavors and antiflavors.
#[derive(Debug, Clone, Copy)]
pub struct ToyPdf {
    pub a_g: f64,
    pub a_q: f64,
}

/// Constants of the built-in `toy-v1` density.
pub const TOY_V1: ToyPdf = ToyPdf { a_g: 3.0, a_q: 0.5 };

impl Default for ToyPdf {
    fn default() -> Self {
        TOY_V1
    }
}

impl Pdf for ToyPdf {
    fn xfx(&self, flavor: i32, x: f64, _q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || x == 0.0 {
            return Err(Error::OutOfRange {
                name: "x",
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let one = 1.0 - x;
        match flavor {
            0 | GLUON_ID => Ok(self.a_g * one.powi(5)),
            f if QUARK_FLAVORS.contains(&f.abs()) => Ok(self.a_q * x.sqrt() * one.powi(3)),
            f => Err(Error::FlavorUnavailable(f)),
        }
    }

    fn x_min(&self) -> f64 {
        0.0
    }

    fn name(&self) -> &str {
        "toy-v1"
    }
}

/// Colliding-hadron arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beam {
    Pp,
    Ppbar,
}

impl Beam {
    pub fn label(self) -> &'static str {
        match self {
            Beam::Pp => "pp",
            Beam::Ppbar => "ppbar",
        }
    }
}

/// Factorization-scale choice for density evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QScaleRule {
    /// Q = m_tt.
    Mtt,
    /// Q = m_tt / 2.
    MttHalf,
    /// Fixed Q in GeV.
    Fixed(f64),
}

impl QScaleRule {
    pub fn q_for(self, m_tt: f64) -> f64 {
        match self {
            QScaleRule::Mtt => m_tt,
            QScaleRule::MttHalf => 0.5 * m_tt,
            QScaleRule::Fixed(q) => q,
        }
    }
}

/// Collider run configuration: beams, energy, couplings, and the parton
/// density used for both hadrons.
#[derive(Clone)]
pub struct ColliderConfig {
    pub beam: Beam,
    pub sqrt_s: f64,
    pub m_top: f64,
    pub alpha_s: f64,
    pub q_scale: QScaleRule,
    pub pdf: Arc<dyn Pdf>,
}

impl ColliderConfig {
    pub fn new(
        beam: Beam,
        sqrt_s: f64,
        m_top: f64,
        alpha_s: f64,
        q_scale: QScaleRule,
        pdf: Arc<dyn Pdf>,
    ) -> Result<Self> {
        if !(m_top > 0.0) {
            return Err(Error::Domain {
                name: "m_top",
                value: m_top,
            });
        }
        if !(sqrt_s > 2.0 * m_top) {
            return Err(Error::OutOfRange {
                name: "sqrt_s",
                value: sqrt_s,
                lo: 2.0 * m_top,
                hi: f64::INFINITY,
            });
        }
        if !(alpha_s > 0.0) {
            return Err(Error::Domain {
                name: "alpha_s",
                value: alpha_s,
            });
        }
        if let QScaleRule::Fixed(q) = q_scale {
            if !(q > 0.0) {
                return Err(Error::Domain { name: "q", value: q });
            }
        }
        Ok(ColliderConfig {
            beam,
            sqrt_s,
            m_top,
            alpha_s,
            q_scale,
            pdf,
        })
    }

    /// Flavor content of the second hadron: an antiproton swaps
    /// partons with antipartons.
    fn second_hadron_flavor(&self, flavor: i32) -> i32 {
        match self.beam {
            Beam::Pp => flavor,
            Beam::Ppbar => {
                if flavor == GLUON_ID || flavor == 0 {
                    flavor
                } else {
                    -flavor
                }
            }
        }
    }
}

/// Parton luminosity of one channel at pair mass `m_tt`:
/// `L = sum over flavor pairings of (2x/sqrt_s) * int dt/t N(xt) N(x/t)`
/// with `x = m_tt / sqrt_s`, integrated in ln t.
pub fn luminosity(cfg: &ColliderConfig, ch: PartonChannel, m_tt: f64) -> Result<f64> {
    let threshold = 2.0 * cfg.m_top;
    if m_tt < threshold {
        return Err(Error::BelowThreshold { m_tt, threshold });
    }
    if m_tt > cfg.sqrt_s {
        return Err(Error::AboveEnergy {
            m_tt,
            sqrt_s: cfg.sqrt_s,
        });
    }
    let x = m_tt / cfg.sqrt_s;
    if x >= 1.0 {
        return Ok(0.0);
    }
    let q = cfg.q_scale.q_for(m_tt);
    // momentum arguments range over [x^2, 1]
    let floor = cfg.pdf.x_min();
    if floor > x * x * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x * x,
            lo: floor,
            hi: 1.0,
        });
    }
    let pairs: Vec<(i32, i32)> = match ch {
        PartonChannel::Gg => vec![(GLUON_ID, cfg.second_hadron_flavor(GLUON_ID))],
        PartonChannel::QqBar => {
            let mut v = Vec::with_capacity(10);
            for fl in QUARK_FLAVORS {
                v.push((fl, cfg.second_hadron_flavor(-fl)));
                v.push((-fl, cfg.second_hadron_flavor(fl)));
            }
            v
        }
    };
    // probe once so flavor errors surface before integration
    for &(f1, f2) in &pairs {
        cfg.pdf.xfx(f1, x, q)?;
        cfg.pdf.xfx(f2, x, q)?;
    }
    let density = |flavor: i32, u: f64| -> f64 {
        let u = u.clamp(floor.max(f64::MIN_POSITIVE), 1.0);
        cfg.pdf.xfx(flavor, u, q).expect("arguments pre-validated") / u
    };
    let ln_x = x.ln();
    let integral = quad::integrate(
        |s: f64| {
            let u1 = x * s.exp();
            let u2 = x * (-s).exp();
            pairs.iter().map(|&(f1, f2)| density(f1, u1) * density(f2, u2)).sum()
        },
        ln_x,
        -ln_x,
        1e-6,
        1e-30,
        2000,
    )?;
    Ok(2.0 * x / cfg.sqrt_s * integral)
}

/// Relative production probabilities of the two channels at fixed pair
/// mass: luminosity times angle-averaged weight, normalized to one.
pub fn channel_weights(cfg: &ColliderConfig, m_tt: f64) -> Result<(f64, f64)> {
    let beta = beta_of_mass(m_tt, cfg.m_top)?;
    let l_qq = luminosity(cfg, PartonChannel::QqBar, m_tt)?;
    let l_gg = luminosity(cfg, PartonChannel::Gg, m_tt)?;
    let r_qq = l_qq * angular_avg(PartonChannel::QqBar, beta)?.a_tilde;
    let r_gg = l_gg * angular_avg(PartonChannel::Gg, beta)?.a_tilde;
    let sum = r_qq + r_gg;
    if !(sum > 0.0) {
        return Err(Error::DegenerateNormalization { a: sum });
    }
    Ok((r_qq / sum, r_gg / sum))
}

/// Fraction of the total pair yield produced by gluon fusion, integrated
/// over the full accessible mass range.
pub fn gluon_fraction(cfg: &ColliderConfig) -> Result<f64> {
    let spectrum = |ch: PartonChannel| -> Result<f64> {
        mass_spectrum_integral(cfg, 2.0 * cfg.m_top, cfg.sqrt_s, |m, beta| {
            let l = luminosity(cfg, ch, m)?;
            Ok(l * angular_avg(ch, beta)?.a_tilde)
        })
    };
    let n_gg = spectrum(PartonChannel::Gg)?;
    let n_qq = spectrum(PartonChannel::QqBar)?;
    let sum = n_gg + n_qq;
    if !(sum > 0.0) {
        return Err(Error::DegenerateNormalization { a: sum });
    }
    Ok(n_gg / sum)
}

/// Integrate `beta/M^2 * weight(M, beta)` over a mass range; the common
/// factor of the differential pair yield. Endpoint panels are split off
/// to tame the threshold square-root behavior.
pub fn mass_spectrum_integral(
    cfg: &ColliderConfig,
    lo: f64,
    hi: f64,
    weight: impl Fn(f64, f64) -> Result<f64>,
) -> Result<f64> {
    let f = |m: f64| -> f64 {
        let beta = beta_of_mass(m, cfg.m_top).unwrap_or(0.0);
        match weight(m, beta) {
            Ok(w) => beta * w / (m * m),
            Err(_) => f64::NAN,
        }
    };
    let hi = hi.min(cfg.sqrt_s);
    if !(hi > lo) {
        return Err(Error::EmptyWindow);
    }
    // refine the threshold edge where d(beta)/dM diverges
    let edge = (lo + (hi - lo).min(4.0)).min(hi);
    let head = quad::integrate(f, lo, edge, 1e-6, 1e-30, 2000)?;
    let tail = if edge < hi {
        quad::integrate(f, edge, hi, 1e-6, 1e-30, 2000)?
    } else {
        0.0
    };
    let total = head + tail;
    if !total.is_finite() {
        return Err(Error::QuadratureFailure {
            estimate: total,
            error: f64::NAN,
        });
    }
    Ok(total)
}
