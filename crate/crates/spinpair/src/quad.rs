//! Numerical quadrature and root finding.
//!
//! Three tools: an adaptive integrator built on the 15-point
//! Gauss-Kronrod pair (largest-error-first subdivision), a fixed 64-node
//! Gauss-Legendre rule for smooth angular averages, and bracketed
//! bisection for critical-boundary roots.

use crate::error::Error;
use crate::Result;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/* 15-point Kronrod abscissae; even indices interleave the embedded
7-point Gauss rule. Standard QUADPACK values. */
#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod evaluation on `[a, b]`: returns (integral, error bound).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = WG7[3] * f_center;
    let mut res_kronrod = WGK15[7] * f_center;
    let mut fv = [0.0f64; 15];
    fv[7] = f_center;

    for j in 0..7 {
        let x = half * XGK15[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        res_kronrod += WGK15[j] * (f1 + f2);
        if j % 2 == 1 {
            res_gauss += WG7[j / 2] * (f1 + f2);
        }
    }

    // resasc-style error scaling as in QUADPACK: compare against the mean
    // to keep the estimate meaningful for integrands with large offsets.
    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK15[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK15[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    res_asc *= half.abs();

    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    let err = if res_asc != 0.0 && raw_err != 0.0 {
        res_asc * (200.0 * raw_err / res_asc).powf(1.5).min(1.0)
    } else {
        raw_err
    };
    (res_kronrod * half, err)
}

#[derive(PartialEq)]
struct Segment {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl Eq for Segment {}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Splits the interval with the largest error estimate until the summed
/// error drops below `max(rel_tol * |integral|, abs_floor)` or the
/// subdivision budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    max_subdiv: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (val, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, a, b, val });
    let mut total = val;
    let mut total_err = err;

    for _ in 0..max_subdiv {
        if total_err <= (rel_tol * total.abs()).max(abs_floor) {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap nonempty while error positive");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            a: worst.a,
            b: mid,
            val: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: worst.b,
            val: v2,
        });
    }

    if total_err <= (rel_tol * total.abs()).max(abs_floor.max(1e-14 * total.abs())) {
        Ok(total)
    } else {
        Err(Error::QuadratureFailure {
            estimate: total,
            error: total_err,
        })
    }
}

/// Adaptive integration with the crate-default budget (rel 1e-6,
/// abs floor 1e-30, 2000 subdivisions).
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, 1e-6, 1e-30, 2000)
}

/// High-accuracy variant for oracle comparisons (rel 1e-12).
pub fn integrate_tight<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, 1e-12, 1e-300, 4000)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
        if 2 * (i + 1) <= n {
            out.push((x, w));
        }
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// Legendre P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The fixed 64-node rule used by the angular averages.
pub fn gl64() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| gauss_legendre(64))
}

/// Mean of `f` over `x in [-1, 1]` with the 64-node rule (weight 1/2).
pub fn gl64_mean<F: Fn(f64) -> f64>(f: F) -> f64 {
    0.5 * gl64().iter().map(|&(x, w)| w * f(x)).sum::<f64>()
}

/// Bracketed bisection: root of `f` in `[a, b]` where `f(a)` and `f(b)`
/// have opposite signs, to absolute tolerance `tol` in the abscissa.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRootInBracket);
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan `[a, b]` with `n` uniform steps and return every bracket
/// `(x_i, x_{i+1})` across which `f` changes sign.
pub fn sign_change_brackets<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let step = (b - a) / n as f64;
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = a + step * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            out.push((x_prev, x_prev));
        } else if fx != 0.0 && fx.signum() != f_prev.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_default(|x| 3.0 * x * x, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn known_transcendental_integrals() {
        let v = integrate_default(|x| x.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-9);
        let v = integrate_tight(|x| (-x).exp(), 0.0, 30.0).unwrap();
        assert_abs_diff_eq!(v, 1.0 - (-30.0f64).exp(), epsilon = 1e-11);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // 1/sqrt(x) over (0,1] = 2; adaptive refinement handles the edge
        let v = integrate(|x| x.sqrt().recip(), 1e-12, 1.0, 1e-8, 1e-30, 2000).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(integrate_default(|x| x, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gl64_matches_closed_forms() {
        // even polynomial, trig, and a rational with a mild peak
        assert_abs_diff_eq!(gl64_mean(|x| x * x), 1.0 / 3.0, epsilon = 1e-14);
        let mean_cos = gl64_mean(|x| x.cos());
        assert_abs_diff_eq!(mean_cos, 1.0f64.sin(), epsilon = 1e-14);
        let mean_rat = gl64_mean(|x| 1.0 / (1.0 + 0.9 * x * x));
        let exact = (0.9f64.sqrt()).atan() / 0.9f64.sqrt();
        assert_abs_diff_eq!(mean_rat, exact, epsilon = 1e-13);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [4usize, 16, 64] {
            let s: f64 = gauss_legendre(n).iter().map(|&(_, w)| w).sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn bisect_finds_cosine_root() {
        let r = bisect(|x| x.cos(), 0.0, 3.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert_eq!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::NoRootInBracket));
    }

    #[test]
    fn brackets_found_for_cubic() {
        let b = sign_change_brackets(|x| x * (x - 1.0) * (x + 1.0), -2.0, 2.0, 400);
        assert_eq!(b.len(), 3);
    }
}
