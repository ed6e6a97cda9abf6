#![allow(clippy::excessive_precision)]

use serde::Serialize;

use super::QuadratureConfig;
use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule. Abscissae are
// listed from the outside in; odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_292_626_630,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub err_est: f64,
    pub subintervals: usize,
    pub evaluations: usize,
    /// Truncation point of a semi-infinite range, if one was chosen.
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("integrand is not finite at x = {x} ({v})")))
        }
    };

    let f_center = eval(center)?;
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let value = res_kronrod * half;
    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * scale, res_asc * scale);
    Ok(Segment { lo, hi, value, err })
}

/// Adaptive Gauss-Kronrod integration of `f` over `[lo, hi]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed error drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate_finite<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!(
            "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }

    let mut segments = vec![kronrod21(&mut f, lo, hi)?];
    let mut evaluations = 21;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.err).sum();
        if err <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                err_est: err,
                subintervals: segments.len(),
                evaluations,
                cutoff: None,
            });
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                best: value,
                err_est: err,
            });
        }

        let (worst, _) =
            segments.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, s)| if s.err > acc.1 { (i, s.err) } else { acc },
            );
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // interval cannot be split any further in floating point
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (roundoff)",
                best: value,
                err_est: err,
            });
        }
        segments.push(kronrod21(&mut f, seg.lo, mid)?);
        segments.push(kronrod21(&mut f, mid, seg.hi)?);
        evaluations += 42;
    }
}

const MAX_CUTOFF: f64 = 1e12;

/// Integrates `f` over `[0, inf)`.
///
/// `tail_mass(W)` must bound `∫_W^∞ |f|` and decrease to zero. The range is
/// cut at the smallest `W` (to within a bisection tolerance) whose tail mass
/// is at most `cfg.tail_cut_tol`; that mass is added to the error estimate.
pub fn integrate_semi_infinite<F, T>(f: F, tail_mass: T, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
    T: Fn(f64) -> f64,
{
    cfg.validate()?;
    let ok = |w: f64| {
        let t = tail_mass(w);
        t.is_finite() && t <= cfg.tail_cut_tol
    };

    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > MAX_CUTOFF {
            return Err(Error::NonConvergence {
                what: "tail cutoff search",
                best: f64::NAN,
                err_est: tail_mass(MAX_CUTOFF),
            });
        }
    }
    let mut lo = 0.5 * hi;
    if hi > 1.0 {
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-3 * hi {
                break;
            }
        }
    }

    let cutoff = hi;
    let tail = tail_mass(cutoff).max(0.0);
    let mut q = integrate_finite(f, 0.0, cutoff, cfg)?;
    q.err_est += tail;
    q.cutoff = Some(cutoff);
    Ok(q)
}
