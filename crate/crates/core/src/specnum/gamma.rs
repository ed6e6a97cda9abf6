use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const FPMIN: f64 = f64::MIN_POSITIVE / EPS;
const MAX_ITER: usize = 100_000;

/// Shift point for the asymptotic expansions below.
const ASYMPTOTIC_FROM: f64 = 10.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k - 1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `B_{2k} / (2k)` for k = 1..7.
const PSI_ASYM: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

/// `B_{2k}` for k = 1..7.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} requires a positive finite argument, got {x}"
        )))
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(ln_gamma(x))
}

/// Returns `(y, ln prod_{i<k} (x + i))` with `y = x + k >= ASYMPTOTIC_FROM`.
fn shift_up(x: f64) -> (f64, f64) {
    if x >= ASYMPTOTIC_FROM {
        return (x, 0.0);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < ASYMPTOTIC_FROM {
        prod *= y;
        y += 1.0;
    }
    (y, prod.ln())
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    let (y, ln_shift) = shift_up(x);
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        corr += c * pow;
        pow *= inv2;
    }
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + corr - ln_shift
}

/// Digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut y = x;
    let mut acc = 0.0;
    while y < ASYMPTOTIC_FROM {
        acc -= 1.0 / y;
        y += 1.0;
    }
    Ok(acc + y.ln() - log_minus_digamma_asym(y))
}

/// Trigamma function `psi'(x)` for `x > 0`; used by the Newton step of the gamma fit.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut y = x;
    let mut acc = 0.0;
    while y < ASYMPTOTIC_FROM {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = inv + 0.5 * inv2;
    let mut pow = inv2 * inv;
    for b in BERNOULLI {
        series += b * pow;
        pow *= inv2;
    }
    Ok(acc + series)
}

/// `ln y - psi(y)` by its asymptotic series, valid for `y >= ASYMPTOTIC_FROM`.
fn log_minus_digamma_asym(y: f64) -> f64 {
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut s = 0.5 * inv;
    let mut pow = inv2;
    for c in PSI_ASYM {
        s += c * pow;
        pow *= inv2;
    }
    s
}

/// `ln x - psi(x)` without the cancellation of subtracting two large numbers.
pub(crate) fn log_minus_digamma(x: f64) -> f64 {
    if x >= ASYMPTOTIC_FROM {
        return log_minus_digamma_asym(x);
    }
    let mut y = x;
    let mut harmonic = 0.0;
    while y < ASYMPTOTIC_FROM {
        harmonic += 1.0 / y;
        y += 1.0;
    }
    (x / y).ln() + log_minus_digamma_asym(y) + harmonic
}

fn check_inc_gamma(a: f64, x: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("incomplete gamma requires a > 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(a, x) = gamma(a, x) / Gamma(a)`.
pub fn reg_gamma_lower(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    Ok(gamma_p(a, x))
}

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn reg_gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    Ok(gamma_q(a, x))
}

pub(crate) fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else if x < a + 1.0 {
        lower_series(a, x)
    } else {
        1.0 - upper_fraction(a, x)
    }
}

pub(crate) fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else if x < a + 1.0 {
        1.0 - lower_series(a, x)
    } else {
        upper_fraction(a, x)
    }
}

/// `x^a e^{-x} / Gamma(a)`, evaluated in log space.
fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn lower_series(a: f64, x: f64) -> f64 {
    let pre = prefactor(a, x);
    if pre == 0.0 {
        return 0.0;
    }
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum * pre).min(1.0)
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn upper_fraction(a: f64, x: f64) -> f64 {
    let pre = prefactor(a, x);
    if pre == 0.0 {
        return 0.0;
    }
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (pre * h).min(1.0)
}
