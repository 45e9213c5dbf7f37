//! Numerical kernel for the beta distribution.
//!
//! Log-gamma, the beta function, the regularized incomplete beta function and
//! its inverse, the beta density, and seeded beta variates. The regularized
//! incomplete beta is evaluated with a Lentz continued fraction; the inverse
//! is a bracketed Newton iteration that falls back to bisection whenever a
//! Newton step leaves the bracket.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Generator used for every seeded stream in the crate.
pub type SeededRng = ChaCha8Rng;

/// Generator for `stream` under `seed`. Distinct streams of one seed are
/// independent, which is how parallel batches get their own sequences.
pub fn seeded_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Shape parameters of a beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
    ln_beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain("alpha", alpha, "must be finite and > 0"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::domain("beta", beta, "must be finite and > 0"));
        }
        let ln_beta =
            ln_gamma_unchecked(alpha) + ln_gamma_unchecked(beta) - ln_gamma_unchecked(alpha + beta);
        Ok(Self {
            alpha,
            beta,
            ln_beta,
        })
    }

    #[inline]
    /// Beta(β, α), the distribution of 1 - X.
    pub fn mirrored(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            ln_beta: self.ln_beta,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }
}

// B_{2k} / (2k (2k - 1)) for k = 1..=8.
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

const STIRLING_CUTOFF: f64 = 15.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for finite `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain("x", x, "log_gamma needs finite x > 0"));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x >= STIRLING_CUTOFF {
        return stirling(x);
    }
    // Shift up with Γ(x) = Γ(x + n) / (x (x + 1) ... (x + n - 1)).
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_CUTOFF {
        prod *= shifted;
        shifted += 1.0;
    }
    stirling(shifted) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series * inv
}

/// ln B(α, β).
pub fn log_beta(p: &BetaParams) -> f64 {
    p.ln_beta
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(what, x, "must lie in [0, 1]"))
    }
}

/// Beta density at `x`.
///
/// At an endpoint where the density diverges (α < 1 at 0, β < 1 at 1) the
/// result is `f64::INFINITY`; that value is the "unbounded" signal and is
/// never produced anywhere else.
pub fn beta_pdf(x: f64, p: &BetaParams) -> Result<f64> {
    check_unit("x", x)?;
    let (a, b) = (p.alpha, p.beta);
    if x == 0.0 {
        return Ok(endpoint_density(a, p.ln_beta));
    }
    if x == 1.0 {
        return Ok(endpoint_density(b, p.ln_beta));
    }
    Ok(ln_pdf(x, p).exp())
}

// Density at the endpoint whose exponent is `near - 1`.
fn endpoint_density(near: f64, ln_beta: f64) -> f64 {
    if near < 1.0 {
        f64::INFINITY
    } else if near == 1.0 {
        (-ln_beta).exp()
    } else {
        0.0
    }
}

#[inline]
fn ln_pdf(x: f64, p: &BetaParams) -> f64 {
    (p.alpha - 1.0) * x.ln() + (p.beta - 1.0) * (-x).ln_1p() - p.ln_beta
}

/// Regularized incomplete beta function I_x(α, β), the beta CDF.
pub fn reg_inc_beta(x: f64, p: &BetaParams) -> Result<f64> {
    check_unit("x", x)?;
    Ok(cdf_unchecked(x, p))
}

pub(crate) fn cdf_unchecked(x: f64, p: &BetaParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (a, b) = (p.alpha, p.beta);
    let y = 1.0 - x;
    if x < (a + 1.0) / (a + b + 2.0) {
        let front = (a * x.ln() + b * (-x).ln_1p() - p.ln_beta).exp();
        (front * continued_fraction(a, b, x) / a).clamp(0.0, 1.0)
    } else {
        let front = (b * y.ln() + a * x.ln() - p.ln_beta).exp();
        (1.0 - front * continued_fraction(b, a, y) / b).clamp(0.0, 1.0)
    }
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let num = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + num * d);
        c = guard(1.0 + num / c);
        h *= d * c;

        let num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + num * d);
        c = guard(1.0 + num / c);
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

const QUANTILE_MAX_ITER: usize = 400;

/// Inverse of [`reg_inc_beta`] in its first argument: the beta quantile.
pub fn inv_reg_inc_beta(u: f64, p: &BetaParams) -> Result<f64> {
    check_unit("u", u)?;
    Ok(quantile_unchecked(u, p))
}

pub(crate) fn quantile_unchecked(u: f64, p: &BetaParams) -> f64 {
    match quantile_log(u, p) {
        LogQuantile::Lower(z) => z.exp(),
        LogQuantile::Upper(w) => -w.exp_m1(),
    }
}

/// A quantile held as a logarithm so that neither tail underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LogQuantile {
    /// `ln x`.
    Lower(f64),
    /// `ln (1 - x)`.
    Upper(f64),
}

/// Quantile in log form: `ln x` when the quantile lies below 1/2 or the
/// level is at most 1/2, otherwise `ln (1 - x)` from the (1 - u) quantile of
/// Beta(β, α). The lower form also yields to the upper one when `1 - x`
/// would not be representable.
pub(crate) fn quantile_log(u: f64, p: &BetaParams) -> LogQuantile {
    if u <= 0.0 {
        return LogQuantile::Lower(f64::NEG_INFINITY);
    }
    if u >= 1.0 {
        return LogQuantile::Upper(f64::NEG_INFINITY);
    }
    if u > 0.5 && cdf_unchecked(0.5, p) < u {
        return LogQuantile::Upper(ln_quantile(1.0 - u, &p.mirrored()));
    }
    let z = ln_quantile(u, p);
    if -z >= MIN_COMPLEMENT {
        LogQuantile::Lower(z)
    } else {
        LogQuantile::Upper(ln_quantile(1.0 - u, &p.mirrored()))
    }
}

const MIN_COMPLEMENT: f64 = 1e-290;

/// CDF at `x = e^z`, for `z <= 0`. Works where `x` itself underflows.
pub(crate) fn cdf_at_ln(z: f64, p: &BetaParams) -> f64 {
    cdf_pair_at_ln(z, p).0
}

/// `(I_x, 1 - I_x)` at `x = e^z`, each computed without cancellation.
pub(crate) fn cdf_pair_at_ln(z: f64, p: &BetaParams) -> (f64, f64) {
    match cdf_parts(z, p) {
        CdfParts::LnLower(v) => {
            let v = v.min(0.0);
            (v.exp(), -v.exp_m1())
        }
        CdfParts::Upper(tail) => {
            let tail = tail.clamp(0.0, 1.0);
            (1.0 - tail, tail)
        }
    }
}

enum CdfParts {
    // ln I_x(α, β)
    LnLower(f64),
    // 1 - I_x(α, β)
    Upper(f64),
}

fn cdf_parts(z: f64, p: &BetaParams) -> CdfParts {
    if z == f64::NEG_INFINITY {
        return CdfParts::LnLower(f64::NEG_INFINITY);
    }
    if z >= 0.0 {
        return CdfParts::Upper(0.0);
    }
    let (a, b) = (p.alpha, p.beta);
    let x = z.exp();
    let ln_y = (-z.exp_m1()).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        let cf = continued_fraction(a, b, x);
        CdfParts::LnLower(a * z + b * ln_y - p.ln_beta + (cf / a).ln())
    } else {
        let y = -z.exp_m1();
        let front = (b * ln_y + a * z - p.ln_beta).exp();
        CdfParts::Upper(front * continued_fraction(b, a, y) / b)
    }
}

fn ln_cdf_at_ln(z: f64, p: &BetaParams) -> f64 {
    match cdf_parts(z, p) {
        CdfParts::LnLower(v) => v.min(0.0),
        CdfParts::Upper(tail) => (-tail.min(1.0)).ln_1p(),
    }
}

// Solves ln I_{e^z}(α, β) = ln u for z on (-inf, 0): bracketed Newton on the
// log CDF, which is close to linear in z wherever x is small.
fn ln_quantile(u: f64, p: &BetaParams) -> f64 {
    let ln_u = u.ln();
    let g = |z: f64| ln_cdf_at_ln(z, p) - ln_u;

    let mut z = initial_ln_quantile(u, p);
    if !(z.is_finite() && z < 0.0) {
        z = -1.0;
    }
    let mut hi = 0.0_f64;
    let mut lo = z.min(-1.0);
    let mut step = 1.0;
    while g(lo) > 0.0 {
        hi = lo;
        lo -= step;
        step *= 2.0;
        if !lo.is_finite() {
            return f64::NEG_INFINITY;
        }
    }
    z = z.clamp(lo, hi);

    for _ in 0..QUANTILE_MAX_ITER {
        let err = g(z);
        if err == 0.0 {
            return z;
        }
        if err < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        // d ln F / dz = x f(x) / F(x)
        let ln_y = (-z.exp_m1()).ln();
        let ln_f = err + ln_u;
        let slope = (p.alpha * z + (p.beta - 1.0) * ln_y - p.ln_beta - ln_f).exp();
        let mut next = z - err / slope;
        if !(next.is_finite() && next > lo && next < hi) {
            next = bisect(lo, hi);
        }
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - z).abs() <= 2.0 * f64::EPSILON * scale
            || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs())
        {
            return next;
        }
        z = next;
    }
    z
}

// Bracket midpoint in z; geometric when both ends are negative and far apart
// in ratio, so roots just below zero (x near 1) are reached quickly.
fn bisect(lo: f64, hi: f64) -> f64 {
    if hi < 0.0 && lo / hi > 16.0 {
        -(lo * hi).sqrt()
    } else if hi == 0.0 && lo > -1.0 {
        0.5 * lo
    } else {
        0.5 * (lo + hi)
    }
}

// Starting point from Numerical Recipes' `invbetai`, returned as ln x.
fn initial_ln_quantile(u: f64, p: &BetaParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    if a >= 1.0 && b >= 1.0 {
        let pp = if u < 0.5 { u } else { 1.0 - u };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if u < 0.5 {
            z = -z;
        }
        let al = (z * z - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = z * (al + h).sqrt() / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        // ln(a / (a + b e^{2w}))
        -((b / a).ln() + 2.0 * w).exp().ln_1p()
    } else {
        let ln_a = (a / (a + b)).ln();
        let ln_b = (b / (a + b)).ln();
        let t = (a * ln_a).exp() / a;
        let w = t + (b * ln_b).exp() / b;
        if u < t / w {
            (a * w * u).ln() / a
        } else {
            (-((b * w * (1.0 - u)).ln() / b).exp()).ln_1p()
        }
    }
}

/// Log of a Gamma(shape, 1) variate (Marsaglia–Tsang).
///
/// Shapes below one use Γ(k) = Γ(k + 1) · U^{1/k}, kept in log space so
/// tiny shapes do not underflow to zero.
fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = rng.sample(Open01);
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.sample(Open01);
        if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
            return (d * v).ln();
        }
    }
}

/// One Beta(α, β) draw as G₁ / (G₁ + G₂) with independent gamma variates.
pub fn beta_sample<R: Rng + ?Sized>(p: &BetaParams, rng: &mut R) -> f64 {
    let g1 = ln_gamma_variate(p.alpha, rng);
    let g2 = ln_gamma_variate(p.beta, rng);
    1.0 / (1.0 + (g2 - g1).exp())
}
