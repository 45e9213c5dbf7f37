//! Two-group (high/low risk) model of familial aggregation.
//!
//! A fraction `q` of families is at high risk, `irr` times the risk of the
//! rest. With one or two affected relatives the familial relative risks are
//!
//! ```text
//! FRR1 = (q IRR² + 1 - q) / (q IRR + 1 - q)²
//! FRR2 = (q IRR³ + 1 - q) / ((q IRR + 1 - q)(q IRR² + 1 - q))
//! ```
//!
//! Internally both are evaluated as their excess over one,
//! `FRR1 - 1 = q(1-q)(IRR-1)² / D1²` and
//! `FRR2 - 1 = q(1-q)(IRR-1)²(IRR+1) / (D1 N2)`, which keeps full relative
//! precision when the FRRs are close to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of affected relatives conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Affected {
    One,
    Two,
}

impl Affected {
    pub const ALL: [Affected; 2] = [Affected::One, Affected::Two];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomousRiskModel {
    q: f64,
    irr: f64,
    low_risk: Option<f64>,
}

impl DichotomousRiskModel {
    pub fn new(q: f64, irr: f64, low_risk: Option<f64>) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("q", q, "must lie in (0, 1)"));
        }
        if !(irr.is_finite() && irr >= 1.0) {
            return Err(Error::domain("irr", irr, "must be finite and >= 1"));
        }
        if let Some(pl) = low_risk {
            if !(pl > 0.0 && pl < 1.0) {
                return Err(Error::domain("low_risk", pl, "must lie in (0, 1)"));
            }
            if irr * pl > 1.0 {
                return Err(Error::domain(
                    "low_risk",
                    pl,
                    "irr * low_risk must not exceed 1",
                ));
            }
        }
        Ok(Self { q, irr, low_risk })
    }

    /// Model whose low-risk group risk is chosen so the population-average
    /// risk equals `population_risk`.
    pub fn with_population_risk(q: f64, irr: f64, population_risk: f64) -> Result<Self> {
        if !(population_risk > 0.0 && population_risk < 1.0) {
            return Err(Error::domain(
                "population_risk",
                population_risk,
                "must lie in (0, 1)",
            ));
        }
        let low = population_risk / (1.0 + q * (irr - 1.0));
        Self::new(q, irr, Some(low))
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn irr(&self) -> f64 {
        self.irr
    }

    #[inline]
    pub fn low_risk(&self) -> Option<f64> {
        self.low_risk
    }

    pub fn high_risk(&self) -> Option<f64> {
        self.low_risk.map(|pl| pl * self.irr)
    }

    pub fn population_risk(&self) -> Option<f64> {
        self.low_risk
            .map(|pl| pl * (1.0 + self.q * (self.irr - 1.0)))
    }

    pub fn frr_one_affected(&self) -> f64 {
        1.0 + excess_one(self.q, 1.0 - self.q, self.irr - 1.0)
    }

    pub fn frr_two_affected(&self) -> f64 {
        1.0 + excess_two(self.q, 1.0 - self.q, self.irr - 1.0)
    }

    pub fn frr(&self, affected: Affected) -> f64 {
        match affected {
            Affected::One => self.frr_one_affected(),
            Affected::Two => self.frr_two_affected(),
        }
    }
}

#[inline]
fn excess_one(q: f64, one_minus_q: f64, irr_minus_one: f64) -> f64 {
    let d1 = 1.0 + q * irr_minus_one;
    q * one_minus_q * irr_minus_one * irr_minus_one / (d1 * d1)
}

#[inline]
fn excess_two(q: f64, one_minus_q: f64, irr_minus_one: f64) -> f64 {
    let d1 = 1.0 + q * irr_minus_one;
    let n2 = 1.0 + q * irr_minus_one * (irr_minus_one + 2.0);
    q * one_minus_q * irr_minus_one * irr_minus_one * (irr_minus_one + 2.0) / (d1 * n2)
}

fn excess(affected: Affected, q: f64, irr_minus_one: f64) -> f64 {
    match affected {
        Affected::One => excess_one(q, 1.0 - q, irr_minus_one),
        Affected::Two => excess_two(q, 1.0 - q, irr_minus_one),
    }
}

/// (IRR, q) recovered from a pair of familial relative risks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskStructureSolution {
    pub irr: f64,
    /// `None` only for the degenerate input FRR1 = FRR2 = 1, where IRR = 1
    /// and the group split is unidentifiable.
    pub q: Option<f64>,
    /// Max-norm of the two FRR residuals at the returned point.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl RiskStructureSolution {
    pub fn is_degenerate(&self) -> bool {
        self.q.is_none()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub grid_size: usize,
    /// Two converged roots closer than this (relative, in IRR and q) are
    /// the same root.
    pub distinct_rel: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 200,
            grid_size: 50,
            distinct_rel: 1e-4,
        }
    }
}

/// Solves the FRR1/FRR2 equations for (IRR, q).
pub fn solve_risk_structure(frr1: f64, frr2: f64) -> Result<RiskStructureSolution> {
    solve_risk_structure_with(frr1, frr2, &SolverOptions::default())
}

// Unknowns are s = ln(IRR - 1) and t = logit(q), so every iterate stays in
// the open domain IRR > 1, 0 < q < 1. Newton works on the log of each
// excess, which keeps the equations equally scaled whether the FRRs are
// near one or in the hundreds.
struct Target {
    e1: f64,
    e2: f64,
    ln_e1: f64,
    ln_e2: f64,
}

impl Target {
    fn new(frr1: f64, frr2: f64) -> Self {
        let (e1, e2) = (frr1 - 1.0, frr2 - 1.0);
        Self {
            e1,
            e2,
            ln_e1: e1.ln(),
            ln_e2: e2.ln(),
        }
    }

    fn residual(&self, v: [f64; 2]) -> [f64; 2] {
        let (s, t) = (v[0], v[1]);
        let ln_q = -softplus(-t);
        let ln_q_rest = -softplus(t);
        let rho = s.exp();
        let q_rho = (ln_q + s).exp();
        let ln_d1 = q_rho.ln_1p();
        let ln_n2 = (q_rho * (rho + 2.0)).ln_1p();
        let common = ln_q + ln_q_rest + 2.0 * s;
        [
            common - 2.0 * ln_d1 - self.ln_e1,
            common + (rho + 2.0).ln() - ln_d1 - ln_n2 - self.ln_e2,
        ]
    }

    /// Max-norm of the FRR residuals at `v`.
    fn frr_residual(&self, v: [f64; 2]) -> f64 {
        let rm1 = v[0].exp();
        let q = logistic(v[1]);
        let one_minus_q = logistic(-v[1]);
        (excess_one(q, one_minus_q, rm1) - self.e1)
            .abs()
            .max((excess_two(q, one_minus_q, rm1) - self.e2).abs())
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

#[inline]
fn max_abs(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

#[inline]
fn sum_sq(r: [f64; 2]) -> f64 {
    r[0] * r[0] + r[1] * r[1]
}

const S_RANGE: (f64, f64) = (-6.9, 11.5);
const T_RANGE: (f64, f64) = (-16.0, 7.0);
const COORD_LIMIT: f64 = 60.0;
const MAX_STEP: f64 = 2.0;
const MAX_STARTS: usize = 64;
// Relative agreement of the excess risks required of a root, so tiny
// excesses cannot pass the absolute test half way through a descent.
const CONVERGED_LOG: f64 = 1e-10;

struct NewtonRun {
    v: [f64; 2],
    residual: f64,
    // log residual reached CONVERGED_LOG
    converged: bool,
    iterations: usize,
}

fn damped_newton(target: &Target, start: [f64; 2], max_iterations: usize) -> NewtonRun {
    let mut v = start;
    let mut r = target.residual(v);
    let mut iterations = 0;
    let floor = 8.0 * f64::EPSILON;
    while iterations < max_iterations && max_abs(r) > floor {
        iterations += 1;
        let jac = jacobian(v);
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det.is_finite() && det != 0.0) {
            break;
        }
        let mut step = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let len = step[0].abs().max(step[1].abs());
        if !len.is_finite() {
            break;
        }
        if len > MAX_STEP {
            step = [step[0] * MAX_STEP / len, step[1] * MAX_STEP / len];
        }
        let current = sum_sq(r);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = [v[0] + lambda * step[0], v[1] + lambda * step[1]];
            let rc = target.residual(cand);
            if sum_sq(rc) < current {
                accepted = Some((cand, rc));
                break;
            }
            lambda *= 0.5;
        }
        let Some((cand, rc)) = accepted else { break };
        let moved = (cand[0] - v[0]).abs().max((cand[1] - v[1]).abs());
        v = cand;
        r = rc;
        if moved < 1e-15 || v[0].abs() > COORD_LIMIT || v[1].abs() > COORD_LIMIT {
            break;
        }
    }
    NewtonRun {
        v,
        residual: if max_abs(r).is_finite() {
            target.frr_residual(v)
        } else {
            f64::INFINITY
        },
        converged: max_abs(r) <= CONVERGED_LOG,
        iterations,
    }
}

// Jacobian of the log residuals in (s, t) = (ln ρ, logit q).
fn jacobian(v: [f64; 2]) -> [[f64; 2]; 2] {
    let rho = v[0].exp();
    let q = logistic(v[1]);
    let q_rest = logistic(-v[1]);
    let q_rho = q * rho;
    let d1 = 1.0 + q_rho;
    let n2 = 1.0 + q_rho * (rho + 2.0);
    let spread = q * q_rest * rho;
    let skew = q_rest - q;
    [
        [2.0 - 2.0 * q_rho / d1, skew - 2.0 * spread / d1],
        [
            2.0 + rho / (rho + 2.0) - q_rho / d1 - q_rho * (2.0 * rho + 2.0) / n2,
            skew - spread / d1 - spread * (rho + 2.0) / n2,
        ],
    ]
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| lo + step * i as f64)
}

/// Grid points that are local minima of the residual norm, plus the best
/// points overall, capped at [`MAX_STARTS`].
fn select_starts(target: &Target, n: usize) -> Vec<[f64; 2]> {
    let ss: Vec<f64> = linspace(S_RANGE.0, S_RANGE.1, n).collect();
    let ts: Vec<f64> = linspace(T_RANGE.0, T_RANGE.1, n).collect();
    let norm: Vec<Vec<f64>> = ss
        .iter()
        .map(|&s| {
            ts.iter()
                .map(|&t| sum_sq(target.residual([s, t])))
                .collect()
        })
        .collect();

    let mut ranked: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    let mut starts: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let here = norm[i][j];
            if !here.is_finite() {
                continue;
            }
            ranked.push((here, i, j));
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    if norm[a as usize][b as usize] < here {
                        is_min = false;
                    }
                }
            }
            if is_min {
                starts.push((here, i, j));
            }
        }
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.truncate(MAX_STARTS / 2);
    for cand in ranked {
        if starts.len() >= MAX_STARTS {
            break;
        }
        if !starts.iter().any(|s| s.1 == cand.1 && s.2 == cand.2) {
            starts.push(cand);
        }
    }
    starts.into_iter().map(|(_, i, j)| [ss[i], ts[j]]).collect()
}

// Smallest FRR residual over the start grid, reported for pairs that
// cannot be solved.
fn grid_best_residual(frr1: f64, frr2: f64, n: usize) -> f64 {
    let target = Target {
        e1: frr1 - 1.0,
        e2: frr2 - 1.0,
        ln_e1: f64::NAN,
        ln_e2: f64::NAN,
    };
    let ts: Vec<f64> = linspace(T_RANGE.0, T_RANGE.1, n).collect();
    linspace(S_RANGE.0, S_RANGE.1, n)
        .flat_map(|s| ts.iter().map(move |&t| [s, t]))
        .map(|v| target.frr_residual(v))
        .fold(f64::INFINITY, f64::min)
}

pub fn solve_risk_structure_with(
    frr1: f64,
    frr2: f64,
    opts: &SolverOptions,
) -> Result<RiskStructureSolution> {
    if !(frr1.is_finite() && frr1 > 0.0) {
        return Err(Error::domain("frr1", frr1, "must be finite and > 0"));
    }
    if !(frr2.is_finite() && frr2 > 0.0) {
        return Err(Error::domain("frr2", frr2, "must be finite and > 0"));
    }
    if frr1 == 1.0 && frr2 == 1.0 {
        return Ok(RiskStructureSolution {
            irr: 1.0,
            q: None,
            residual_norm: 0.0,
            iterations: 0,
        });
    }

    // Any IRR > 1 with 0 < q < 1 gives FRR2 > FRR1 > 1. Pairs outside that
    // region can only be approached as IRR grows without bound.
    if !(frr2 > frr1 && frr1 > 1.0) {
        return Err(Error::NoSolution {
            frr1,
            frr2,
            best_residual: grid_best_residual(frr1, frr2, opts.grid_size),
        });
    }

    let target = Target::new(frr1, frr2);
    let mut roots: Vec<(f64, f64, NewtonRun)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for start in select_starts(&target, opts.grid_size) {
        let run = damped_newton(&target, start, opts.max_iterations);
        if run.residual.is_finite() {
            best_residual = best_residual.min(run.residual);
        }
        if !run.converged || run.residual > opts.tolerance {
            continue;
        }
        let irr = 1.0 + run.v[0].exp();
        let q = logistic(run.v[1]);
        let close = |a: f64, b: f64| (a - b).abs() <= opts.distinct_rel * a.abs().max(b.abs());
        match roots
            .iter_mut()
            .find(|(ri, rq, _)| close(*ri, irr) && close(*rq, q))
        {
            Some(existing) => {
                if run.residual < existing.2.residual {
                    *existing = (irr, q, run);
                }
            }
            None => roots.push((irr, q, run)),
        }
    }

    match roots.len() {
        0 => Err(Error::NoSolution {
            frr1,
            frr2,
            best_residual,
        }),
        1 => {
            let (irr, q, run) = roots.pop().expect("one root");
            Ok(RiskStructureSolution {
                irr,
                q: Some(q),
                residual_norm: run.residual,
                iterations: run.iterations,
            })
        }
        _ => Err(Error::Ambiguous {
            roots: roots.iter().map(|(i, q, _)| (*i, *q)).collect(),
        }),
    }
}

/// The IRR ≥ 1 at which the selected FRR equals `frr`, for fixed `q`.
///
/// Both FRRs increase with IRR towards the supremum 1/q, so any
/// `frr >= 1/q` is unattainable.
pub fn irr_given_frr(q: f64, frr: f64, affected: Affected) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain("q", q, "must lie in (0, 1)"));
    }
    if !(frr.is_finite() && frr >= 1.0) {
        return Err(Error::domain("frr", frr, "must be finite and >= 1"));
    }
    if frr == 1.0 {
        return Ok(1.0);
    }
    let supremum = 1.0 / q;
    let unattainable = Error::Unattainable { frr, q, supremum };
    if frr >= supremum {
        return Err(unattainable);
    }
    let target = frr - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while excess(affected, q, hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e100 {
            return Err(unattainable);
        }
    }
    for _ in 0..2000 {
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(affected, q, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(1.0 + 0.5 * (lo + hi))
}

/// Which parameter a curve sweeps; the other is held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    /// Sweep IRR at fixed q.
    Irr { q: f64 },
    /// Sweep q at fixed IRR.
    Q { irr: f64 },
}

/// `(abscissa, frr)` for each grid value, in grid order.
pub fn frr_curve(sweep: Sweep, grid: &[f64], affected: Affected) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&x| {
            let model = match sweep {
                Sweep::Irr { q } => DichotomousRiskModel::new(q, x, None)?,
                Sweep::Q { irr } => DichotomousRiskModel::new(x, irr, None)?,
            };
            Ok((x, model.frr(affected)))
        })
        .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// The q maximizing the selected FRR at fixed IRR, by golden-section search,
/// together with the maximal FRR.
pub fn peak_q(irr: f64, affected: Affected) -> Result<(f64, f64)> {
    if !(irr.is_finite() && irr > 1.0) {
        return Err(Error::domain("irr", irr, "must be finite and > 1"));
    }
    let f = |q: f64| excess(affected, q, irr - 1.0);
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-13 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let q_star = 0.5 * (a + b);
    Ok((q_star, 1.0 + f(q_star)))
}
