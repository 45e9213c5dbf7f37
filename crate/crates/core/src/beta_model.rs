//! Beta-distributed family risk.
//!
//! The family risk level P ~ Beta(α, β) is fitted from the lifetime risk
//! μ = E[P] and the familial relative risk FRR = E[P²]/E[P]² = 1 + CV², which
//! gives α = (1 - μ)/(FRR - 1) - μ and β = α(1 - μ)/μ.
//!
//! The Lorenz curve at u is the share of disease carried by the fraction u
//! of families at lowest risk: L(u) = I_{Q(u)}(α + 1, β) with Q the beta
//! quantile, since p·f(p; α, β)/μ is the Beta(α + 1, β) density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{self, BetaParams, LogQuantile};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Repr {
    Beta {
        params: BetaParams,
        // Beta(α + 1, β): the burden-weighted risk distribution.
        burden: BetaParams,
    },
    /// FRR = 1: every family has the same risk.
    PointMass { mean: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRiskModel {
    repr: Repr,
}

/// Fits Beta(α, β) to a lifetime risk `mu` and familial relative risk `frr`.
///
/// `frr == 1` yields the degenerate point-mass model.
pub fn fit_from_risk_and_frr(mu: f64, frr: f64) -> Result<BetaRiskModel> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain("mu", mu, "must lie in (0, 1)"));
    }
    if !(frr.is_finite() && frr >= 1.0) {
        return Err(Error::domain("frr", frr, "must be finite and >= 1"));
    }
    let bound = 1.0 / mu;
    if frr >= bound {
        return Err(Error::InfeasibleFrr { frr, bound });
    }
    if frr == 1.0 {
        return Ok(BetaRiskModel {
            repr: Repr::PointMass { mean: mu },
        });
    }
    let alpha = (1.0 - mu) / (frr - 1.0) - mu;
    if alpha <= 0.0 {
        return Err(Error::InfeasibleFrr { frr, bound });
    }
    let beta = alpha * (1.0 - mu) / mu;
    BetaRiskModel::from_params(alpha, beta)
}

impl BetaRiskModel {
    pub fn from_params(alpha: f64, beta: f64) -> Result<Self> {
        let params = BetaParams::new(alpha, beta)?;
        let burden = BetaParams::new(alpha + 1.0, beta)?;
        Ok(Self {
            repr: Repr::Beta { params, burden },
        })
    }

    pub fn point_mass(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean < 1.0) {
            return Err(Error::domain("mean", mean, "must lie in (0, 1)"));
        }
        Ok(Self {
            repr: Repr::PointMass { mean },
        })
    }

    /// Shape parameters, or `None` for the point-mass model.
    pub fn params(&self) -> Option<BetaParams> {
        match self.repr {
            Repr::Beta { params, .. } => Some(params),
            Repr::PointMass { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.repr, Repr::PointMass { .. })
    }

    pub fn mean_risk(&self) -> f64 {
        match self.repr {
            Repr::Beta { params, .. } => params.mean(),
            Repr::PointMass { mean } => mean,
        }
    }

    /// CV² = β / (α(α + β + 1)).
    pub fn cv_squared(&self) -> f64 {
        match self.repr {
            Repr::Beta { params, .. } => {
                let (a, b) = (params.alpha(), params.beta());
                b / (a * (a + b + 1.0))
            }
            Repr::PointMass { .. } => 0.0,
        }
    }

    pub fn frr_of(&self) -> f64 {
        1.0 + self.cv_squared()
    }

    /// FRR with two affected relatives, E[P³] / (E[P²] E[P]).
    pub fn frr_two_of(&self) -> f64 {
        match self.repr {
            Repr::Beta { params, .. } => {
                let (a, s) = (params.alpha(), params.alpha() + params.beta());
                // E[P^3] / (E[P^2] E[P]) = ((a + 2)/(s + 2)) / (a / s)
                (a + 2.0) * s / ((s + 2.0) * a)
            }
            Repr::PointMass { .. } => 1.0,
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit("u", u)?;
        Ok(match self.repr {
            Repr::Beta { params, .. } => special::quantile_unchecked(u, &params),
            Repr::PointMass { mean } => mean,
        })
    }

    /// Burden share L(u) carried by the fraction `u` at lowest risk.
    pub fn lorenz_at(&self, u: f64) -> Result<f64> {
        check_unit("u", u)?;
        Ok(self.lorenz_unchecked(u))
    }

    fn lorenz_unchecked(&self, u: f64) -> f64 {
        match self.repr {
            Repr::Beta { params, burden } => {
                if u <= 0.0 {
                    return 0.0;
                }
                if u >= 1.0 {
                    return 1.0;
                }
                // Past the median use 1 - L = I_{1-x}(β, α + 1); the
                // quantile stays in log form since either tail may underflow.
                match special::quantile_log(u, &params) {
                    LogQuantile::Lower(z) => special::cdf_at_ln(z, &burden),
                    LogQuantile::Upper(w) => special::cdf_pair_at_ln(w, &burden.mirrored()).1,
                }
            }
            Repr::PointMass { .. } => u,
        }
    }

    /// Lorenz curve sampled on `points` equally spaced population fractions.
    pub fn lorenz_curve(&self, points: usize) -> LorenzCurve {
        let n = points.max(2);
        let points = (0..n)
            .map(|i| {
                let u = i as f64 / (n - 1) as f64;
                (u, self.lorenz_unchecked(u))
            })
            .collect();
        LorenzCurve {
            points,
            gini: self.gini(),
        }
    }

    /// Gini index, 1 - 2∫₀¹ L(u) du.
    pub fn gini(&self) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        let mut breaks = vec![0.0, 0.5];
        breaks.extend((1..=10).map(|k| 1.0 - 10f64.powi(-k)));
        breaks.push(1.0);
        let area = integrate(
            |u| self.lorenz_unchecked(u),
            &breaks,
            QuadOptions::abs(1e-9),
        );
        (1.0 - 2.0 * area.value).max(0.0)
    }

    /// Share of all disease carried by the top fraction `f` at highest risk.
    pub fn top_share(&self, f: f64) -> Result<f64> {
        check_open("fraction", f)?;
        Ok(1.0 - self.lorenz_unchecked(1.0 - f))
    }

    /// Mean risk above the (1 - f) quantile over mean risk below it.
    pub fn mean_risk_ratio(&self, f: f64) -> Result<f64> {
        let top = self.top_share(f)?;
        if self.is_degenerate() {
            return Ok(1.0);
        }
        Ok((top / f) / ((1.0 - top) / (1.0 - f)))
    }

    /// Median risk of the top-f stratum over the median of the rest,
    /// Q(1 - f/2) / Q((1 - f)/2).
    pub fn median_risk_ratio(&self, f: f64) -> Result<f64> {
        check_open("fraction", f)?;
        Ok(self.quantile(1.0 - 0.5 * f)? / self.quantile(0.5 * (1.0 - f))?)
    }

    /// `n` independent family risks, reproducible per `seed`.
    pub fn sample_risks(&self, n: usize, seed: u64) -> Vec<f64> {
        match self.repr {
            Repr::Beta { params, .. } => {
                let mut rng = special::seeded_rng(seed, 0);
                (0..n)
                    .map(|_| special::beta_sample(&params, &mut rng))
                    .collect()
            }
            Repr::PointMass { mean } => vec![mean; n],
        }
    }
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(what, x, "must lie in [0, 1]"))
    }
}

fn check_open(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(what, x, "must lie in (0, 1)"))
    }
}

/// Sampled Lorenz curve: `(population fraction, burden fraction)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
    pub gini: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parkinsons_fit() {
        let m = fit_from_risk_and_frr(0.01, 2.3).unwrap();
        let p = m.params().unwrap();
        assert_eq!((p.alpha() * 100.0).round() / 100.0, 0.75);
        assert_eq!(p.beta().round(), 74.0);
        assert!((m.frr_of() - 2.3).abs() < 1e-12);
    }

    #[test]
    fn breast_fit() {
        let m = fit_from_risk_and_frr(0.12, 1.8).unwrap();
        let p = m.params().unwrap();
        assert!((p.alpha() - 0.98).abs() < 0.005);
        assert!((p.beta() - 7.19).abs() < 0.005);
        assert!((m.mean_risk() - 0.12).abs() < 1e-15);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_from_risk_and_frr(0.002, 600.0),
            Err(Error::InfeasibleFrr { .. })
        ));
        assert!(matches!(
            fit_from_risk_and_frr(0.0, 2.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            fit_from_risk_and_frr(0.1, 0.5),
            Err(Error::Domain { .. })
        ));
        assert!(fit_from_risk_and_frr(0.002, 499.0).is_ok());
    }

    #[test]
    fn point_mass() {
        let m = fit_from_risk_and_frr(0.5, 1.0).unwrap();
        assert!(m.is_degenerate());
        assert_eq!(m.cv_squared(), 0.0);
        assert_eq!(m.gini(), 0.0);
        assert_eq!(m.lorenz_at(0.3).unwrap(), 0.3);
        assert_eq!(m.mean_risk_ratio(0.1).unwrap(), 1.0);
        assert_eq!(m.median_risk_ratio(0.1).unwrap(), 1.0);
        assert_eq!(m.sample_risks(3, 1), vec![0.5; 3]);
    }

    #[test]
    fn uniform_model() {
        let m = BetaRiskModel::from_params(1.0, 1.0).unwrap();
        assert_eq!(m.mean_risk(), 0.5);
        assert!((m.cv_squared() - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.frr_of() - 4.0 / 3.0).abs() < 1e-15);
        for u in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
            assert!((m.lorenz_at(u).unwrap() - u * u).abs() < 1e-12);
        }
        assert!((m.gini() - 1.0 / 3.0).abs() < 1e-7);
        assert!((m.median_risk_ratio(0.5).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn lorenz_endpoints_and_domain() {
        let m = fit_from_risk_and_frr(0.01, 6.0).unwrap();
        assert_eq!(m.lorenz_at(0.0).unwrap(), 0.0);
        assert_eq!(m.lorenz_at(1.0).unwrap(), 1.0);
        assert!(m.lorenz_at(1.1).is_err());
        assert!(m.top_share(0.0).is_err());
        assert!(m.mean_risk_ratio(1.0).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let m = fit_from_risk_and_frr(0.01, 2.3).unwrap();
        assert_eq!(m.sample_risks(10, 5), m.sample_risks(10, 5));
        assert_ne!(m.sample_risks(10, 5), m.sample_risks(10, 6));
        let one = m.sample_risks(1, 0);
        assert_eq!(one.len(), 1);
        assert!((0.0..=1.0).contains(&one[0]));
    }

    #[test]
    fn curve_has_requested_points() {
        let c = fit_from_risk_and_frr(0.01, 2.3).unwrap().lorenz_curve(1001);
        assert_eq!(c.points.len(), 1001);
        assert_eq!(c.points[0], (0.0, 0.0));
        assert_eq!(c.points[1000], (1.0, 1.0));
    }
}
