//! Monte Carlo family registry.
//!
//! Each family draws one risk level (group membership in the dichotomous
//! model, a beta draw in the continuous one); members then fall ill
//! independently with that probability. Familial relative risks are
//! estimated over all ordered (target, conditioner) pairs and all
//! (target, conditioner pair) triples within each family, divided by the
//! overall disease frequency.
//!
//! Families are split into batches with their own ChaCha streams under the
//! root seed. The pooled estimate uses summed counts; its standard error is
//! the spread of the per-batch estimates.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta_model::BetaRiskModel;
use crate::dichotomous::DichotomousRiskModel;
use crate::error::{Error, Result};
use crate::special::{beta_sample, seeded_rng, BetaParams};

pub const DEFAULT_BATCHES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskSource {
    /// Requires `low_risk` to be set.
    Dichotomous(DichotomousRiskModel),
    Beta(BetaRiskModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub risk_model: RiskSource,
    pub family_size: usize,
    pub n_families: u64,
    pub root_seed: u64,
    pub batches: usize,
}

impl SimulationConfig {
    pub fn new(
        risk_model: RiskSource,
        family_size: usize,
        n_families: u64,
        root_seed: u64,
    ) -> Result<Self> {
        let config = Self {
            risk_model,
            family_size,
            n_families,
            root_seed,
            batches: DEFAULT_BATCHES,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.family_size < 2 {
            return Err(Error::domain(
                "family_size",
                self.family_size as f64,
                "must be at least 2",
            ));
        }
        if self.n_families < 1 {
            return Err(Error::domain("n_families", 0.0, "must be at least 1"));
        }
        if self.batches < 1 {
            return Err(Error::domain("batches", 0.0, "must be at least 1"));
        }
        if let RiskSource::Dichotomous(m) = self.risk_model {
            if m.low_risk().is_none() {
                return Err(Error::domain(
                    "low_risk",
                    f64::NAN,
                    "simulation needs an absolute low-group risk",
                ));
            }
        }
        Ok(())
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    /// `None` when no member had an affected relative.
    pub frr_one: Option<Estimate>,
    /// `None` when no member had two affected relatives (or families of 2).
    pub frr_two: Option<Estimate>,
    /// Observed disease frequency over all simulated members.
    pub empirical_mean_risk: f64,
    /// Mean absolute difference of paired family risks over twice their mean.
    pub empirical_gini: Option<Estimate>,
    /// Ordered (target, conditioner) pairs with an affected conditioner.
    pub one_conditioning_events: u64,
    /// (target, conditioner pair) triples with both conditioners affected.
    pub two_conditioning_events: u64,
    pub n_families: u64,
    pub family_size: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    members: u64,
    diseased: u64,
    pairs_conditioned: u64,
    pairs_both: u64,
    triples_conditioned: u64,
    triples_all: u64,
    risk_sum: f64,
    risk_draws: u64,
    abs_diff_sum: f64,
    risk_pairs: u64,
}

impl Tally {
    fn merge(mut self, o: &Tally) -> Tally {
        self.members += o.members;
        self.diseased += o.diseased;
        self.pairs_conditioned += o.pairs_conditioned;
        self.pairs_both += o.pairs_both;
        self.triples_conditioned += o.triples_conditioned;
        self.triples_all += o.triples_all;
        self.risk_sum += o.risk_sum;
        self.risk_draws += o.risk_draws;
        self.abs_diff_sum += o.abs_diff_sum;
        self.risk_pairs += o.risk_pairs;
        self
    }

    fn frequency(&self) -> Option<f64> {
        (self.diseased > 0).then(|| self.diseased as f64 / self.members as f64)
    }

    fn frr_one(&self) -> Option<f64> {
        let p = self.frequency()?;
        (self.pairs_conditioned > 0)
            .then(|| self.pairs_both as f64 / self.pairs_conditioned as f64 / p)
    }

    fn frr_two(&self) -> Option<f64> {
        let p = self.frequency()?;
        (self.triples_conditioned > 0)
            .then(|| self.triples_all as f64 / self.triples_conditioned as f64 / p)
    }

    fn gini(&self) -> Option<f64> {
        if self.risk_pairs == 0 || self.risk_sum <= 0.0 {
            return None;
        }
        let mean = self.risk_sum / self.risk_draws as f64;
        Some(self.abs_diff_sum / self.risk_pairs as f64 / (2.0 * mean))
    }
}

enum Drawer {
    TwoGroup { q: f64, low: f64, high: f64 },
    Beta(BetaParams),
    Fixed(f64),
}

impl Drawer {
    fn new(source: &RiskSource) -> Self {
        match source {
            RiskSource::Dichotomous(m) => Drawer::TwoGroup {
                q: m.q(),
                low: m.low_risk().expect("validated"),
                high: m.high_risk().expect("validated"),
            },
            RiskSource::Beta(m) => match m.params() {
                Some(p) => Drawer::Beta(p),
                None => Drawer::Fixed(m.mean_risk()),
            },
        }
    }

    #[inline]
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Drawer::TwoGroup { q, low, high } => {
                if rng.random::<f64>() < *q {
                    *high
                } else {
                    *low
                }
            }
            Drawer::Beta(p) => beta_sample(p, rng),
            Drawer::Fixed(p) => *p,
        }
    }
}

fn run_batch(drawer: &Drawer, k: usize, families: u64, seed: u64, stream: u64) -> Tally {
    let mut rng = seeded_rng(seed, stream);
    let mut t = Tally::default();
    let k64 = k as u64;
    let mut pending: Option<f64> = None;
    for _ in 0..families {
        let p = drawer.draw(&mut rng);
        let d = (0..k).filter(|_| rng.random::<f64>() < p).count() as u64;

        t.members += k64;
        t.diseased += d;
        t.pairs_conditioned += d * (k64 - 1);
        t.pairs_both += d * d.saturating_sub(1);
        let affected_pairs = d * d.saturating_sub(1) / 2;
        t.triples_conditioned += affected_pairs * (k64 - 2);
        t.triples_all += affected_pairs * d.saturating_sub(2);

        t.risk_sum += p;
        t.risk_draws += 1;
        match pending.take() {
            Some(prev) => {
                t.abs_diff_sum += (prev - p).abs();
                t.risk_pairs += 1;
            }
            None => pending = Some(p),
        }
    }
    t
}

fn batch_estimate(pooled: Option<f64>, batch_values: Vec<f64>) -> Option<Estimate> {
    let value = pooled?;
    let n = batch_values.len();
    let std_error = if n < 2 {
        f64::INFINITY
    } else {
        let mean = batch_values.iter().sum::<f64>() / n as f64;
        let var = batch_values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    Some(Estimate { value, std_error })
}

/// Runs the family simulation described by `config`.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationOutcome> {
    config.validate()?;
    let drawer = Drawer::new(&config.risk_model);
    let batches = (config.batches as u64).min(config.n_families);
    let base = config.n_families / batches;
    let extra = config.n_families % batches;

    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let families = base + u64::from(b < extra);
            run_batch(&drawer, config.family_size, families, config.root_seed, b)
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), |acc, t| acc.merge(t));

    let collect =
        |f: fn(&Tally) -> Option<f64>| -> Vec<f64> { tallies.iter().filter_map(f).collect() };

    Ok(SimulationOutcome {
        frr_one: batch_estimate(total.frr_one(), collect(Tally::frr_one)),
        frr_two: batch_estimate(total.frr_two(), collect(Tally::frr_two)),
        empirical_mean_risk: total.diseased as f64 / total.members as f64,
        empirical_gini: batch_estimate(total.gini(), collect(Tally::gini)),
        one_conditioning_events: total.pairs_conditioned,
        two_conditioning_events: total.triples_conditioned,
        n_families: config.n_families,
        family_size: config.family_size,
    })
}

/// Gini index estimated as mean |X - Y| / (2 · mean) over `n` independent
/// pairs of family risks, with a delta-method standard error.
pub fn estimate_gini_by_sampling(model: &BetaRiskModel, n: usize, seed: u64) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "need at least 2 pairs"));
    }
    let Some(params) = model.params() else {
        return Ok(Estimate {
            value: 0.0,
            std_error: 0.0,
        });
    };
    let mut rng = seeded_rng(seed, 0);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = beta_sample(&params, &mut rng);
            let y = beta_sample(&params, &mut rng);
            ((x - y).abs(), x + y)
        })
        .collect();
    let sum_abs: f64 = pairs.iter().map(|p| p.0).sum();
    let sum_tot: f64 = pairs.iter().map(|p| p.1).sum();
    let gini = sum_abs / sum_tot;
    let mean_tot = sum_tot / n as f64;
    // Linearization of the ratio estimator ΣA / ΣS.
    let var = pairs
        .iter()
        .map(|&(a, s)| {
            let z = (a - gini * s) / mean_tot;
            z * z
        })
        .sum::<f64>()
        / (n - 1) as f64;
    Ok(Estimate {
        value: gini,
        std_error: (var / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta_model::fit_from_risk_and_frr;

    fn dich(q: f64, irr: f64, pl: f64) -> RiskSource {
        RiskSource::Dichotomous(DichotomousRiskModel::new(q, irr, Some(pl)).unwrap())
    }

    #[test]
    fn config_validation() {
        let no_pl = RiskSource::Dichotomous(DichotomousRiskModel::new(0.1, 2.0, None).unwrap());
        assert!(SimulationConfig::new(no_pl, 3, 10, 0).is_err());
        assert!(SimulationConfig::new(dich(0.1, 2.0, 0.01), 1, 10, 0).is_err());
        assert!(SimulationConfig::new(dich(0.1, 2.0, 0.01), 3, 0, 0).is_err());
    }

    #[test]
    fn unit_irr_gives_frr_near_one() {
        let cfg = SimulationConfig::new(dich(0.3, 1.0, 0.05), 3, 400_000, 11).unwrap();
        let out = simulate(&cfg).unwrap();
        for est in [out.frr_one.unwrap(), out.frr_two.unwrap()] {
            assert!((est.value - 1.0).abs() < 3.0 * est.std_error, "{est:?}");
        }
        assert_eq!(out.empirical_gini.unwrap().value, 0.0);
    }

    #[test]
    fn zero_events_are_flagged() {
        let fixed = RiskSource::Beta(BetaRiskModel::point_mass(1e-9).unwrap());
        let out = simulate(&SimulationConfig::new(fixed, 3, 1000, 1).unwrap()).unwrap();
        assert!(out.frr_one.is_none());
        assert!(out.frr_two.is_none());
        assert_eq!(out.one_conditioning_events, 0);
    }

    #[test]
    fn pairs_of_two_have_no_frr_two() {
        let out =
            simulate(&SimulationConfig::new(dich(0.1, 5.0, 0.05), 2, 10_000, 3).unwrap()).unwrap();
        assert!(out.frr_two.is_none());
        assert!(out.frr_one.is_some());
    }

    #[test]
    fn deterministic_per_seed() {
        let m = fit_from_risk_and_frr(0.05, 3.0).unwrap();
        let cfg = SimulationConfig::new(RiskSource::Beta(m), 4, 50_000, 99).unwrap();
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let other = SimulationConfig {
            root_seed: 100,
            ..cfg
        };
        assert_ne!(simulate(&cfg).unwrap(), simulate(&other).unwrap());
    }

    #[test]
    fn small_runs_still_work() {
        let out = simulate(&SimulationConfig::new(dich(0.5, 3.0, 0.3), 3, 1, 5).unwrap()).unwrap();
        assert_eq!(out.n_families, 1);
    }

    #[test]
    fn sampling_gini_degenerate_and_uniform() {
        let pm = BetaRiskModel::point_mass(0.2).unwrap();
        assert_eq!(estimate_gini_by_sampling(&pm, 10, 0).unwrap().value, 0.0);
        let uniform = BetaRiskModel::from_params(1.0, 1.0).unwrap();
        let est = estimate_gini_by_sampling(&uniform, 400_000, 8).unwrap();
        assert!(
            (est.value - 1.0 / 3.0).abs() < 3.0 * est.std_error,
            "{est:?}"
        );
        assert!(estimate_gini_by_sampling(&uniform, 1, 0).is_err());
    }
}
