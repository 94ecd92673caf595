use log::warn;
use serde::{Deserialize, Serialize};

use crate::dip::{augmented_rows, build_schedule, l1_project};
use crate::error::{PricingError, Result};
use crate::estimation::{logistic_fit, LogisticOptions};
use crate::market::{maximize_revenue, NoiseDistribution, OptimizerOptions};
use crate::policy::{EpisodeData, EpisodeEstimate, EpisodeTracker, PolicyEvents, PricingPolicy};
use crate::rng::{open_unit, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RmlpFamily {
    /// Noise is logistic with location 0 and scale 1.
    LogisticKnown,
    /// Noise is logistic with unknown location and scale.
    LogisticLocationScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RmlpConfig {
    pub alpha1: usize,
    pub alpha2: usize,
    pub p_max: f64,
    pub w: f64,
}

impl Default for RmlpConfig {
    fn default() -> Self {
        Self { alpha1: 1 << 11, alpha2: 1 << 11, p_max: 30.0, w: 1e4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmlpEstimate {
    pub theta_hat: Vec<f64>,
    pub mu: f64,
    pub scale: f64,
    pub converged: bool,
}

/// Fits the assumed model on one episode. `Ok(None)` means the data cannot
/// support a fit (one class, too few points, or a price coefficient with the
/// wrong sign) and the caller should keep its previous model.
pub fn rmlp_estimate(data: &EpisodeData, dim: usize, family: RmlpFamily, radius: f64) -> Result<Option<RmlpEstimate>> {
    if data.len() < dim + 2 || !data.has_both_classes() {
        warn!("episode with {} points cannot be fitted", data.len());
        return Ok(None);
    }
    let opts = LogisticOptions::default();
    match family {
        RmlpFamily::LogisticKnown => {
            // P(buy) = σ(xᵀθ − p): regress on x with offset −p, no intercept.
            let offset: Vec<f64> = data.prices.iter().map(|p| -p).collect();
            let fit = logistic_fit(&data.xs, &data.purchased, Some(&offset), &opts)?;
            Ok(Some(RmlpEstimate {
                theta_hat: l1_project(&fit.coef, radius),
                mu: 0.0,
                scale: 1.0,
                converged: fit.converged,
            }))
        }
        RmlpFamily::LogisticLocationScale => {
            // P(buy) = σ((xᵀθ + μ − p)/s): coefficients (μ/s, θ/s, −1/s).
            let fit = logistic_fit(&augmented_rows(data), &data.purchased, None, &opts)?;
            let b = fit.coef[dim + 1];
            if !(b < 0.0) {
                warn!("price coefficient {b} is not negative; keeping previous model");
                return Ok(None);
            }
            let theta: Vec<f64> = fit.coef[1..=dim].iter().map(|beta| -beta / b).collect();
            Ok(Some(RmlpEstimate {
                theta_hat: l1_project(&theta, radius),
                mu: -fit.coef[0] / b,
                scale: -1.0 / b,
                converged: fit.converged,
            }))
        }
    }
}

/// Greedy price under the fitted model.
pub fn rmlp_price(est: &RmlpEstimate, x: &[f64], p_max: f64, opts: &OptimizerOptions) -> Result<f64> {
    let noise = NoiseDistribution::logistic(est.mu, est.scale)?;
    let q: f64 = x.iter().zip(&est.theta_hat).map(|(a, b)| a * b).sum();
    Ok(maximize_revenue(&noise, q, p_max, opts).price)
}

#[derive(Debug)]
pub struct RmlpPolicy {
    family: RmlpFamily,
    config: RmlpConfig,
    dim: usize,
    tracker: EpisodeTracker,
    model: Option<RmlpEstimate>,
    estimates: Vec<EpisodeEstimate>,
    events: PolicyEvents,
    rng: SimRng,
    opts: OptimizerOptions,
}

impl RmlpPolicy {
    pub fn new(family: RmlpFamily, config: RmlpConfig, dim: usize, horizon: usize, rng: SimRng) -> Result<Self> {
        if !(config.p_max > 0.0 && config.w > 0.0) {
            return Err(PricingError::InvalidParameter(format!("invalid RMLP configuration {config:?}")));
        }
        Ok(Self {
            family,
            config,
            dim,
            tracker: EpisodeTracker::new(build_schedule(horizon, config.alpha1, config.alpha2)?),
            model: None,
            estimates: Vec::new(),
            events: PolicyEvents::default(),
            rng,
            opts: OptimizerOptions::default(),
        })
    }

    pub fn model(&self) -> Option<&RmlpEstimate> {
        self.model.as_ref()
    }
}

impl PricingPolicy for RmlpPolicy {
    fn name(&self) -> &str {
        match self.family {
            RmlpFamily::LogisticKnown => "rmlp",
            RmlpFamily::LogisticLocationScale => "rmlp2",
        }
    }

    fn price(&mut self, x: &[f64]) -> Result<f64> {
        match &self.model {
            None => Ok(self.config.p_max * open_unit(&mut self.rng)),
            Some(est) => rmlp_price(est, x, self.config.p_max, &self.opts),
        }
    }

    fn observe(&mut self, x: &[f64], price: f64, purchased: bool) -> Result<()> {
        let episode = self.tracker.episode();
        if let Some(data) = self.tracker.record(x, price, purchased) {
            match rmlp_estimate(&data, self.dim, self.family, self.config.w)? {
                Some(est) => {
                    self.events.unconverged_fits += u64::from(!est.converged);
                    self.model = Some(est);
                }
                None if data.has_both_classes() => self.events.degenerate_fits += 1,
                None => self.events.single_class_episodes += 1,
            }
            let theta_hat = self.model.as_ref().map_or_else(|| vec![0.0; self.dim], |m| m.theta_hat.clone());
            self.estimates.push(EpisodeEstimate { episode, samples: data.len(), theta_hat });
        }
        Ok(())
    }

    fn estimates(&self) -> &[EpisodeEstimate] {
        &self.estimates
    }

    fn events(&self) -> PolicyEvents {
        self.events
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Substream};
    use rand::Rng;

    fn logistic_data(theta: &[f64], mu: f64, s: f64, n: usize, seed: u64) -> EpisodeData {
        let noise = NoiseDistribution::logistic(mu, s).unwrap();
        let mut rng = stream(seed, 0, Substream::Data);
        let mut data = EpisodeData::default();
        for _ in 0..n {
            let x: Vec<f64> = theta.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let q: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            let p = rng.random_range(0.01..12.0);
            let buy = open_unit(&mut rng) >= noise.cdf(p - q);
            data.push(&x, p, buy);
        }
        data
    }

    #[test]
    fn known_logistic_recovers_theta() {
        let data = logistic_data(&[2.0, 3.0], 0.0, 1.0, 100_000, 1);
        let est = rmlp_estimate(&data, 2, RmlpFamily::LogisticKnown, 1e4).unwrap().unwrap();
        let err = ((est.theta_hat[0] - 2.0).powi(2) + (est.theta_hat[1] - 3.0).powi(2)).sqrt();
        assert!(err <= 0.05, "{:?}", est.theta_hat);
    }

    #[test]
    fn location_scale_family_recovers_all_parameters() {
        let data = logistic_data(&[2.0, 3.0], 2.0, 3.0, 100_000, 2);
        let est = rmlp_estimate(&data, 2, RmlpFamily::LogisticLocationScale, 1e4).unwrap().unwrap();
        assert!((est.theta_hat[0] / 2.0 - 1.0).abs() <= 0.05, "{:?}", est);
        assert!((est.theta_hat[1] / 3.0 - 1.0).abs() <= 0.05, "{:?}", est);
        assert!((est.mu / 2.0 - 1.0).abs() <= 0.05, "{:?}", est);
        assert!((est.scale / 3.0 - 1.0).abs() <= 0.05, "{:?}", est);

        let unit = logistic_data(&[1.0], 0.0, 1.0, 100_000, 3);
        let est = rmlp_estimate(&unit, 1, RmlpFamily::LogisticLocationScale, 1e4).unwrap().unwrap();
        assert!((est.scale - 1.0).abs() < 0.05);
    }

    #[test]
    fn wrong_sign_price_effect_is_rejected() {
        let mut data = EpisodeData::default();
        for i in 0..200 {
            let p = 0.1 + 0.1 * f64::from(i);
            data.push(&[0.5], p, i % 3 != 0 && p > 5.0);
        }
        assert!(rmlp_estimate(&data, 1, RmlpFamily::LogisticLocationScale, 1e4).unwrap().is_none());
    }

    #[test]
    fn greedy_prices() {
        let opts = OptimizerOptions::default();
        let est = RmlpEstimate { theta_hat: vec![0.0], mu: 0.0, scale: 1.0, converged: true };
        let p = rmlp_price(&est, &[1.0], 30.0, &opts).unwrap();
        assert!((p - 1.278_464_542_761_073_8).abs() < 1e-5, "{p}");
        let sharp = RmlpEstimate { theta_hat: vec![10.0], mu: 0.0, scale: 1e-3, converged: true };
        let p = rmlp_price(&sharp, &[1.0], 30.0, &opts).unwrap();
        assert!(p < 10.0 && p > 9.95, "{p}");
        let high = RmlpEstimate { theta_hat: vec![100.0], mu: 0.0, scale: 1.0, converged: true };
        let p = rmlp_price(&high, &[1.0], 30.0, &opts).unwrap();
        assert!(p > 29.9 && p < 30.0, "{p}");
    }

    #[test]
    fn starts_with_random_prices_then_goes_greedy() {
        let mut pol =
            RmlpPolicy::new(RmlpFamily::LogisticKnown, RmlpConfig { alpha1: 500, alpha2: 500, ..Default::default() }, 1, 2000, stream(4, 0, Substream::PolicyExploration))
                .unwrap();
        let data = logistic_data(&[5.0], 0.0, 1.0, 2000, 5);
        for i in 0..2000 {
            let x = &data.xs[i];
            let p = pol.price(x).unwrap();
            let q = 5.0 * x[0];
            let buy = open_unit(&mut stream(6, i, Substream::MarketNoise)) < 1.0 / (1.0 + (p - q).exp());
            pol.observe(x, p, buy).unwrap();
        }
        assert_eq!(pol.estimates().len(), 3);
        assert!((pol.model().unwrap().theta_hat[0] - 5.0).abs() < 1.0);
    }
}
