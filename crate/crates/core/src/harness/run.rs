//! One policy against one replication of a market.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::baselines::{RandomPolicy, RmlpConfig, RmlpFamily, RmlpPolicy};
use crate::dip::{Classifier, DipConfig, DipPolicy};
use crate::error::{PricingError, Result};
use crate::market::{Environment, OptimalPrice};
use crate::policy::{PolicyEvents, PricingPolicy};
use crate::rng::{stream, SimRng, Substream};

/// Customers and purchase uniforms for one replication. Every policy run on
/// the same path sees the same covariates and the same uniform at step `t`.
#[derive(Debug, Clone)]
pub struct MarketPath {
    pub xs: Vec<Vec<f64>>,
    pub uniforms: Vec<f64>,
    /// Clairvoyant prices; `None` when regret is not tracked.
    pub optimal: Option<Vec<OptimalPrice>>,
}

impl MarketPath {
    pub fn generate(env: &Environment, horizon: usize, master: u64, replication: usize, with_optimum: bool) -> Result<Self> {
        let mut cov_rng = stream(master, replication, Substream::Covariates);
        let mut noise_rng = stream(master, replication, Substream::MarketNoise);
        let xs: Vec<Vec<f64>> = (0..horizon).map(|t| env.covariates.generate(t, &mut cov_rng)).collect();
        let uniforms = (0..horizon).map(|_| rand::Rng::random::<f64>(&mut noise_rng)).collect();
        let optimal = if with_optimum {
            Some(xs.iter().map(|x| env.model.optimal_price(x)).collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        Ok(Self { xs, uniforms, optimal })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub samples: usize,
    pub theta_hat: Vec<f64>,
    pub l1_err: f64,
    pub l2_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub price: f64,
    pub purchased: bool,
    pub optimal_price: Option<f64>,
    pub regret: Option<f64>,
    pub cum_regret: Option<f64>,
}

/// Everything a run emits. Regret vectors are empty when the path carries
/// no clairvoyant prices.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub policy: String,
    pub replication: usize,
    pub prices: Vec<f64>,
    pub purchased: Vec<bool>,
    pub optimal_prices: Vec<f64>,
    pub regret: Vec<f64>,
    pub cum_regret: Vec<f64>,
    pub episodes: Vec<EpisodeRecord>,
    pub events: PolicyEvents,
}

impl RunTrace {
    pub fn steps(&self) -> impl Iterator<Item = StepRecord> + '_ {
        (0..self.prices.len()).map(|i| StepRecord {
            t: i + 1,
            price: self.prices[i],
            purchased: self.purchased[i],
            optimal_price: self.optimal_prices.get(i).copied(),
            regret: self.regret.get(i).copied(),
            cum_regret: self.cum_regret.get(i).copied(),
        })
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.cum_regret.last().copied()
    }
}

pub fn run_policy(env: &Environment, path: &MarketPath, policy: &mut dyn PricingPolicy, replication: usize) -> Result<RunTrace> {
    let model = &env.model;
    let n = path.len();
    let mut trace = RunTrace {
        policy: policy.name().to_string(),
        replication,
        prices: Vec::with_capacity(n),
        purchased: Vec::with_capacity(n),
        optimal_prices: Vec::new(),
        regret: Vec::new(),
        cum_regret: Vec::new(),
        episodes: Vec::new(),
        events: PolicyEvents::default(),
    };
    let mut cum = 0.0;
    for (t, (x, &u)) in path.xs.iter().zip(&path.uniforms).enumerate() {
        let p = policy.price(x)?;
        let prob = model.purchase_probability(x, p)?;
        let purchased = model.outcome_from_uniform(t + 1, x, p, prob, u).purchased;
        if let Some(opt) = &path.optimal {
            let r = model.regret_against(x, p, &opt[t])?;
            cum += r;
            trace.optimal_prices.push(opt[t].price);
            trace.regret.push(r);
            trace.cum_regret.push(cum);
        }
        trace.prices.push(p);
        trace.purchased.push(purchased);
        policy.observe(x, p, purchased)?;
    }
    let theta0 = model.theta0();
    trace.episodes = policy
        .estimates()
        .iter()
        .map(|e| {
            let diff = e.theta_hat.iter().zip(theta0).map(|(a, b)| a - b);
            EpisodeRecord {
                episode: e.episode,
                samples: e.samples,
                theta_hat: e.theta_hat.clone(),
                l1_err: diff.clone().map(f64::abs).sum(),
                l2_err: diff.map(|v| v * v).sum::<f64>().sqrt(),
            }
        })
        .collect();
    trace.events = policy.events();
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Dip,
    DipSvm,
    Rmlp,
    Rmlp2,
    Random,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [Self::Dip, Self::DipSvm, Self::Rmlp, Self::Rmlp2, Self::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dip => "dip",
            Self::DipSvm => "dip-svm",
            Self::Rmlp => "rmlp",
            Self::Rmlp2 => "rmlp2",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PricingError::UnknownPolicy(s.to_string()))
    }
}

/// Policy parameters shared by an experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicySettings {
    pub dip: DipConfig,
    pub rmlp: RmlpConfig,
}

/// Builds a policy for one replication. All policies draw their random
/// first-episode prices from the same substream.
pub fn build_policy(
    kind: PolicyKind,
    settings: &PolicySettings,
    env: &Environment,
    horizon: usize,
    master: u64,
    replication: usize,
) -> Result<Box<dyn PricingPolicy>> {
    let dim = env.model.dim();
    let explore: SimRng = stream(master, replication, Substream::PolicyExploration);
    let internal_seed = stream(master, replication, Substream::PolicyInternal).next_u64();
    Ok(match kind {
        PolicyKind::Dip | PolicyKind::DipSvm => {
            let classifier = if kind == PolicyKind::Dip { Classifier::Logistic } else { Classifier::Svm };
            let config = DipConfig { classifier, ..settings.dip };
            Box::new(DipPolicy::new(config, dim, horizon, explore, internal_seed)?)
        }
        PolicyKind::Rmlp => Box::new(RmlpPolicy::new(RmlpFamily::LogisticKnown, settings.rmlp, dim, horizon, explore)?),
        PolicyKind::Rmlp2 => {
            Box::new(RmlpPolicy::new(RmlpFamily::LogisticLocationScale, settings.rmlp, dim, horizon, explore)?)
        }
        PolicyKind::Random => Box::new(RandomPolicy::new(env.model.p_max(), explore)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::preset;

    #[test]
    fn policy_names_round_trip() {
        for k in PolicyKind::ALL {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("ucb".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn cumulative_regret_is_nondecreasing_and_episodes_follow_schedule() {
        let env = preset("example1").unwrap();
        let horizon = 3000;
        let path = MarketPath::generate(&env, horizon, 5, 0, true).unwrap();
        let settings = PolicySettings {
            dip: DipConfig { alpha1: 500, alpha2: 500, ..Default::default() },
            ..Default::default()
        };
        let mut policy = build_policy(PolicyKind::Dip, &settings, &env, horizon, 5, 0).unwrap();
        let trace = run_policy(&env, &path, policy.as_mut(), 0).unwrap();
        assert!(trace.cum_regret.windows(2).all(|w| w[1] >= w[0]));
        assert!(trace.regret.iter().all(|r| *r >= 0.0));
        let lengths: Vec<usize> = trace.episodes.iter().map(|e| e.samples).collect();
        assert_eq!(lengths, vec![500, 500, 1000, 1000]);
        assert!(trace.steps().all(|s| s.price > 0.0 && s.price < 30.0));
    }

    #[test]
    fn policies_share_customers_and_first_episode_prices() {
        let env = preset("example1").unwrap();
        let path = MarketPath::generate(&env, 600, 9, 2, false).unwrap();
        let settings = PolicySettings {
            dip: DipConfig { alpha1: 300, alpha2: 300, ..Default::default() },
            rmlp: RmlpConfig { alpha1: 300, alpha2: 300, ..Default::default() },
        };
        let mut dip = build_policy(PolicyKind::Dip, &settings, &env, 600, 9, 2).unwrap();
        let mut rmlp = build_policy(PolicyKind::Rmlp, &settings, &env, 600, 9, 2).unwrap();
        let a = run_policy(&env, &path, dip.as_mut(), 2).unwrap();
        let b = run_policy(&env, &path, rmlp.as_mut(), 2).unwrap();
        assert_eq!(a.prices[..300], b.prices[..300]);
        assert_eq!(a.purchased[..300], b.purchased[..300]);
        assert!(a.regret.is_empty());
    }
}
