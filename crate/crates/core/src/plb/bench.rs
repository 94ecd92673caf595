//! Simulation of perturbed linear bandits: learners, instances and the
//! regret bookkeeping used by the benchmark.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversary::{adversary_step, AdversaryState};
use super::beta::beta_tilde;
use super::ridge::{mlinucb_select, RidgeState, SparseAction};
use crate::error::{PricingError, Result};
use crate::rng::{open_unit, stream, SimRng, Substream};

/// A learner on single-nonzero action sets.
pub trait PlbPolicy: Send {
    /// Probability of choosing each offered action given the current history.
    fn selection_probabilities(&self, t: usize, actions: &[SparseAction<f64>]) -> Result<Vec<f64>>;
    /// Position in `actions` of the chosen action. `t` starts at 1.
    fn select(&mut self, t: usize, actions: &[SparseAction<f64>], rng: &mut SimRng) -> Result<usize>;
    fn update(&mut self, action: &SparseAction<f64>, reward: f64);
}

/// Confidence schedule `β_t = scale · β̃_t(λ, δ, c1, a_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRule {
    pub lambda: f64,
    pub delta: f64,
    pub c1: f64,
    pub a_max: f64,
    pub scale: f64,
}

impl BetaRule {
    pub fn beta(&self, t: usize, d: usize) -> Result<f64> {
        Ok(self.scale * beta_tilde(t, d, self.lambda, self.delta, self.c1, self.a_max)?)
    }
}

pub struct MLinUcb {
    state: RidgeState<f64>,
    rule: BetaRule,
}

impl MLinUcb {
    pub fn new(d: usize, rule: BetaRule) -> Result<Self> {
        Ok(Self { state: RidgeState::new(d, rule.lambda)?, rule })
    }

    pub fn state(&self) -> &RidgeState<f64> {
        &self.state
    }

    fn choose(&self, t: usize, actions: &[SparseAction<f64>]) -> Result<usize> {
        let beta = self.rule.beta(t, self.state.dim())?;
        mlinucb_select(&self.state, actions, beta)
    }
}

impl PlbPolicy for MLinUcb {
    fn selection_probabilities(&self, t: usize, actions: &[SparseAction<f64>]) -> Result<Vec<f64>> {
        let pick = self.choose(t, actions)?;
        Ok((0..actions.len()).map(|i| if i == pick { 1.0 } else { 0.0 }).collect())
    }

    fn select(&mut self, t: usize, actions: &[SparseAction<f64>], _rng: &mut SimRng) -> Result<usize> {
        self.choose(t, actions)
    }

    fn update(&mut self, action: &SparseAction<f64>, reward: f64) {
        self.state.update(action, reward);
    }
}

/// Uniformly random action choice.
#[derive(Debug, Default)]
pub struct UniformPlb;

impl PlbPolicy for UniformPlb {
    fn selection_probabilities(&self, _t: usize, actions: &[SparseAction<f64>]) -> Result<Vec<f64>> {
        if actions.is_empty() {
            return Err(PricingError::EmptyActionSet);
        }
        Ok(vec![1.0 / actions.len() as f64; actions.len()])
    }

    fn select(&mut self, _t: usize, actions: &[SparseAction<f64>], rng: &mut SimRng) -> Result<usize> {
        if actions.is_empty() {
            return Err(PricingError::EmptyActionSet);
        }
        Ok(rng.random_range(0..actions.len()))
    }

    fn update(&mut self, _action: &SparseAction<f64>, _reward: f64) {}
}

/// A bandit instance. Rewards are `value · Bernoulli(ξ_j)`, so every
/// parameter entry must lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlbInstance {
    Stationary { xi: Vec<f64>, actions: Vec<SparseAction<f64>> },
    Adversarial(AdversaryState),
}

impl PlbInstance {
    /// Stationary instance offering a unit action on every arm each round.
    pub fn stationary(xi: Vec<f64>) -> Result<Self> {
        let actions = (0..xi.len()).map(|j| SparseAction::new(j, 1.0)).collect();
        let inst = Self::Stationary { xi, actions };
        inst.validate()?;
        Ok(inst)
    }

    pub fn adversarial(central: Vec<f64>, cp: f64) -> Result<Self> {
        let inst = Self::Adversarial(AdversaryState::new(central, cp)?);
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let in_unit = |xi: &[f64]| xi.iter().all(|v| (0.0..=1.0).contains(v));
        let ok = match self {
            Self::Stationary { xi, actions } => {
                !actions.is_empty() && in_unit(xi) && actions.iter().all(|a| a.index < xi.len())
            }
            Self::Adversarial(adv) => in_unit(&adv.xi_u()) && in_unit(&adv.xi_v()),
        };
        if ok {
            Ok(())
        } else {
            Err(PricingError::InvalidParameter("bandit parameters must lie in [0, 1]".into()))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Stationary { xi, .. } => xi.len(),
            Self::Adversarial(adv) => adv.central().len(),
        }
    }

    pub fn perturbation(&self) -> f64 {
        match self {
            Self::Stationary { .. } => 0.0,
            Self::Adversarial(adv) => adv.perturbation(),
        }
    }

    pub fn max_action_value(&self) -> f64 {
        match self {
            Self::Stationary { actions, .. } => actions.iter().map(|a| a.value.abs()).fold(0.0, f64::max),
            Self::Adversarial(adv) => adv.actions().iter().map(|a| a.value.abs()).fold(0.0, f64::max),
        }
    }
}

/// One round: the parameter in force, the offered actions and the choice.
#[derive(Debug, Clone, PartialEq)]
pub struct PlbRound {
    pub xi: Vec<f64>,
    pub actions: Vec<SparseAction<f64>>,
    pub chosen: usize,
}

impl PlbRound {
    pub fn regret(&self) -> f64 {
        let best = self.actions.iter().map(|a| a.dot(&self.xi)).fold(f64::NEG_INFINITY, f64::max);
        best - self.actions[self.chosen].dot(&self.xi)
    }
}

/// `Σ_t ⟨ξ_t, A*_t − A_t⟩`.
pub fn plb_regret(rounds: &[PlbRound]) -> f64 {
    rounds.iter().map(PlbRound::regret).sum()
}

/// Plays `policy` on `instance` for `horizon` rounds.
pub fn run_plb(
    instance: &PlbInstance,
    policy: &mut dyn PlbPolicy,
    horizon: usize,
    reward_rng: &mut SimRng,
    policy_rng: &mut SimRng,
) -> Result<Vec<PlbRound>> {
    let mut rounds = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let (xi, actions) = match instance {
            PlbInstance::Stationary { xi, actions } => (xi.clone(), actions.clone()),
            PlbInstance::Adversarial(adv) => {
                let actions = adv.actions();
                let probs = policy.selection_probabilities(t, &actions)?;
                (adversary_step(adv, probs[0]).0, actions)
            }
        };
        let chosen = policy.select(t, &actions, policy_rng)?;
        let action = actions[chosen];
        let success = open_unit(reward_rng) < xi[action.index];
        policy.update(&action, if success { action.value } else { 0.0 });
        rounds.push(PlbRound { xi, actions, chosen });
    }
    Ok(rounds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlbRow {
    pub instance: String,
    #[serde(rename = "C_p")]
    pub cp: f64,
    pub replication: usize,
    pub t: usize,
    pub regret: f64,
    pub cum_regret: f64,
}

/// Runs M-LinUCB with `β̃` at `δ = 1/horizon` on each instance for
/// `reps` seeded replications.
pub fn plb_bench(
    instances: &[(String, PlbInstance)],
    horizon: usize,
    reps: usize,
    seed: u64,
    lambda: f64,
) -> Result<Vec<PlbRow>> {
    let mut rows = Vec::new();
    for (name, inst) in instances {
        let rule = BetaRule {
            lambda,
            delta: 1.0 / (horizon.max(2) as f64),
            c1: 1.0,
            a_max: inst.max_action_value(),
            scale: 1.0,
        };
        let per_rep: Vec<Result<Vec<PlbRow>>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut policy = MLinUcb::new(inst.dim(), rule)?;
                let mut reward_rng = stream(seed, rep, Substream::MarketNoise);
                let mut policy_rng = stream(seed, rep, Substream::PolicyInternal);
                let rounds = run_plb(inst, &mut policy, horizon, &mut reward_rng, &mut policy_rng)?;
                let mut cum = 0.0;
                Ok(rounds
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let regret = r.regret();
                        cum += regret;
                        PlbRow {
                            instance: name.clone(),
                            cp: inst.perturbation(),
                            replication: rep,
                            t: i + 1,
                            regret,
                            cum_regret: cum,
                        }
                    })
                    .collect())
            })
            .collect();
        for r in per_rep {
            rows.extend(r?);
        }
    }
    Ok(rows)
}

pub fn write_plb_csv(rows: &[PlbRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
