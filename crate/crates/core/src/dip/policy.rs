use log::debug;
use serde::{Deserialize, Serialize};

use super::grid::{candidate_set, discretization_count, discretize, inner_b_select, DiscretizationGrid};
use super::inner_a::{inner_a_estimate, Classifier, ThetaEstimate};
use super::schedule::build_schedule;
use crate::error::{PricingError, Result};
use crate::plb::{beta_tilde, mlinucb_select, RidgeState, SparseAction};
use crate::policy::{EpisodeEstimate, EpisodeTracker, PolicyEvents, PricingPolicy};
use crate::rng::{open_unit, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DipConfig {
    pub alpha1: usize,
    pub alpha2: usize,
    pub p_max: f64,
    /// Discretization constant `C` in `d_k = ⌈C·⌈(2^{k−2}ℓ2)^{1/6}⌉⌉`.
    pub c: f64,
    pub lambda: f64,
    /// ℓ1 budget `W` for `θ̂`.
    pub w: f64,
    /// Multiplier on the confidence term: `β_t = beta_scale·(1 ∨ (…)²)`.
    /// Setting it to `p_max²` gives the worst-case radius.
    pub beta_scale: f64,
    pub classifier: Classifier,
}

impl Default for DipConfig {
    fn default() -> Self {
        Self {
            alpha1: 1 << 11,
            alpha2: 1 << 11,
            p_max: 30.0,
            c: 20.0,
            lambda: 0.1,
            w: 1e4,
            beta_scale: 1.0 / 40.0,
            classifier: Classifier::Logistic,
        }
    }
}

impl DipConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.p_max, self.c, self.lambda, self.w, self.beta_scale];
        if self.alpha1 == 0 || self.alpha2 == 0 || positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(PricingError::InvalidParameter(format!("invalid DIP configuration {self:?}")));
        }
        Ok(())
    }

    /// `β_t` for within-episode step `t` on `d` arms at confidence `δ`.
    pub fn beta(&self, t: usize, d: usize, delta: f64) -> Result<f64> {
        Ok(self.beta_scale * beta_tilde(t, d, self.lambda, delta, 1.0 / self.p_max, self.p_max)?)
    }
}

/// How the inner pricing step computes its choice. Both produce the same
/// prices; the bandit form exists to check that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UcbEngine {
    /// Price times upper confidence bound on the purchase probability.
    Direct,
    /// Generic M-LinUCB on actions `(arm, price)`.
    MLinUcb,
}

#[derive(Debug, Clone)]
struct EpisodeState {
    grid: DiscretizationGrid<f64>,
    ridge: RidgeState<f64>,
    delta: f64,
}

#[derive(Debug)]
pub struct DipPolicy {
    name: String,
    config: DipConfig,
    engine: UcbEngine,
    tracker: EpisodeTracker,
    theta_hat: Vec<f64>,
    state: Option<EpisodeState>,
    pending_arm: Option<usize>,
    estimates: Vec<EpisodeEstimate>,
    fits: Vec<ThetaEstimate>,
    events: PolicyEvents,
    rng: SimRng,
    seed: u64,
}

impl DipPolicy {
    /// `rng` drives the random prices of the first episode; `seed` feeds the
    /// SVM solver when that classifier is selected.
    pub fn new(config: DipConfig, dim: usize, horizon: usize, rng: SimRng, seed: u64) -> Result<Self> {
        config.validate()?;
        let name = match config.classifier {
            Classifier::Logistic => "dip",
            Classifier::Svm => "dip-svm",
        };
        Ok(Self {
            name: name.to_string(),
            config,
            engine: UcbEngine::Direct,
            tracker: EpisodeTracker::new(build_schedule(horizon, config.alpha1, config.alpha2)?),
            theta_hat: vec![0.0; dim],
            state: None,
            pending_arm: None,
            estimates: Vec::new(),
            fits: Vec::new(),
            events: PolicyEvents::default(),
            rng,
            seed,
        })
    }

    pub fn with_engine(mut self, engine: UcbEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn config(&self) -> &DipConfig {
        &self.config
    }

    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    /// Classifier diagnostics for each completed episode.
    pub fn fits(&self) -> &[ThetaEstimate] {
        &self.fits
    }

    /// Arm count of the running episode, if it uses the bandit step.
    pub fn arm_count(&self) -> Option<usize> {
        self.state.as_ref().map(|s| s.grid.len())
    }

    fn start_episode(&mut self, k: usize) -> Result<()> {
        let schedule = self.tracker.schedule();
        let d = discretization_count(k, schedule.alpha2, self.config.c)?;
        let delta = 1.0 / schedule.nominal_length(k) as f64;
        let grid = discretize(&self.theta_hat, self.config.p_max, d)?;
        debug!("episode {k}: {d} arms, delta {delta:e}, theta_hat {:?}", self.theta_hat);
        self.state = Some(EpisodeState { grid, ridge: RidgeState::new(d, self.config.lambda)?, delta });
        Ok(())
    }
}

impl PricingPolicy for DipPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn price(&mut self, x: &[f64]) -> Result<f64> {
        self.pending_arm = None;
        let Some(state) = &self.state else {
            return Ok(self.config.p_max * open_unit(&mut self.rng));
        };
        let cands = candidate_set(&state.grid, x, &self.theta_hat, self.config.p_max);
        if cands.is_empty() {
            self.events.empty_candidate_sets += 1;
            debug!("no grid price inside (0, p_max); posting p_max/2");
            return Ok(self.config.p_max / 2.0);
        }
        let beta = self.config.beta(self.tracker.step_in_episode(), state.grid.len(), state.delta)?;
        let pos = match self.engine {
            UcbEngine::Direct => inner_b_select(&state.ridge, &cands, beta)?,
            UcbEngine::MLinUcb => {
                let actions: Vec<SparseAction<f64>> =
                    cands.arms.iter().zip(&cands.prices).map(|(&j, &p)| SparseAction::new(j, p)).collect();
                mlinucb_select(&state.ridge, &actions, beta)?
            }
        };
        self.pending_arm = Some(cands.arms[pos]);
        Ok(cands.prices[pos])
    }

    fn observe(&mut self, x: &[f64], price: f64, purchased: bool) -> Result<()> {
        if let (Some(arm), Some(state)) = (self.pending_arm.take(), self.state.as_mut()) {
            let reward = if purchased { price } else { 0.0 };
            state.ridge.update(&SparseAction::new(arm, price), reward);
        }
        let finished_episode = self.tracker.episode();
        if let Some(data) = self.tracker.record(x, price, purchased) {
            let fit = inner_a_estimate(
                &data,
                &self.theta_hat,
                self.config.w,
                self.config.classifier,
                self.seed ^ finished_episode as u64,
            )?;
            self.events.single_class_episodes += u64::from(fit.kept_previous);
            self.events.degenerate_fits += u64::from(fit.degenerate);
            self.events.unconverged_fits += u64::from(!fit.converged && !fit.kept_previous && !fit.degenerate);
            self.theta_hat = fit.theta_hat.clone();
            self.estimates.push(EpisodeEstimate {
                episode: finished_episode,
                samples: data.len(),
                theta_hat: fit.theta_hat.clone(),
            });
            self.fits.push(fit);
            if self.tracker.finished() {
                self.state = None;
            } else {
                self.start_episode(finished_episode + 1)?;
            }
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
