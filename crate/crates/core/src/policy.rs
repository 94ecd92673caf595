//! The interface every pricing policy implements, plus the episode
//! bookkeeping shared by the episodic learners.

use serde::{Deserialize, Serialize};

use crate::dip::schedule::EpisodeSchedule;
use crate::error::Result;

pub trait PricingPolicy: Send {
    fn name(&self) -> &str;
    /// Posts a price in `(0, p_max)` for the next customer.
    fn price(&mut self, x: &[f64]) -> Result<f64>;
    /// Feeds back the outcome of the last posted price.
    fn observe(&mut self, x: &[f64], price: f64, purchased: bool) -> Result<()>;
    /// Parameter estimates fitted so far, one per completed episode.
    fn estimates(&self) -> &[EpisodeEstimate] {
        &[]
    }
    fn events(&self) -> PolicyEvents {
        PolicyEvents::default()
    }
}

/// Counters for the rare fallbacks a policy may take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyEvents {
    pub empty_candidate_sets: u64,
    pub single_class_episodes: u64,
    pub degenerate_fits: u64,
    pub unconverged_fits: u64,
}

impl PolicyEvents {
    pub fn merge(&mut self, other: &PolicyEvents) {
        self.empty_candidate_sets += other.empty_candidate_sets;
        self.single_class_episodes += other.single_class_episodes;
        self.degenerate_fits += other.degenerate_fits;
        self.unconverged_fits += other.unconverged_fits;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeEstimate {
    /// 1-based episode whose data produced the estimate.
    pub episode: usize,
    pub samples: usize,
    pub theta_hat: Vec<f64>,
}

/// Observations collected during one episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeData {
    pub xs: Vec<Vec<f64>>,
    pub prices: Vec<f64>,
    pub purchased: Vec<bool>,
}

impl EpisodeData {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn push(&mut self, x: &[f64], price: f64, purchased: bool) {
        self.xs.push(x.to_vec());
        self.prices.push(price);
        self.purchased.push(purchased);
    }

    pub fn has_both_classes(&self) -> bool {
        self.purchased.iter().any(|&y| y) && self.purchased.iter().any(|&y| !y)
    }
}

/// Walks through an [`EpisodeSchedule`], buffering the current episode.
#[derive(Debug, Clone)]
pub struct EpisodeTracker {
    schedule: EpisodeSchedule,
    episode: usize,
    offset: usize,
    buffer: EpisodeData,
}

impl EpisodeTracker {
    pub fn new(schedule: EpisodeSchedule) -> Self {
        Self { schedule, episode: 0, offset: 0, buffer: EpisodeData::default() }
    }

    pub fn schedule(&self) -> &EpisodeSchedule {
        &self.schedule
    }

    /// 1-based index of the running episode.
    pub fn episode(&self) -> usize {
        self.episode + 1
    }

    /// 1-based step within the running episode, for the step about to be played.
    pub fn step_in_episode(&self) -> usize {
        self.offset + 1
    }

    pub fn finished(&self) -> bool {
        self.episode >= self.schedule.lengths.len()
    }

    /// Records one step; returns the completed episode's data when this
    /// step closes an episode.
    pub fn record(&mut self, x: &[f64], price: f64, purchased: bool) -> Option<EpisodeData> {
        self.buffer.push(x, price, purchased);
        self.offset += 1;
        let len = self.schedule.lengths.get(self.episode).copied().unwrap_or(usize::MAX);
        if self.offset >= len {
            self.episode += 1;
            self.offset = 0;
            Some(std::mem::take(&mut self.buffer))
        } else {
            None
        }
    }
}
