use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Episode lengths of the doubling scheme: `ℓ_1 = α1`, `ℓ_k = 2^{k−2}·α2`,
/// with the last episode truncated so the lengths sum to `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSchedule {
    pub total: usize,
    pub alpha1: usize,
    pub alpha2: usize,
    pub lengths: Vec<usize>,
}

impl EpisodeSchedule {
    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    /// Untruncated length `2^{k−2}·α2` of episode `k ≥ 2`.
    pub fn nominal_length(&self, k: usize) -> usize {
        debug_assert!(k >= 2);
        self.alpha2 << (k - 2)
    }

    /// 0-based first step of episode `k` (1-based).
    pub fn start(&self, k: usize) -> usize {
        self.lengths[..k - 1].iter().sum()
    }
}

/// Smallest `m` with `2^m ≥ (T − α1)/α2 + 1`, i.e. `α2·(2^m − 1) ≥ T − α1`.
fn doubling_exponent(rest: usize, alpha2: usize) -> usize {
    let mut m = 0;
    while (alpha2 as u128) * ((1u128 << m) - 1) < rest as u128 {
        m += 1;
    }
    m
}

pub fn build_schedule(total: usize, alpha1: usize, alpha2: usize) -> Result<EpisodeSchedule> {
    if total == 0 || alpha1 == 0 || alpha2 == 0 {
        return Err(PricingError::InvalidParameter("horizon and episode seeds must be positive".into()));
    }
    let lengths = if total <= alpha1 {
        vec![total]
    } else if total <= alpha1 + alpha2 {
        vec![alpha1, total - alpha1]
    } else {
        let n = doubling_exponent(total - alpha1, alpha2) + 1;
        let mut lengths = vec![alpha1];
        lengths.extend((2..n).map(|k| alpha2 << (k - 2)));
        lengths.push(total - alpha1 - alpha2 * ((1 << (n - 2)) - 1));
        lengths
    };
    Ok(EpisodeSchedule { total, alpha1, alpha2, lengths })
}
