use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::plb::RidgeState;
use crate::scalar::Scalar;

/// `d` equal cells over `[−‖θ̂‖₁, p_max + ‖θ̂‖₁]`, represented by their midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationGrid<S> {
    pub left: S,
    pub right: S,
    pub midpoints: Vec<S>,
}

impl<S: Scalar> DiscretizationGrid<S> {
    pub fn len(&self) -> usize {
        self.midpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.midpoints.is_empty()
    }

    pub fn cell_width(&self) -> S {
        (self.right - self.left) / S::from_usize_lossy(self.len())
    }
}

pub fn discretize<S: Scalar>(theta_hat: &[S], p_max: S, d: usize) -> Result<DiscretizationGrid<S>> {
    if d == 0 {
        return Err(PricingError::InvalidParameter("grid needs at least one cell".into()));
    }
    let r: S = theta_hat.iter().map(|t| t.abs()).sum();
    let left = -r;
    let right = p_max + r;
    let gap = (right - left) / S::from_usize_lossy(d);
    let half = S::lit(0.5);
    let midpoints = (0..d).map(|j| left + (S::from_usize_lossy(j) + half) * gap).collect();
    Ok(DiscretizationGrid { left, right, midpoints })
}

/// Prices `m_j + xᵀθ̂` that fall strictly inside `(0, p_max)`, with their arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet<S> {
    pub prices: Vec<S>,
    pub arms: Vec<usize>,
}

impl<S> CandidateSet<S> {
    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

pub fn candidate_set<S: Scalar>(grid: &DiscretizationGrid<S>, x: &[S], theta_hat: &[S], p_max: S) -> CandidateSet<S> {
    let shift: S = x.iter().zip(theta_hat).map(|(a, b)| *a * *b).sum();
    let mut prices = Vec::new();
    let mut arms = Vec::new();
    for (j, &m) in grid.midpoints.iter().enumerate() {
        let p = m + shift;
        if p > S::zero() && p < p_max {
            prices.push(p);
            arms.push(j);
        }
    }
    CandidateSet { prices, arms }
}

/// `d_k = ⌈C·⌈(2^{k−2}·ℓ2)^{1/6}⌉⌉` for episode `k ≥ 2`.
pub fn discretization_count(k: usize, l2: usize, c: f64) -> Result<usize> {
    if k < 2 || l2 == 0 || !(c > 0.0) || !c.is_finite() {
        return Err(PricingError::InvalidParameter(format!("bad discretization inputs k={k}, l2={l2}, C={c}")));
    }
    let n = (l2 as u128) << (k - 2);
    // exact integer sixth-root ceiling
    let mut m: u128 = (n as f64).powf(1.0 / 6.0).floor() as u128;
    while m.pow(6) < n {
        m += 1;
    }
    while m > 1 && (m - 1).pow(6) >= n {
        m -= 1;
    }
    let prod = c * m as f64;
    let r = prod.round();
    let d = if (prod - r).abs() <= 1e-9 * prod.abs().max(1.0) { r } else { prod.ceil() };
    Ok((d as usize).max(1))
}

/// Inner pricing rule over a candidate set. Returns the position in `cands`.
///
/// An unpulled arm is always tried first (lowest index); otherwise the price
/// times the upper confidence bound `ξ̂_j + √(β/(λ + diag_j))` is maximized,
/// ties going to the lowest arm.
pub fn inner_b_select<S: Scalar>(ridge: &RidgeState<S>, cands: &CandidateSet<S>, beta: S) -> Result<usize> {
    if cands.is_empty() {
        return Err(PricingError::EmptyActionSet);
    }
    if let Some(&bad) = cands.arms.iter().find(|&&j| j >= ridge.dim()) {
        return Err(PricingError::DimensionMismatch { expected: ridge.dim(), got: bad + 1 });
    }
    let pulls = ridge.pulls();
    if let Some(pos) = (0..cands.arms.len()).filter(|&i| pulls[cands.arms[i]] == 0).min_by_key(|&i| cands.arms[i]) {
        return Ok(pos);
    }
    let mut best = 0;
    let mut best_score = S::neg_infinity();
    for (pos, (&p, &j)) in cands.prices.iter().zip(&cands.arms).enumerate() {
        let ucb = ridge.xi_hat(j) + ridge.width(j, beta);
        let score = p * ucb;
        if score > best_score || (score == best_score && j < cands.arms[best]) {
            best = pos;
            best_score = score;
        }
    }
    Ok(best)
}
