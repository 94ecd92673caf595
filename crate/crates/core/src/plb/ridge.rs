use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::scalar::Scalar;

/// An action with exactly one nonzero coordinate: `value` on arm `index`
/// (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseAction<S> {
    pub index: usize,
    pub value: S,
}

impl<S: Scalar> SparseAction<S> {
    pub fn new(index: usize, value: S) -> Self {
        Self { index, value }
    }

    /// `⟨ξ, a⟩`.
    pub fn dot(&self, xi: &[S]) -> S {
        xi[self.index] * self.value
    }
}

/// Ridge statistics for single-nonzero actions.
///
/// `V(λ) = λI + Σ A Aᵀ` stays diagonal, so only the diagonal is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeState<S> {
    lambda: S,
    diag: Vec<S>,
    resp: Vec<S>,
    pulls: Vec<u64>,
}

impl<S: Scalar> RidgeState<S> {
    pub fn new(d: usize, lambda: S) -> Result<Self> {
        if d == 0 {
            return Err(PricingError::InvalidParameter("arm count must be positive".into()));
        }
        if !(lambda > S::zero()) || !lambda.is_finite() {
            return Err(PricingError::InvalidParameter(format!("ridge lambda must be positive, got {lambda}")));
        }
        Ok(Self { lambda, diag: vec![S::zero(); d], resp: vec![S::zero(); d], pulls: vec![0; d] })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn diag(&self) -> &[S] {
        &self.diag
    }

    pub fn resp(&self) -> &[S] {
        &self.resp
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Ridge estimate `ξ̂_j = resp[j] / (λ + diag[j])`.
    pub fn xi_hat(&self, j: usize) -> S {
        self.resp[j] / (self.lambda + self.diag[j])
    }

    /// `√(β / (λ + diag[j]))`, the confidence radius for a unit action on arm `j`.
    pub fn width(&self, j: usize, beta: S) -> S {
        (beta / (self.lambda + self.diag[j])).sqrt()
    }

    pub fn update(&mut self, action: &SparseAction<S>, reward: S) {
        let j = action.index;
        self.diag[j] = self.diag[j] + action.value * action.value;
        self.resp[j] = self.resp[j] + action.value * reward;
        self.pulls[j] += 1;
    }
}

/// The M-LinUCB decision rule. Returns the position in `actions` of the
/// chosen action.
///
/// If an offered arm has never been pulled, the action on the lowest such arm
/// is chosen. Otherwise the action maximizing
/// `value·ξ̂ + √β·|value| / √(λ + diag)` wins, ties going to the lowest arm.
pub fn mlinucb_select<S: Scalar>(state: &RidgeState<S>, actions: &[SparseAction<S>], beta: S) -> Result<usize> {
    if actions.is_empty() {
        return Err(PricingError::EmptyActionSet);
    }
    if let Some(bad) = actions.iter().find(|a| a.index >= state.dim()) {
        return Err(PricingError::DimensionMismatch { expected: state.dim(), got: bad.index + 1 });
    }
    let unexplored = actions
        .iter()
        .enumerate()
        .filter(|(_, a)| state.pulls[a.index] == 0)
        .min_by_key(|(_, a)| a.index);
    if let Some((pos, _)) = unexplored {
        return Ok(pos);
    }
    let root_beta = beta.sqrt();
    let mut best: Option<(usize, S, usize)> = None;
    for (pos, a) in actions.iter().enumerate() {
        let j = a.index;
        let score = a.value * state.xi_hat(j) + root_beta * a.value.abs() / (state.lambda + state.diag[j]).sqrt();
        let better = match best {
            None => true,
            Some((_, s, arm)) => score > s || (score == s && j < arm),
        };
        if better {
            best = Some((pos, score, j));
        }
    }
    Ok(best.map(|(pos, _, _)| pos).expect("non-empty action set"))
}
