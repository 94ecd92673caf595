//! Two-action adversary realizing the `C₀·C_p·T₀` regret lower bound.
//!
//! With `u < v` the two smallest central entries and `C = C_p/2`, the actions
//! are `U = e_{j_u}/(u+C)` and `V = e_{j_v}/(v+C)`. Each round the adversary
//! tilts the parameter against whichever action the learner favours.

use serde::{Deserialize, Serialize};

use super::ridge::SparseAction;
use crate::error::{PricingError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryState {
    central: Vec<f64>,
    cp: f64,
    ju: usize,
    jv: usize,
}

impl AdversaryState {
    pub fn new(central: Vec<f64>, cp: f64) -> Result<Self> {
        if central.len() < 2 {
            return Err(PricingError::InvalidParameter("adversary needs at least two arms".into()));
        }
        if central.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(PricingError::InvalidParameter("central parameter must be positive".into()));
        }
        let mut order: Vec<usize> = (0..central.len()).collect();
        order.sort_by(|&a, &b| central[a].total_cmp(&central[b]).then(a.cmp(&b)));
        let (ju, jv) = (order[0], order[1]);
        if !(cp >= 0.0) || cp / 2.0 >= central[ju] {
            return Err(PricingError::InvalidParameter(format!(
                "perturbation {cp} must satisfy 0 <= C_p/2 < min central = {}",
                central[ju]
            )));
        }
        Ok(Self { central, cp, ju, jv })
    }

    pub fn central(&self) -> &[f64] {
        &self.central
    }

    pub fn perturbation(&self) -> f64 {
        self.cp
    }

    fn half(&self) -> f64 {
        self.cp / 2.0
    }

    pub fn u(&self) -> f64 {
        self.central[self.ju]
    }

    pub fn v(&self) -> f64 {
        self.central[self.jv]
    }

    pub fn action_u(&self) -> SparseAction<f64> {
        SparseAction::new(self.ju, 1.0 / (self.u() + self.half()))
    }

    pub fn action_v(&self) -> SparseAction<f64> {
        SparseAction::new(self.jv, 1.0 / (self.v() + self.half()))
    }

    /// The round's action set `[U, V]`.
    pub fn actions(&self) -> Vec<SparseAction<f64>> {
        vec![self.action_u(), self.action_v()]
    }

    /// Parameter that makes `V` optimal.
    pub fn xi_u(&self) -> Vec<f64> {
        let mut xi = self.central.clone();
        xi[self.ju] = self.u() - self.half();
        xi[self.jv] = self.v() + self.half();
        xi
    }

    /// Parameter that makes `U` optimal.
    pub fn xi_v(&self) -> Vec<f64> {
        let mut xi = self.central.clone();
        xi[self.ju] = self.u() + self.half();
        xi[self.jv] = self.v() - self.half();
        xi
    }

    /// `C₀ = 1/(4v)`: the lower bound reads `E[R] ≥ C₀·C_p·T₀`.
    pub fn lower_bound_constant(&self) -> f64 {
        1.0 / (4.0 * self.v())
    }
}

/// Picks this round's parameter given the learner's probability of choosing
/// `U`, and returns it with the action that is optimal under it.
pub fn adversary_step(adv: &AdversaryState, prob_select_u: f64) -> (Vec<f64>, SparseAction<f64>) {
    if prob_select_u >= 0.5 {
        (adv.xi_u(), adv.action_v())
    } else {
        (adv.xi_v(), adv.action_u())
    }
}
