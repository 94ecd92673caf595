//! Confidence radii for M-LinUCB.

use crate::error::{PricingError, Result};
use crate::scalar::Scalar;

/// `1 ∨ (c1·√(λd) + √(2 ln(1/δ) + d·ln((dλ + (t−1)·a_max²)/(dλ))))²`
///
/// `c1` bounds `‖ξ‖∞` and `a_max` bounds the action norms.
pub fn beta_tilde<S: Scalar>(t: usize, d: usize, lambda: S, delta: S, c1: S, a_max: S) -> Result<S> {
    if t == 0 {
        return Err(PricingError::InvalidParameter("round index starts at 1".into()));
    }
    if !(delta > S::zero() && delta < S::one()) {
        return Err(PricingError::InvalidParameter(format!("confidence level {delta} outside (0, 1)")));
    }
    if !(lambda > S::zero()) || d == 0 {
        return Err(PricingError::InvalidParameter("need lambda > 0 and d >= 1".into()));
    }
    let two = S::lit(2.0);
    let d_s = S::from_usize_lossy(d);
    let dl = d_s * lambda;
    let growth = (dl + S::from_usize_lossy(t - 1) * a_max * a_max) / dl;
    let radius = c1 * dl.sqrt() + (two * (S::one() / delta).ln() + d_s * growth.ln()).sqrt();
    Ok(S::one().max(radius * radius))
}

/// Confidence parameter for the pricing bandit, where rewards and actions
/// are on the price scale: `scale · p_max² · β̃` with `c1 = 1/p_max` and
/// `a_max = p_max`.
pub fn beta_star<S: Scalar>(t: usize, d: usize, lambda: S, delta: S, p_max: S, scale: S) -> Result<S> {
    Ok(scale * p_max * p_max * beta_tilde(t, d, lambda, delta, S::one() / p_max, p_max)?)
}
