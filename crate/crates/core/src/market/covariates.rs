use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Source of customer covariates. Every generated vector satisfies `‖x‖∞ ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CovariateGenerator {
    /// Independent coordinates `x_i ~ Unif[lower_i, upper_i]`.
    UniformBox { lower: Vec<f64>, upper: Vec<f64> },
    /// Replays stored rows in order, wrapping around.
    FixedSequence { rows: Vec<Vec<f64>> },
}

impl CovariateGenerator {
    pub fn uniform_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(PricingError::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo.abs() > 1.0 || hi.abs() > 1.0 {
                return Err(PricingError::InvalidParameter(format!(
                    "covariate box [{lo}, {hi}] must lie inside [-1, 1]"
                )));
            }
        }
        Ok(Self::UniformBox { lower, upper })
    }

    /// `Unif[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::uniform_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn fixed_sequence(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| PricingError::Data("empty covariate sequence".into()))?;
        for r in &rows {
            if r.len() != dim {
                return Err(PricingError::DimensionMismatch { expected: dim, got: r.len() });
            }
            if r.iter().any(|v| !v.is_finite() || v.abs() > 1.0) {
                return Err(PricingError::InvalidParameter("fixed covariates must satisfy |x_i| <= 1".into()));
            }
        }
        Ok(Self::FixedSequence { rows })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::UniformBox { lower, .. } => lower.len(),
            Self::FixedSequence { rows } => rows[0].len(),
        }
    }

    /// Covariate for step `t` (0-based).
    pub fn generate<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Vec<f64> {
        match self {
            Self::UniformBox { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| if hi > lo { rng.random_range(*lo..=*hi) } else { *lo })
                .collect(),
            Self::FixedSequence { rows } => rows[t % rows.len()].clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Substream};

    #[test]
    fn box_draws_respect_bounds() {
        let g = CovariateGenerator::uniform_box(vec![0.3, -1.0], vec![1.0, 0.5]).unwrap();
        let mut rng = stream(3, 0, Substream::Covariates);
        for t in 0..10_000 {
            let x = g.generate(t, &mut rng);
            assert!(x[0] >= 0.3 && x[0] <= 1.0);
            assert!(x[1] >= -1.0 && x[1] <= 0.5);
            assert!(x.iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn rejects_boxes_outside_unit_ball() {
        assert!(CovariateGenerator::cube(2, 0.0, 1.5).is_err());
        assert!(CovariateGenerator::uniform_box(vec![0.5], vec![0.2]).is_err());
        assert!(CovariateGenerator::uniform_box(vec![0.5], vec![]).is_err());
        assert!(CovariateGenerator::fixed_sequence(vec![vec![2.0]]).is_err());
    }

    #[test]
    fn fixed_sequence_wraps() {
        let g = CovariateGenerator::fixed_sequence(vec![vec![0.1], vec![0.2]]).unwrap();
        let mut rng = stream(0, 0, Substream::Covariates);
        assert_eq!(g.generate(0, &mut rng), vec![0.1]);
        assert_eq!(g.generate(3, &mut rng), vec![0.2]);
    }
}
