use rand::Rng;
use serde::{Deserialize, Serialize};

use super::data::{LoanRecord, DEFAULT_RATE};
use crate::error::{PricingError, Result};
use crate::market::NoiseDistribution;

/// Generator of loan applications whose acceptance follows
/// `1{(1, x)ᵀθ + z ≥ p}` with `x` the features divided by `feature_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLoanModel {
    /// Intercept followed by the four feature coefficients.
    pub theta: [f64; 5],
    pub noise: NoiseDistribution,
    /// Upper ends of loan amount, FICO, prime rate and competitor rate.
    pub feature_max: [f64; 4],
    /// Lower ends, as fractions of `feature_max`.
    pub feature_min_fraction: [f64; 4],
    /// Prices are drawn uniformly from this range (in $1000).
    pub price_range: (f64, f64),
    pub rate: f64,
}

impl SyntheticLoanModel {
    /// Features spread over `[0, max]` and prices uniform on `(0, 30)`, so
    /// `p − (1, x)ᵀθ` covers roughly `[−15, 30]`.
    pub fn with_noise(noise: NoiseDistribution) -> Self {
        Self {
            theta: [2.0, 6.0, 4.0, -3.0, 3.0],
            noise,
            feature_max: [60_000.0, 850.0, 8.0, 12.0],
            feature_min_fraction: [0.0; 4],
            price_range: (0.01, 30.0),
            rate: DEFAULT_RATE,
        }
    }

    pub fn valuation_mean(&self, x: &[f64]) -> f64 {
        self.theta[0] + x.iter().zip(&self.theta[1..]).map(|(a, b)| a * b).sum::<f64>()
    }
}

pub fn synthetic_loans<R: Rng + ?Sized>(model: &SyntheticLoanModel, n: usize, rng: &mut R) -> Result<Vec<LoanRecord>> {
    let (lo, hi) = model.price_range;
    if !(lo < hi) || model.feature_max.iter().any(|m| !(*m > 0.0)) {
        return Err(PricingError::InvalidParameter("bad synthetic loan model".into()));
    }
    let terms = [36u32, 48, 60, 72];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = model.feature_min_fraction.iter().map(|f| rng.random_range(*f..=1.0)).collect();
        let feats: Vec<f64> = x.iter().zip(&model.feature_max).map(|(a, m)| a * m).collect();
        let term = terms[rng.random_range(0..terms.len())];
        let price = rng.random_range(lo..hi);
        let annuity = (1.0 - (1.0 + model.rate).powf(-f64::from(term))) / model.rate;
        let payment = (price * 1000.0 + feats[0]) / annuity;
        let z = model.noise.sample(rng);
        let accepted = model.valuation_mean(&x) + z >= price;
        out.push(LoanRecord {
            loan_amount: feats[0],
            fico: feats[1],
            prime_rate: feats[2],
            competitor_rate: feats[3],
            monthly_payment: payment,
            term,
            accepted: u8::from(accepted),
            state: if rng.random_bool(0.15) { "CA".into() } else { "TX".into() },
        });
    }
    Ok(out)
}
