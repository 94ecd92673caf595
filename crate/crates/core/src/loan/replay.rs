use log::warn;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::data::{compute_price, FeatureScaler, LoanRecord, DEFAULT_RATE};
use crate::error::{PricingError, Result};
use crate::estimation::{estimate_noise, logistic_fit, LogisticOptions, SmoothedNoiseEstimate, SmoothingOptions};
use crate::market::{CovariateGenerator, Environment, LinearValuationModel, DEFAULT_P_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoanFitOptions {
    pub rate: f64,
    /// Drop records whose computed price is negative.
    pub exclude_negative: bool,
    pub p_max: f64,
    pub smoothing: SmoothingOptions,
}

impl Default for LoanFitOptions {
    fn default() -> Self {
        Self { rate: DEFAULT_RATE, exclude_negative: false, p_max: DEFAULT_P_MAX, smoothing: SmoothingOptions::default() }
    }
}

/// A market fitted to loan data: covariates `(1, scaled features)`, fitted
/// coefficients (the first one an intercept) and the smoothed noise law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayEnvironment {
    pub model: LinearValuationModel,
    pub noise_estimate: SmoothedNoiseEstimate,
    pub scaler: FeatureScaler,
    pub covariates: Vec<Vec<f64>>,
    pub prices: Vec<f64>,
    pub accepted: Vec<bool>,
    pub excluded_negative: usize,
}

impl ReplayEnvironment {
    pub fn len(&self) -> usize {
        self.covariates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covariates.is_empty()
    }

    /// Environment replaying the covariates at `indices` in order.
    pub fn environment(&self, name: &str, indices: &[usize]) -> Result<Environment> {
        let rows = indices.iter().map(|&i| self.covariates[i].clone()).collect();
        Environment::new(name, self.model.clone(), CovariateGenerator::fixed_sequence(rows)?)
    }
}

/// Draws `size` distinct record indices.
pub fn subsample<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Vec<usize>> {
    if size > n {
        return Err(PricingError::Data(format!("cannot draw {size} records from {n}")));
    }
    Ok(sample(rng, n, size).into_vec())
}

/// Two-step fit: a logistic classifier on `((1, x), p)` gives the valuation
/// coefficients, then the windowed estimator recovers the noise law from
/// `u = p − (1, x)ᵀθ̂`.
pub fn fit_ground_truth(records: &[LoanRecord], opts: &LoanFitOptions) -> Result<ReplayEnvironment> {
    let mut kept: Vec<(&LoanRecord, f64)> = Vec::with_capacity(records.len());
    let mut excluded_negative = 0;
    for r in records {
        r.validate()?;
        let p = compute_price(r, opts.rate);
        if p < 0.0 && opts.exclude_negative {
            excluded_negative += 1;
        } else {
            kept.push((r, p));
        }
    }
    if kept.len() < 10_000 {
        warn!("only {} loan records; the fitted market may be unreliable", kept.len());
    }
    let n = kept.len();
    let accepted = kept.iter().filter(|(r, _)| r.accepted()).count();
    if n == 0 || accepted * 100 < n || (n - accepted) * 100 < n {
        return Err(PricingError::Data(format!("degenerate acceptance: {accepted} of {n} records accepted")));
    }
    let owned: Vec<LoanRecord> = kept.iter().map(|(r, _)| (*r).clone()).collect();
    let scaler = FeatureScaler::fit(&owned)?;
    let covariates: Vec<Vec<f64>> = owned
        .iter()
        .map(|r| {
            let mut x = vec![1.0];
            x.extend(scaler.scale(r.features()));
            x
        })
        .collect();
    let prices: Vec<f64> = kept.iter().map(|(_, p)| *p).collect();
    let labels: Vec<bool> = owned.iter().map(LoanRecord::accepted).collect();
    let rows: Vec<Vec<f64>> = covariates
        .iter()
        .zip(&prices)
        .map(|(x, &p)| {
            let mut r = x.clone();
            r.push(p);
            r
        })
        .collect();
    let fit = logistic_fit(&rows, &labels, None, &LogisticOptions::default())?;
    let d = covariates[0].len();
    let b = fit.coef[d];
    if !(b < 0.0) {
        return Err(PricingError::Estimation(format!("acceptance does not fall with price (coefficient {b})")));
    }
    let theta: Vec<f64> = fit.coef[..d].iter().map(|c| -c / b).collect();
    let residuals: Vec<(f64, bool)> = covariates
        .iter()
        .zip(&prices)
        .zip(&labels)
        .map(|((x, &p), &y)| (p - x.iter().zip(&theta).map(|(a, t)| a * t).sum::<f64>(), y))
        .collect();
    let noise_estimate = estimate_noise(&residuals, &opts.smoothing)?;
    let model = LinearValuationModel::new(theta, noise_estimate.distribution.clone(), opts.p_max)?;
    Ok(ReplayEnvironment { model, noise_estimate, scaler, covariates, prices, accepted: labels, excluded_negative })
}
