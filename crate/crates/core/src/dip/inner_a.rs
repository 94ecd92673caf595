//! Per-episode estimate of `θ0` from a linear classifier on `(1, x, p)`.
//!
//! The Bayes boundary of the purchase decision is `F⁻¹(½) + xᵀθ0 − p = 0`, so
//! a fitted hyperplane `c + βᵀx + b·p` yields `θ̂ = −β/b`.

use log::warn;
use serde::{Deserialize, Serialize};

use super::projection::l1_project;
use crate::error::Result;
use crate::estimation::{logistic_fit, svm_fit, LogisticOptions, SvmOptions};
use crate::policy::EpisodeData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classifier {
    Logistic,
    Svm,
}

pub const DEGENERATE_SLOPE: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta_hat: Vec<f64>,
    /// `(c, β, b)` as fitted, empty when no fit was attempted.
    pub raw: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// The previous estimate was kept: too few points or a single class.
    pub kept_previous: bool,
    /// `|b|` fell below [`DEGENERATE_SLOPE`]; `θ̂` was reset to zero.
    pub degenerate: bool,
}

impl ThetaEstimate {
    pub fn slope_magnitude(&self) -> Option<f64> {
        self.raw.last().map(|b| b.abs())
    }
}

/// Rows `(1, xᵀ, p)` for the classifier.
pub fn augmented_rows(data: &EpisodeData) -> Vec<Vec<f64>> {
    data.xs
        .iter()
        .zip(&data.prices)
        .map(|(x, &p)| {
            let mut r = Vec::with_capacity(x.len() + 2);
            r.push(1.0);
            r.extend_from_slice(x);
            r.push(p);
            r
        })
        .collect()
}

fn leading_constant(data: &EpisodeData) -> bool {
    data.xs.iter().all(|x| x.first() == Some(&1.0))
}

pub fn inner_a_estimate(
    data: &EpisodeData,
    previous: &[f64],
    radius: f64,
    classifier: Classifier,
    seed: u64,
) -> Result<ThetaEstimate> {
    let d0 = previous.len();
    if data.len() < d0 + 2 || !data.has_both_classes() {
        warn!("episode with {} points cannot be classified; keeping previous estimate", data.len());
        return Ok(ThetaEstimate { theta_hat: previous.to_vec(), kept_previous: true, ..Default::default() });
    }
    let (raw, iterations, converged) = match classifier {
        Classifier::Logistic if leading_constant(data) => {
            // The covariates already hold an intercept column; a second one
            // would leave the split between the two unidentified.
            let rows: Vec<Vec<f64>> = augmented_rows(data).into_iter().map(|r| r[1..].to_vec()).collect();
            let fit = logistic_fit(&rows, &data.purchased, None, &LogisticOptions::default())?;
            let mut raw = vec![0.0];
            raw.extend(fit.coef);
            (raw, fit.iterations, fit.converged)
        }
        Classifier::Logistic => {
            let fit = logistic_fit(&augmented_rows(data), &data.purchased, None, &LogisticOptions::default())?;
            (fit.coef, fit.iterations, fit.converged)
        }
        Classifier::Svm => {
            let rows: Vec<Vec<f64>> = data
                .xs
                .iter()
                .zip(&data.prices)
                .map(|(x, &p)| {
                    let mut r = x.clone();
                    r.push(p);
                    r
                })
                .collect();
            let fit = svm_fit(&rows, &data.purchased, &SvmOptions { seed, ..Default::default() })?;
            let mut raw = vec![fit.bias];
            raw.extend(fit.weights);
            (raw, fit.epochs, fit.converged)
        }
    };
    let b = raw[d0 + 1];
    if b.abs() < DEGENERATE_SLOPE || !b.is_finite() {
        warn!("price coefficient {b:e} is degenerate; resetting estimate to zero");
        return Ok(ThetaEstimate { theta_hat: vec![0.0; d0], raw, iterations, converged, degenerate: true, ..Default::default() });
    }
    let ratio: Vec<f64> = raw[1..=d0].iter().map(|beta| -beta / b).collect();
    Ok(ThetaEstimate { theta_hat: l1_project(&ratio, radius), raw, iterations, converged, ..Default::default() })
}
