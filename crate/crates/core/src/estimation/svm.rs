//! Linear soft-margin SVM solved by dual coordinate descent.
//!
//! The bias is carried as an extra constant feature, so the solved problem is
//! `½(‖w‖² + b²) + C Σ max(0, 1 − yᵢ(wᵀxᵢ + b))`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmOptions {
    pub c: f64,
    pub max_epochs: usize,
    /// Stop when the projected-gradient spread over an epoch drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SvmOptions {
    fn default() -> Self {
        Self { c: 1.0, max_epochs: 2000, tol: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub epochs: usize,
    pub converged: bool,
}

impl SvmFit {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

pub fn svm_objective(rows: &[Vec<f64>], labels: &[bool], c: f64, weights: &[f64], bias: f64) -> f64 {
    let reg = 0.5 * (weights.iter().map(|w| w * w).sum::<f64>() + bias * bias);
    let hinge: f64 = rows
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let f = bias + weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            (1.0 - if y { f } else { -f }).max(0.0)
        })
        .sum();
    reg + c * hinge
}

pub fn svm_fit(rows: &[Vec<f64>], labels: &[bool], opts: &SvmOptions) -> Result<SvmFit> {
    let dim = rows.first().map(Vec::len).ok_or_else(|| PricingError::Estimation("no observations".into()))?;
    if labels.len() != rows.len() {
        return Err(PricingError::DimensionMismatch { expected: rows.len(), got: labels.len() });
    }
    if !(labels.iter().any(|&y| y) && labels.iter().any(|&y| !y)) {
        return Err(PricingError::Estimation("SVM needs both classes".into()));
    }
    if !(opts.c > 0.0) {
        return Err(PricingError::InvalidParameter("SVM C must be positive".into()));
    }
    for r in rows {
        if r.len() != dim {
            return Err(PricingError::DimensionMismatch { expected: dim, got: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("SVM design"));
        }
    }
    let n = rows.len();
    let sign = |i: usize| if labels[i] { 1.0 } else { -1.0 };
    let qdiag: Vec<f64> = rows.iter().map(|r| 1.0 + r.iter().map(|v| v * v).sum::<f64>()).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SimRng::seed_from_u64(opts.seed);
    let mut converged = false;
    let mut epochs = 0;
    while epochs < opts.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let yi = sign(i);
            let f = b + w.iter().zip(&rows[i]).map(|(a, v)| a * v).sum::<f64>();
            let g = yi * f - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == opts.c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qdiag[i]).clamp(0.0, opts.c);
                let delta = (alpha[i] - old) * yi;
                if delta != 0.0 {
                    for (a, v) in w.iter_mut().zip(&rows[i]) {
                        *a += delta * v;
                    }
                    b += delta;
                }
            }
        }
        if pg_max - pg_min < opts.tol {
            converged = true;
            break;
        }
    }
    let objective = svm_objective(rows, labels, opts.c, &w, b);
    Ok(SvmFit { weights: w, bias: b, objective, epochs, converged })
}
