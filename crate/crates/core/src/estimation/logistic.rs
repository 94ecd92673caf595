//! Logistic regression by damped Newton iterations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticOptions {
    /// Coefficient of `½‖w‖²` added to the mean negative log-likelihood.
    pub ridge: f64,
    pub max_iter: usize,
    /// Stop when the sup-norm of the gradient falls below this.
    pub grad_tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self { ridge: 1e-8, max_iter: 100, grad_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub coef: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    /// Objective after each accepted step, starting from the initial point.
    pub objective_trace: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Problem<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [bool],
    offset: Option<&'a [f64]>,
    ridge: f64,
    dim: usize,
}

impl Problem<'_> {
    fn eta(&self, i: usize, w: &[f64]) -> f64 {
        let base: f64 = self.rows[i].iter().zip(w).map(|(a, b)| a * b).sum();
        base + self.offset.map_or(0.0, |o| o[i])
    }

    fn objective(&self, w: &[f64]) -> f64 {
        let n = self.rows.len() as f64;
        let nll: f64 = (0..self.rows.len())
            .map(|i| {
                let z = self.eta(i, w);
                softplus(z) - if self.labels[i] { z } else { 0.0 }
            })
            .sum();
        nll / n + 0.5 * self.ridge * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient_hessian(&self, w: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim;
        let n = self.rows.len() as f64;
        let mut g = DVector::zeros(d);
        let mut h = DMatrix::zeros(d, d);
        for (i, row) in self.rows.iter().enumerate() {
            let mu = sigmoid(self.eta(i, w));
            let r = mu - if self.labels[i] { 1.0 } else { 0.0 };
            let wt = mu * (1.0 - mu);
            for a in 0..d {
                g[a] += r * row[a];
                let ra = wt * row[a];
                for b in 0..=a {
                    h[(a, b)] += ra * row[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                h[(b, a)] = h[(a, b)];
            }
        }
        g /= n;
        h /= n;
        for a in 0..d {
            g[a] += self.ridge * w[a];
            h[(a, a)] += self.ridge;
        }
        (g, h)
    }
}

/// Minimizes `mean_i[log(1 + e^{η_i}) − y_i η_i] + (ridge/2)‖w‖²` with
/// `η_i = rowᵢᵀw + offsetᵢ`.
///
/// Newton steps are halved until the objective does not increase, so the
/// objective trace is non-increasing.
pub fn logistic_fit(
    rows: &[Vec<f64>],
    labels: &[bool],
    offset: Option<&[f64]>,
    opts: &LogisticOptions,
) -> Result<LogisticFit> {
    let dim = rows.first().map(Vec::len).ok_or_else(|| PricingError::Estimation("no observations".into()))?;
    if labels.len() != rows.len() {
        return Err(PricingError::DimensionMismatch { expected: rows.len(), got: labels.len() });
    }
    if let Some(o) = offset {
        if o.len() != rows.len() {
            return Err(PricingError::DimensionMismatch { expected: rows.len(), got: o.len() });
        }
        if o.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("logistic offset"));
        }
    }
    for r in rows {
        if r.len() != dim {
            return Err(PricingError::DimensionMismatch { expected: dim, got: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("logistic design"));
        }
    }
    let prob = Problem { rows, labels, offset, ridge: opts.ridge, dim };
    let mut w = vec![0.0; dim];
    let mut obj = prob.objective(&w);
    let mut trace = vec![obj];
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (g, h) = prob.gradient_hessian(&w);
        grad_norm = g.amax();
        if grad_norm <= opts.grad_tol {
            converged = true;
            break;
        }
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => h.lu().solve(&g).ok_or_else(|| PricingError::Estimation("singular Hessian".into()))?,
        };
        iterations += 1;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = w.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            let c_obj = prob.objective(&cand);
            if c_obj.is_finite() && c_obj <= obj {
                w = cand;
                obj = c_obj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        trace.push(obj);
        if !accepted {
            // No descent available at machine precision.
            break;
        }
    }
    if !converged {
        let (g, _) = prob.gradient_hessian(&w);
        grad_norm = g.amax();
        converged = grad_norm <= opts.grad_tol;
    }
    Ok(LogisticFit { coef: w, iterations, converged, grad_norm, objective_trace: trace })
}

/// The objective minimized by [`logistic_fit`], exposed for checks.
pub fn logistic_objective(rows: &[Vec<f64>], labels: &[bool], offset: Option<&[f64]>, ridge: f64, w: &[f64]) -> f64 {
    Problem { rows, labels, offset, ridge, dim: w.len() }.objective(w)
}
