use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::NoiseDistribution;
use crate::error::{ensure_finite, PricingError, Result};

/// Constants that only appear in regret bounds. Carried for reporting, never
/// used by any policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessMetadata {
    pub lipschitz: Option<f64>,
    pub curvature: Option<f64>,
}

/// Ground truth `v = xᵀθ0 + z`, `z ~ F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearValuationModel {
    theta0: Vec<f64>,
    noise: NoiseDistribution,
    p_max: f64,
    #[serde(default)]
    pub metadata: SmoothnessMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOutcome {
    pub t: usize,
    pub x: Vec<f64>,
    pub price: f64,
    pub purchased: bool,
    pub reward: f64,
}

/// Grid-then-refine settings for revenue maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Grid spacing as a fraction of `p_max`.
    pub grid_fraction: f64,
    /// Absolute width at which golden-section refinement stops.
    pub refine_tol: f64,
    /// Relative revenue gap under which two separate grid peaks count as tied.
    pub tie_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { grid_fraction: 1e-3, refine_tol: 1e-6, tie_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPrice {
    pub price: f64,
    pub revenue: f64,
    /// More than one separated grid peak attains the maximum.
    pub tie: bool,
}

/// `p (1 - F(p - q))`.
pub fn revenue(noise: &NoiseDistribution, q: f64, p: f64) -> f64 {
    p * (1.0 - noise.cdf(p - q))
}

/// Maximizes `p (1 - F(p - q))` over `(0, p_max)`: dense scan, then
/// golden-section search in the bracket around the best grid point. Among
/// separated peaks within `tie_tol`, the smallest price wins.
pub fn maximize_revenue(
    noise: &NoiseDistribution,
    q: f64,
    p_max: f64,
    opts: &OptimizerOptions,
) -> OptimalPrice {
    maximize_on_grid(|p| revenue(noise, q, p), p_max, opts)
}

/// Grid-then-refine maximization of an arbitrary objective on `(0, p_max)`.
pub fn maximize_on_grid(f: impl Fn(f64) -> f64, p_max: f64, opts: &OptimizerOptions) -> OptimalPrice {
    let n = (1.0 / opts.grid_fraction).round().max(2.0) as usize;
    let h = p_max / n as f64;
    let values: Vec<f64> = (1..n).map(|k| f(k as f64 * h)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = opts.tie_tol * best.abs().max(1.0);

    // Separated local maxima near the top; adjacent plateau points are one peak.
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < values.len() {
        if values[i] >= best - tol {
            let start = i;
            while i + 1 < values.len() && values[i + 1] >= best - tol {
                i += 1;
            }
            peaks.push(start);
        }
        i += 1;
    }
    let k = peaks[0];
    let tie = peaks.len() > 1;

    let grid_price = (k + 1) as f64 * h;
    let lo = (grid_price - h).max(0.0);
    let hi = (grid_price + h).min(p_max);
    let (p_ref, r_ref) = golden_max(&f, lo, hi, opts.refine_tol);
    let (price, rev) = if r_ref > values[k] && p_ref > 0.0 && p_ref < p_max {
        (p_ref, r_ref)
    } else {
        (grid_price, values[k])
    };
    OptimalPrice { price, revenue: rev, tie }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

impl LinearValuationModel {
    pub fn new(theta0: Vec<f64>, noise: NoiseDistribution, p_max: f64) -> Result<Self> {
        if theta0.is_empty() {
            return Err(PricingError::InvalidParameter("theta0 must have dimension >= 1".into()));
        }
        if theta0.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("theta0"));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(PricingError::InvalidParameter(format!("p_max must be positive, got {p_max}")));
        }
        Ok(Self { theta0, noise, p_max, metadata: SmoothnessMetadata::default() })
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn noise(&self) -> &NoiseDistribution {
        &self.noise
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn dim(&self) -> usize {
        self.theta0.len()
    }

    /// `xᵀθ0`.
    pub fn linear_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.theta0.len() {
            return Err(PricingError::DimensionMismatch { expected: self.theta0.len(), got: x.len() });
        }
        for v in x {
            ensure_finite(*v, "covariate")?;
        }
        Ok(x.iter().zip(&self.theta0).map(|(a, b)| a * b).sum())
    }

    fn check_price(&self, p: f64) -> Result<()> {
        ensure_finite(p, "price")?;
        if p <= 0.0 || p >= self.p_max {
            return Err(PricingError::PriceOutOfRange { price: p, p_max: self.p_max });
        }
        Ok(())
    }

    pub fn purchase_probability(&self, x: &[f64], p: f64) -> Result<f64> {
        self.check_price(p)?;
        let q = self.linear_value(x)?;
        Ok((1.0 - self.noise.cdf(p - q)).clamp(0.0, 1.0))
    }

    /// Bernoulli draw with the closed-form purchase probability. One uniform
    /// per call, so identically seeded streams replay identical outcomes.
    pub fn sample_response<R: Rng + ?Sized>(
        &self,
        t: usize,
        x: &[f64],
        p: f64,
        rng: &mut R,
    ) -> Result<MarketOutcome> {
        let prob = self.purchase_probability(x, p)?;
        let u: f64 = rng.random();
        Ok(self.outcome_from_uniform(t, x, p, prob, u))
    }

    pub(crate) fn outcome_from_uniform(
        &self,
        t: usize,
        x: &[f64],
        p: f64,
        prob: f64,
        u: f64,
    ) -> MarketOutcome {
        let purchased = u < prob;
        MarketOutcome {
            t,
            x: x.to_vec(),
            price: p,
            purchased,
            reward: if purchased { p } else { 0.0 },
        }
    }

    /// `f_q(p) = p (1 - F(p - q))` for `p` in `[0, p_max]`.
    pub fn expected_revenue(&self, q: f64, p: f64) -> f64 {
        revenue(&self.noise, q, p)
    }

    pub fn optimal_price(&self, x: &[f64]) -> Result<OptimalPrice> {
        self.optimal_price_with(x, &OptimizerOptions::default())
    }

    pub fn optimal_price_with(&self, x: &[f64], opts: &OptimizerOptions) -> Result<OptimalPrice> {
        let q = self.linear_value(x)?;
        Ok(maximize_revenue(&self.noise, q, self.p_max, opts))
    }

    pub fn instantaneous_regret(&self, x: &[f64], p: f64) -> Result<f64> {
        let opt = self.optimal_price(x)?;
        self.regret_against(x, p, &opt)
    }

    /// Regret of `p` given a precomputed optimum for the same covariate.
    pub fn regret_against(&self, x: &[f64], p: f64, opt: &OptimalPrice) -> Result<f64> {
        ensure_finite(p, "price")?;
        let q = self.linear_value(x)?;
        let gap = opt.revenue - self.expected_revenue(q, p);
        // The refined optimum is accurate to ~1e-12 in revenue; anything
        // below that is the optimizer's own slack.
        Ok(gap.max(0.0))
    }
}
