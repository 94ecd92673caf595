//! Market noise laws.
//!
//! All supported laws are finite mixtures of a single location-scale family,
//! which keeps `cdf`, `pdf` and sampling closed form. Quantiles are obtained by
//! bracketing and bisection on the CDF.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::rng::open_unit;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    GaussianMixture,
    CauchyMixture,
    Logistic,
    /// Gaussian kernel mixture produced by the windowed noise estimator.
    EmpiricalSmoothed,
    /// Deterministic noise concentrated at each component's location.
    PointMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub location: f64,
    pub scale: f64,
}

impl Component {
    pub fn new(weight: f64, location: f64, scale: f64) -> Self {
        Self { weight, location, scale }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDistribution {
    kind: NoiseKind,
    components: Vec<Component>,
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

fn logistic_cdf(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn logistic_pdf(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

impl NoiseDistribution {
    pub fn new(kind: NoiseKind, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(PricingError::InvalidDistribution("no components".into()));
        }
        let mut total = 0.0;
        for c in &components {
            if !(c.weight.is_finite() && c.location.is_finite() && c.scale.is_finite()) {
                return Err(PricingError::InvalidDistribution("non-finite component".into()));
            }
            if c.weight < 0.0 {
                return Err(PricingError::InvalidDistribution(format!(
                    "negative weight {}",
                    c.weight
                )));
            }
            if c.scale <= 0.0 {
                return Err(PricingError::InvalidDistribution(format!(
                    "scale must be positive, got {}",
                    c.scale
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(PricingError::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { kind, components })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        Self::new(NoiseKind::GaussianMixture, vec![Component::new(1.0, mean, sd)])
    }

    /// Mixture of normals given as `(weight, mean, variance)` triples.
    pub fn gaussian_mixture_var(parts: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            NoiseKind::GaussianMixture,
            parts.iter().map(|&(w, m, v)| Component::new(w, m, v.sqrt())).collect(),
        )
    }

    pub fn cauchy(location: f64, scale: f64) -> Result<Self> {
        Self::new(NoiseKind::CauchyMixture, vec![Component::new(1.0, location, scale)])
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        Self::new(NoiseKind::Logistic, vec![Component::new(1.0, location, scale)])
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        Self::new(NoiseKind::PointMass, vec![Component::new(1.0, at, 1.0)])
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_continuous(&self) -> bool {
        self.kind != NoiseKind::PointMass
    }

    fn component_cdf(&self, c: &Component, v: f64) -> f64 {
        let z = (v - c.location) / c.scale;
        match self.kind {
            NoiseKind::GaussianMixture | NoiseKind::EmpiricalSmoothed => std_normal_cdf(z),
            NoiseKind::CauchyMixture => 0.5 + z.atan() / std::f64::consts::PI,
            NoiseKind::Logistic => logistic_cdf(z),
            NoiseKind::PointMass => {
                if v >= c.location {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn component_pdf(&self, c: &Component, v: f64) -> f64 {
        let z = (v - c.location) / c.scale;
        let density = match self.kind {
            NoiseKind::GaussianMixture | NoiseKind::EmpiricalSmoothed => std_normal_pdf(z),
            NoiseKind::CauchyMixture => 1.0 / (std::f64::consts::PI * (1.0 + z * z)),
            NoiseKind::Logistic => logistic_pdf(z),
            NoiseKind::PointMass => return 0.0,
        };
        density / c.scale
    }

    pub fn cdf(&self, v: f64) -> f64 {
        if v == f64::INFINITY {
            return 1.0;
        }
        if v == f64::NEG_INFINITY {
            return 0.0;
        }
        let s: f64 = self.components.iter().map(|c| c.weight * self.component_cdf(c, v)).sum();
        s.clamp(0.0, 1.0)
    }

    /// Density; zero everywhere for point masses.
    pub fn pdf(&self, v: f64) -> f64 {
        self.components.iter().map(|c| c.weight * self.component_pdf(c, v)).sum()
    }

    /// Mixture mean, `None` for Cauchy components.
    pub fn mean(&self) -> Option<f64> {
        match self.kind {
            NoiseKind::CauchyMixture => None,
            _ => Some(self.components.iter().map(|c| c.weight * c.location).sum()),
        }
    }

    /// The law of `z - shift`: every location moves by `-shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            kind: self.kind,
            components: self
                .components
                .iter()
                .map(|c| Component::new(c.weight, c.location - shift, c.scale))
                .collect(),
        }
    }

    /// Recenters a finite-mean law so that its mean is zero.
    pub fn mean_centered(&self) -> Result<Self> {
        let m = self
            .mean()
            .ok_or_else(|| PricingError::InvalidDistribution("law has no finite mean".into()))?;
        Ok(self.shifted(m))
    }

    /// Smallest `v` with `cdf(v) >= prob`, resolved to about 1e-13 relative.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(prob > 0.0 && prob < 1.0) {
            return Err(PricingError::InvalidParameter(format!(
                "quantile level {prob} outside (0, 1)"
            )));
        }
        let center = self.components.iter().map(|c| c.weight * c.location).sum::<f64>();
        let spread = self.components.iter().map(|c| c.scale).fold(1.0, f64::max);
        let mut lo = center - spread;
        let mut hi = center + spread;
        let mut step = spread;
        while self.cdf(lo) >= prob {
            step *= 2.0;
            lo -= step;
            if !lo.is_finite() {
                return Err(PricingError::InvalidParameter("quantile bracket diverged".into()));
            }
        }
        step = spread;
        while self.cdf(hi) < prob {
            step *= 2.0;
            hi += step;
            if !hi.is_finite() {
                return Err(PricingError::InvalidParameter("quantile bracket diverged".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= prob {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(hi)
    }

    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = open_unit(rng);
        let mut acc = 0.0;
        let mut chosen = self.components.last().expect("non-empty");
        for c in &self.components {
            acc += c.weight;
            if u <= acc {
                chosen = c;
                break;
            }
        }
        match self.kind {
            NoiseKind::GaussianMixture | NoiseKind::EmpiricalSmoothed => Normal::new(chosen.location, chosen.scale)
                .expect("validated scale")
                .sample(rng),
            NoiseKind::CauchyMixture => Cauchy::new(chosen.location, chosen.scale)
                .expect("validated scale")
                .sample(rng),
            NoiseKind::Logistic => {
                let v = open_unit(rng);
                chosen.location + chosen.scale * (v / (1.0 - v)).ln()
            }
            NoiseKind::PointMass => chosen.location,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Substream};

    fn example1() -> NoiseDistribution {
        NoiseDistribution::gaussian_mixture_var(&[(0.5, -4.0, 6.0), (0.5, 4.0, 6.0)]).unwrap()
    }

    #[test]
    fn rejects_bad_weights_and_scales() {
        assert!(NoiseDistribution::new(NoiseKind::GaussianMixture, vec![]).is_err());
        assert!(NoiseDistribution::new(
            NoiseKind::GaussianMixture,
            vec![Component::new(0.6, 0.0, 1.0), Component::new(0.6, 1.0, 1.0)]
        )
        .is_err());
        assert!(NoiseDistribution::new(NoiseKind::Logistic, vec![Component::new(1.0, 0.0, 0.0)]).is_err());
        assert!(NoiseDistribution::new(
            NoiseKind::CauchyMixture,
            vec![Component::new(1.2, 0.0, 1.0), Component::new(-0.2, 0.0, 1.0)]
        )
        .is_err());
    }

    #[test]
    fn cdf_limits_and_monotonicity() {
        for dist in [
            example1(),
            NoiseDistribution::cauchy(0.0, 3f64.sqrt()).unwrap(),
            NoiseDistribution::logistic(2.0, 3.0).unwrap(),
        ] {
            assert!(dist.cdf(-1e12) < 1e-9);
            assert!(dist.cdf(1e12) > 1.0 - 1e-9);
            let mut prev = 0.0;
            for i in 0..=2000 {
                let v = -100.0 + 0.1 * i as f64;
                let c = dist.cdf(v);
                assert!(c >= prev, "cdf decreased at {v}");
                prev = c;
            }
        }
    }

    #[test]
    fn mixture_cdf_is_weighted_component_sum() {
        let parts = [(1.0 / 3.0, -6.0, 1.0), (1.0 / 3.0, -1.0, 2.0), (1.0 / 3.0, 6.0, 0.5)];
        let dist = NoiseDistribution::new(
            NoiseKind::GaussianMixture,
            parts.iter().map(|&(w, m, s)| Component::new(w, m, s)).collect(),
        )
        .unwrap();
        let singles: Vec<_> = parts
            .iter()
            .map(|&(_, m, s)| NoiseDistribution::gaussian(m, s).unwrap())
            .collect();
        let mut max_err: f64 = 0.0;
        for i in 0..1000 {
            let v = -20.0 + 40.0 * i as f64 / 999.0;
            let direct: f64 = parts.iter().zip(&singles).map(|(p, d)| p.0 * d.cdf(v)).sum();
            max_err = max_err.max((direct - dist.cdf(v)).abs());
        }
        assert!(max_err <= 1e-12, "max err {max_err}");
    }

    #[test]
    fn quantile_inverts_cdf() {
        for dist in [
            example1(),
            NoiseDistribution::cauchy(-5.0, 6f64.sqrt()).unwrap(),
            NoiseDistribution::logistic(0.0, 1.0).unwrap(),
        ] {
            for i in 1..40 {
                let v = -15.0 + 0.75 * i as f64;
                let q = dist.quantile(dist.cdf(v)).unwrap();
                assert!((q - v).abs() < 1e-8, "{:?}: {v} -> {q}", dist.kind());
            }
        }
        assert!(example1().quantile(0.0).is_err());
        assert!((example1().median().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn point_mass_is_a_step() {
        let d = NoiseDistribution::point_mass(0.0).unwrap();
        assert_eq!(d.cdf(-1e-9), 0.0);
        assert_eq!(d.cdf(0.0), 1.0);
        assert_eq!(d.quantile(0.3).unwrap(), 0.0);
        assert!(!d.is_continuous());
    }

    #[test]
    fn mean_centering_matches_analytic_mean() {
        let tilde = NoiseDistribution::gaussian_mixture_var(&[
            (1.0 / 3.0, -3.0, std::f64::consts::PI.powi(2) / 3.0),
            (2.0 / 3.0, 3.0, std::f64::consts::PI.powi(2) / 3.0),
        ])
        .unwrap();
        assert!((tilde.mean().unwrap() - 1.0).abs() < 1e-12);
        let centered = tilde.mean_centered().unwrap();
        assert!(centered.mean().unwrap().abs() < 1e-12);
        // F(v) = F~(v + mean)
        for v in [-3.0, 0.0, 2.5] {
            assert!((centered.cdf(v) - tilde.cdf(v + 1.0)).abs() < 1e-14);
        }
        assert!(NoiseDistribution::cauchy(0.0, 1.0).unwrap().mean_centered().is_err());
    }

    #[test]
    fn sampler_matches_cdf() {
        let dist = example1();
        let mut rng = stream(11, 0, Substream::Sampling);
        let n = 200_000;
        let below = (0..n).filter(|_| dist.sample(&mut rng) <= 2.0).count() as f64 / n as f64;
        let p = dist.cdf(2.0);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((below - p).abs() < 4.0 * se, "{below} vs {p}");
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let dist = NoiseDistribution::logistic(1.0, 2.0).unwrap();
        let h = 1e-5;
        for v in [-4.0, 0.0, 1.0, 7.0] {
            let fd = (dist.cdf(v + h) - dist.cdf(v - h)) / (2.0 * h);
            assert!((fd - dist.pdf(v)).abs() < 1e-8);
        }
    }
}
