//! Named simulation environments.
//!
//! `example1`..`example6` share `θ0 = 30`, `x ~ Unif[0,1]`; the normal
//! components are specified by variance. `example7`..`example9` use standard
//! normal noise in higher dimension, and `example10`..`example12` use Cauchy
//! laws whose second parameter is a squared scale.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::covariates::CovariateGenerator;
use super::model::LinearValuationModel;
use super::noise::{Component, NoiseDistribution, NoiseKind};
use crate::error::{PricingError, Result};

pub const DEFAULT_P_MAX: f64 = 30.0;

/// A valuation model together with its covariate stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub name: String,
    pub model: LinearValuationModel,
    pub covariates: CovariateGenerator,
}

impl Environment {
    pub fn new(name: impl Into<String>, model: LinearValuationModel, covariates: CovariateGenerator) -> Result<Self> {
        if model.dim() != covariates.dim() {
            return Err(PricingError::DimensionMismatch { expected: model.dim(), got: covariates.dim() });
        }
        Ok(Self { name: name.into(), model, covariates })
    }
}

/// Names accepted by [`preset`]. The loan environments need data and are
/// built through [`crate::loan`].
pub const SYNTHETIC_PRESETS: [&str; 12] = [
    "example1", "example2", "example3", "example4", "example5", "example6", "example7", "example8",
    "example9", "example10", "example11", "example12",
];

fn scalar_example(name: &str, noise: NoiseDistribution) -> Result<Environment> {
    Environment::new(
        name,
        LinearValuationModel::new(vec![30.0], noise, DEFAULT_P_MAX)?,
        CovariateGenerator::cube(1, 0.0, 1.0)?,
    )
}

fn normal_example(name: &str, theta: f64, dim: usize, lo: f64) -> Result<Environment> {
    Environment::new(
        name,
        LinearValuationModel::new(vec![theta; dim], NoiseDistribution::gaussian(0.0, 1.0)?, DEFAULT_P_MAX)?,
        CovariateGenerator::cube(dim, lo, 1.0)?,
    )
}

fn cauchy_example(name: &str, parts: &[(f64, f64, f64)]) -> Result<Environment> {
    let noise = NoiseDistribution::new(
        NoiseKind::CauchyMixture,
        parts.iter().map(|&(w, loc, sq)| Component::new(w, loc, sq.sqrt())).collect(),
    )?;
    Environment::new(
        name,
        LinearValuationModel::new(vec![10.0; 3], noise, DEFAULT_P_MAX)?,
        CovariateGenerator::cube(3, 0.01, 1.0)?,
    )
}

pub fn preset(name: &str) -> Result<Environment> {
    let v = PI * PI / 3.0;
    match name {
        "example1" => scalar_example(name, NoiseDistribution::gaussian_mixture_var(&[(0.5, -4.0, 6.0), (0.5, 4.0, 6.0)])?),
        "example2" => scalar_example(
            name,
            NoiseDistribution::gaussian_mixture_var(&[
                (1.0 / 3.0, -6.0, v),
                (1.0 / 3.0, -1.0, v),
                (1.0 / 6.0, 1.0, v),
                (1.0 / 6.0, 6.0, v),
            ])?,
        ),
        "example3" => scalar_example(
            name,
            NoiseDistribution::gaussian_mixture_var(&[(0.25, -7.0, v), (0.25, -3.0, v), (0.25, 3.0, v), (0.25, 7.0, v)])?,
        ),
        "example4" => scalar_example(
            name,
            NoiseDistribution::gaussian_mixture_var(&[(1.0 / 3.0, -3.0, v), (2.0 / 3.0, 3.0, v)])?.mean_centered()?,
        ),
        "example5" => scalar_example(
            name,
            NoiseDistribution::gaussian_mixture_var(&[(0.5, -5.0, 25.0 * v), (0.5, 5.0, 4.0 * v)])?.mean_centered()?,
        ),
        "example6" => scalar_example(name, NoiseDistribution::gaussian_mixture_var(&[(0.5, -2.5, 5.0), (0.5, 2.5, 5.0)])?),
        "example7" => normal_example(name, 10.0, 3, 0.3),
        "example8" => normal_example(name, 3.0, 10, 0.1),
        "example9" => normal_example(name, 3.0, 10, 0.0),
        "example10" => cauchy_example(name, &[(1.0, 0.0, 1.0)]),
        "example11" => cauchy_example(name, &[(1.0, 0.0, 3.0)]),
        "example12" => cauchy_example(name, &[(0.5, -5.0, 6.0), (0.5, 5.0, 6.0)]),
        other => Err(PricingError::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in SYNTHETIC_PRESETS {
            let env = preset(name).unwrap();
            assert_eq!(env.model.dim(), env.covariates.dim());
            assert_eq!(env.model.p_max(), 30.0);
        }
        assert!(preset("example13").is_err());
    }

    #[test]
    fn centered_examples_have_zero_mean() {
        for name in ["example4", "example5"] {
            let env = preset(name).unwrap();
            assert!(env.model.noise().mean().unwrap().abs() < 1e-12);
        }
        // Example 4: F~ has mean 1, so components move to -4 and 2.
        let locs: Vec<f64> = preset("example4").unwrap().model.noise().components().iter().map(|c| c.location).collect();
        assert!((locs[0] + 4.0).abs() < 1e-12 && (locs[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn variance_parametrization() {
        let env = preset("example1").unwrap();
        assert!((env.model.noise().components()[0].scale - 6f64.sqrt()).abs() < 1e-15);
        let cauchy = preset("example11").unwrap();
        assert!((cauchy.model.noise().components()[0].scale - 3f64.sqrt()).abs() < 1e-15);
    }
}
