//! Customer choice model, noise catalog and the regret oracle.

pub mod covariates;
pub mod model;
pub mod noise;
pub mod presets;

pub use covariates::CovariateGenerator;
pub use model::{
    maximize_on_grid, maximize_revenue, revenue, LinearValuationModel, MarketOutcome, OptimalPrice,
    OptimizerOptions, SmoothnessMetadata,
};
pub use noise::{std_normal_cdf, std_normal_pdf, Component, NoiseDistribution, NoiseKind};
pub use presets::{preset, Environment, DEFAULT_P_MAX, SYNTHETIC_PRESETS};
