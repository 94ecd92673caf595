//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::run::{PolicyKind, PolicySettings};
use crate::baselines::RmlpConfig;
use crate::dip::DipConfig;
use crate::error::{PricingError, Result};
use crate::loan::{
    filter_state, fit_ground_truth, read_records, subsample, synthetic_loans, LoanFitOptions, ReplayEnvironment,
    SyntheticLoanModel,
};
use crate::market::{
    preset, Component, CovariateGenerator, Environment, LinearValuationModel, NoiseDistribution, NoiseKind,
    DEFAULT_P_MAX,
};
use crate::rng::{stream, Substream};

/// Noise law as written in a config file. Gaussian components take a
/// standard deviation as `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomEnvironment {
    #[serde(default = "custom_name")]
    pub name: String,
    pub theta0: Vec<f64>,
    #[serde(default = "default_p_max")]
    pub p_max: f64,
    pub noise: NoiseSpec,
    pub covariates: CovariateGenerator,
}

fn custom_name() -> String {
    "custom".into()
}

fn default_p_max() -> f64 {
    DEFAULT_P_MAX
}

impl CustomEnvironment {
    pub fn build(&self) -> Result<Environment> {
        let noise = NoiseDistribution::new(self.noise.kind, self.noise.components.clone())?;
        let covariates = match &self.covariates {
            CovariateGenerator::UniformBox { lower, upper } => CovariateGenerator::uniform_box(lower.clone(), upper.clone())?,
            CovariateGenerator::FixedSequence { rows } => CovariateGenerator::fixed_sequence(rows.clone())?,
        };
        Environment::new(self.name.clone(), LinearValuationModel::new(self.theta0.clone(), noise, self.p_max)?, covariates)
    }
}

/// Either a preset name (`example1`…`example12`, `us-loan`, `ca-loan`) or an
/// inline environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSpec {
    Preset(String),
    Custom(CustomEnvironment),
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        Self::Preset("example1".into())
    }
}

impl EnvironmentSpec {
    pub fn name(&self) -> &str {
        match self {
            Self::Preset(n) => n,
            Self::Custom(c) => &c.name,
        }
    }
}

/// Where loan environments get their records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoanSettings {
    /// CSV of loan records.
    pub data: Option<PathBuf>,
    /// Without `data`, generate this many synthetic records instead.
    pub synthetic_records: usize,
    /// Keep only this state; `ca-loan` implies `CA`.
    pub state: Option<String>,
    pub fit: LoanFitOptions,
}

impl Default for LoanSettings {
    fn default() -> Self {
        Self { data: None, synthetic_records: 200_000, state: None, fit: LoanFitOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSpec,
    pub policies: Vec<PolicyKind>,
    /// Rounds per replication; for loan environments also the number of
    /// records sampled per replication.
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Trailing fraction of the curve used for regret slopes.
    pub slope_window: f64,
    /// Compute clairvoyant prices and regret.
    pub record_regret: bool,
    /// Write every `regret_stride`-th step to `regret.csv` (the last step
    /// is always written).
    pub regret_stride: usize,
    pub dip: DipConfig,
    pub rmlp: RmlpConfig,
    pub loan: LoanSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            environment: EnvironmentSpec::default(),
            policies: vec![PolicyKind::Dip, PolicyKind::Rmlp, PolicyKind::Rmlp2],
            horizon: 1 << 15,
            replications: 20,
            seed: 1,
            output: None,
            slope_window: 0.5,
            record_regret: true,
            regret_stride: 1,
            dip: DipConfig::default(),
            rmlp: RmlpConfig::default(),
            loan: LoanSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s).map_err(|e| PricingError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| PricingError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.replications == 0 {
            return Err(PricingError::Config("horizon and replications must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(PricingError::Config("no policies selected".into()));
        }
        if self.regret_stride == 0 {
            return Err(PricingError::Config("regret_stride must be at least 1".into()));
        }
        if !(self.slope_window > 0.0 && self.slope_window <= 1.0) {
            return Err(PricingError::Config(format!("slope_window {} outside (0, 1]", self.slope_window)));
        }
        self.dip.validate()
    }

    pub fn policy_settings(&self) -> PolicySettings {
        PolicySettings { dip: self.dip, rmlp: self.rmlp }
    }

    /// Largest price any configured policy may post.
    pub fn max_policy_price(&self) -> f64 {
        self.dip.p_max.max(self.rmlp.p_max)
    }

    pub fn environment_source(&self) -> Result<EnvironmentSource> {
        let source = match &self.environment {
            EnvironmentSpec::Custom(c) => EnvironmentSource::Fixed(c.build()?),
            EnvironmentSpec::Preset(name) if name == "us-loan" || name == "ca-loan" => {
                let state = if name == "ca-loan" { Some("CA".to_string()) } else { self.loan.state.clone() };
                let records = match &self.loan.data {
                    Some(path) => read_records(path)?,
                    None => {
                        warn!("no loan data given; generating {} synthetic records", self.loan.synthetic_records);
                        let model = SyntheticLoanModel::with_noise(preset("example1")?.model.noise().clone());
                        synthetic_loans(&model, self.loan.synthetic_records, &mut stream(self.seed, 0, Substream::Data))?
                    }
                };
                let records = filter_state(records, state.as_deref());
                let replay = fit_ground_truth(&records, &self.loan.fit)?;
                if replay.len() < self.horizon {
                    return Err(PricingError::Config(format!(
                        "{name}: {} usable records, fewer than the horizon {}",
                        replay.len(),
                        self.horizon
                    )));
                }
                info!("{name}: fitted theta {:?} on {} records", replay.model.theta0(), replay.len());
                EnvironmentSource::Replay { name: name.clone(), replay: Arc::new(replay) }
            }
            EnvironmentSpec::Preset(name) => EnvironmentSource::Fixed(preset(name)?),
        };
        source.widened(self.max_policy_price())
    }
}

/// Produces the market of each replication. Loan replays draw a fresh
/// subsample of records per replication.
#[derive(Debug, Clone)]
pub enum EnvironmentSource {
    Fixed(Environment),
    Replay { name: String, replay: Arc<ReplayEnvironment> },
}

impl EnvironmentSource {
    pub fn name(&self) -> &str {
        match self {
            Self::Fixed(e) => &e.name,
            Self::Replay { name, .. } => name,
        }
    }

    pub fn model(&self) -> &LinearValuationModel {
        match self {
            Self::Fixed(e) => &e.model,
            Self::Replay { replay, .. } => &replay.model,
        }
    }

    /// Raises the market's price ceiling so that every policy price is
    /// admissible.
    pub fn widened(self, p_max: f64) -> Result<Self> {
        if p_max <= self.model().p_max() {
            return Ok(self);
        }
        info!("raising the market price ceiling from {} to {p_max}", self.model().p_max());
        let widen = |m: &LinearValuationModel| LinearValuationModel::new(m.theta0().to_vec(), m.noise().clone(), p_max);
        Ok(match self {
            Self::Fixed(e) => {
                let model = widen(&e.model)?;
                Self::Fixed(Environment::new(e.name, model, e.covariates)?)
            }
            Self::Replay { name, replay } => {
                let mut r = (*replay).clone();
                r.model = widen(&r.model)?;
                Self::Replay { name, replay: Arc::new(r) }
            }
        })
    }

    pub fn for_replication(&self, horizon: usize, master: u64, replication: usize) -> Result<Environment> {
        match self {
            Self::Fixed(e) => Ok(e.clone()),
            Self::Replay { name, replay } => {
                let idx = subsample(replay.len(), horizon, &mut stream(master, replication, Substream::Sampling))?;
                replay.environment(name, &idx)
            }
        }
    }
}
