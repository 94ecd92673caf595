//! Experiment orchestration: seeded replications, aggregation, slopes and
//! parameter sweeps.

mod config;
mod experiment;
mod run;
mod stats;
mod sweep;

pub use config::{CustomEnvironment, EnvironmentSource, EnvironmentSpec, ExperimentConfig, LoanSettings, NoiseSpec};
pub use experiment::{
    run_experiment, run_experiment_on, EpisodeSummary, ExperimentResult, ExperimentSummary, PolicyResult,
    PolicySummary,
};
pub use run::{build_policy, run_policy, EpisodeRecord, MarketPath, PolicyKind, PolicySettings, RunTrace, StepRecord};
pub use stats::{curve_band, loglog_slope, loglog_slope_xy, mean_ci, CurveBand, MeanCi, Z_95};
pub use sweep::{sensitivity_sweep, write_sweep_csv, SweepGrid, SweepRow};
