//! Replicated runs, aggregation and output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EnvironmentSource, ExperimentConfig};
use super::run::{build_policy, run_policy, MarketPath, PolicyKind, RunTrace};
use super::stats::{curve_band, loglog_slope, loglog_slope_xy, mean_ci, CurveBand, MeanCi};
use crate::error::{PricingError, Result};
use crate::policy::PolicyEvents;
use crate::rng::replication_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub samples: usize,
    pub l1_err: MeanCi,
    pub l2_err: MeanCi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub final_regret: Option<MeanCi>,
    /// Log-log slope of the mean cumulative regret over the trailing window.
    pub regret_slope: Option<f64>,
    pub episodes: Vec<EpisodeSummary>,
    /// Log-log slope of mean ℓ1 error against episode length, episodes ≥ 2.
    pub estimation_slope: Option<f64>,
    pub events: PolicyEvents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub environment: String,
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    pub slope_window: f64,
    pub policies: Vec<PolicySummary>,
}

impl ExperimentSummary {
    pub fn policy(&self, name: &str) -> Option<&PolicySummary> {
        self.policies.iter().find(|p| p.policy == name)
    }
}

#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub kind: PolicyKind,
    /// One trace per replication, in replication order.
    pub traces: Vec<RunTrace>,
    pub band: Option<CurveBand>,
    pub summary: PolicySummary,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub summary: ExperimentSummary,
    pub policies: Vec<PolicyResult>,
}

/// Runs every configured policy on every replication. Replications run in
/// parallel; results are gathered in replication order, so the output does
/// not depend on scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let source = config.environment_source()?;
    run_experiment_on(config, &source)
}

pub fn run_experiment_on(config: &ExperimentConfig, source: &EnvironmentSource) -> Result<ExperimentResult> {
    config.validate()?;
    let settings = config.policy_settings();
    let per_rep: Vec<Vec<RunTrace>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let run = || -> Result<Vec<RunTrace>> {
                let env = source.for_replication(config.horizon, config.seed, rep)?;
                let path = MarketPath::generate(&env, config.horizon, config.seed, rep, config.record_regret)?;
                config
                    .policies
                    .iter()
                    .map(|&kind| {
                        let mut policy = build_policy(kind, &settings, &env, config.horizon, config.seed, rep)?;
                        run_policy(&env, &path, policy.as_mut(), rep)
                    })
                    .collect()
            };
            run().map_err(|e| PricingError::Replication {
                replication: rep,
                seed: replication_seed(config.seed, rep),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut columns: Vec<Vec<RunTrace>> = vec![Vec::with_capacity(config.replications); config.policies.len()];
    for traces in per_rep {
        for (slot, trace) in columns.iter_mut().zip(traces) {
            slot.push(trace);
        }
    }
    let policies = config
        .policies
        .iter()
        .zip(columns)
        .map(|(&kind, traces)| aggregate(kind, traces, config.slope_window))
        .collect::<Result<Vec<_>>>()?;
    let summary = ExperimentSummary {
        environment: source.name().to_string(),
        horizon: config.horizon,
        replications: config.replications,
        seed: config.seed,
        slope_window: config.slope_window,
        policies: policies.iter().map(|p| p.summary.clone()).collect(),
    };
    for p in &summary.policies {
        if let Some(r) = &p.final_regret {
            info!("{}: final cumulative regret {:.2} [{:.2}, {:.2}]", p.policy, r.mean, r.lower, r.upper);
        }
    }
    Ok(ExperimentResult { summary, policies })
}

fn aggregate(kind: PolicyKind, traces: Vec<RunTrace>, window: f64) -> Result<PolicyResult> {
    let name = traces[0].policy.clone();
    let mut events = PolicyEvents::default();
    for t in &traces {
        events.merge(&t.events);
    }
    let has_regret = !traces[0].cum_regret.is_empty();
    let (band, final_regret, regret_slope) = if has_regret {
        let curves: Vec<&[f64]> = traces.iter().map(|t| t.cum_regret.as_slice()).collect();
        let band = curve_band(&curves)?;
        let finals: Vec<f64> = traces.iter().filter_map(RunTrace::final_regret).collect();
        let slope = loglog_slope(&band.mean, window).ok();
        (Some(band), Some(mean_ci(&finals)?), slope)
    } else {
        (None, None, None)
    };

    let n_episodes = traces.iter().map(|t| t.episodes.len()).min().unwrap_or(0);
    let mut episodes = Vec::with_capacity(n_episodes);
    for k in 0..n_episodes {
        let l1: Vec<f64> = traces.iter().map(|t| t.episodes[k].l1_err).collect();
        let l2: Vec<f64> = traces.iter().map(|t| t.episodes[k].l2_err).collect();
        let first = &traces[0].episodes[k];
        episodes.push(EpisodeSummary { episode: first.episode, samples: first.samples, l1_err: mean_ci(&l1)?, l2_err: mean_ci(&l2)? });
    }
    let later: Vec<&EpisodeSummary> = episodes.iter().filter(|e| e.episode >= 2).collect();
    let estimation_slope = if later.len() >= 2 {
        let xs: Vec<f64> = later.iter().map(|e| e.samples as f64).collect();
        let ys: Vec<f64> = later.iter().map(|e| e.l1_err.mean).collect();
        loglog_slope_xy(&xs, &ys).ok()
    } else {
        None
    };
    Ok(PolicyResult {
        kind,
        summary: PolicySummary { policy: name, final_regret, regret_slope, episodes, estimation_slope, events },
        traces,
        band,
    })
}

impl ExperimentResult {
    /// Writes `regret.csv`, `curves.csv`, `estimation.csv` and
    /// `summary.json` into `dir`.
    pub fn write(&self, dir: &Path, stride: usize) -> Result<()> {
        fs::create_dir_all(dir)?;
        let stride = stride.max(1);
        let keep = |t: usize, n: usize| t % stride == 0 || t == n;

        let mut w = csv::Writer::from_path(dir.join("regret.csv"))?;
        w.write_record(["policy", "replication", "t", "regret", "cum_regret"])?;
        for p in &self.policies {
            for tr in &p.traces {
                let n = tr.regret.len();
                for (i, (r, c)) in tr.regret.iter().zip(&tr.cum_regret).enumerate() {
                    if keep(i + 1, n) {
                        w.write_record([tr.policy.clone(), tr.replication.to_string(), (i + 1).to_string(), r.to_string(), c.to_string()])?;
                    }
                }
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("curves.csv"))?;
        w.write_record(["policy", "t", "mean", "lower", "upper"])?;
        for p in &self.policies {
            if let Some(band) = &p.band {
                let n = band.mean.len();
                for i in (0..n).filter(|i| keep(i + 1, n)) {
                    w.write_record([
                        p.summary.policy.clone(),
                        (i + 1).to_string(),
                        band.mean[i].to_string(),
                        band.lower[i].to_string(),
                        band.upper[i].to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("estimation.csv"))?;
        w.write_record(["policy", "replication", "episode", "l1_err", "l2_err"])?;
        for p in &self.policies {
            for tr in &p.traces {
                for e in &tr.episodes {
                    w.write_record([
                        tr.policy.clone(),
                        tr.replication.to_string(),
                        e.episode.to_string(),
                        e.l1_err.to_string(),
                        e.l2_err.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;

        let mut f = BufWriter::new(File::create(dir.join("summary.json"))?);
        serde_json::to_writer_pretty(&mut f, &self.summary)?;
        writeln!(f)?;
        Ok(())
    }
}
