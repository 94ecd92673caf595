//! DIP parameter sensitivity: the base configuration against every
//! combination of alternative `λ`, `p_max` and `C` values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{build_policy, run_policy, MarketPath, PolicyKind, PolicySettings};
use super::stats::{mean_ci, MeanCi};
use crate::dip::DipConfig;
use crate::error::{PricingError, Result};
use crate::rng::replication_seed;

/// Values to try per parameter. An empty list keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub lambda: Vec<f64>,
    pub p_max: Vec<f64>,
    pub c: Vec<f64>,
}

impl SweepGrid {
    fn axis(values: &[f64], base: f64) -> Vec<f64> {
        let mut v: Vec<f64> = if values.is_empty() { vec![base] } else { values.to_vec() };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Distinct configurations other than `base`.
    pub fn variants(&self, base: &DipConfig) -> Vec<DipConfig> {
        let mut out = Vec::new();
        for &lambda in &Self::axis(&self.lambda, base.lambda) {
            for &p_max in &Self::axis(&self.p_max, base.p_max) {
                for &c in &Self::axis(&self.c, base.c) {
                    let cfg = DipConfig { lambda, p_max, c, ..*base };
                    if cfg != *base {
                        out.push(cfg);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub p_max: f64,
    pub c: f64,
    pub base: bool,
    pub final_regret: MeanCi,
    /// `(variant − base) / base` on mean final regret.
    pub relative_change: f64,
}

/// Runs DIP under the base configuration and each variant, all on the same
/// market paths. The market ceiling is raised to the largest swept `p_max`.
pub fn sensitivity_sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let mut configs = vec![base.dip];
    configs.extend(grid.variants(&base.dip));
    let ceiling = configs.iter().map(|c| c.p_max).fold(base.max_policy_price(), f64::max);
    let source = base.environment_source()?.widened(ceiling)?;

    let finals: Vec<Vec<f64>> = (0..base.replications)
        .into_par_iter()
        .map(|rep| {
            let run = || -> Result<Vec<f64>> {
                let env = source.for_replication(base.horizon, base.seed, rep)?;
                let path = MarketPath::generate(&env, base.horizon, base.seed, rep, true)?;
                configs
                    .iter()
                    .map(|dip| {
                        let settings = PolicySettings { dip: *dip, rmlp: base.rmlp };
                        let mut policy = build_policy(PolicyKind::Dip, &settings, &env, base.horizon, base.seed, rep)?;
                        let trace = run_policy(&env, &path, policy.as_mut(), rep)?;
                        Ok(trace.final_regret().unwrap_or(0.0))
                    })
                    .collect()
            };
            run().map_err(|e| PricingError::Replication {
                replication: rep,
                seed: replication_seed(base.seed, rep),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let stats: Vec<MeanCi> = (0..configs.len())
        .map(|i| mean_ci(&finals.iter().map(|f| f[i]).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let base_mean = stats[0].mean;
    Ok(configs
        .iter()
        .zip(stats)
        .enumerate()
        .map(|(i, (cfg, s))| SweepRow {
            lambda: cfg.lambda,
            p_max: cfg.p_max,
            c: cfg.c,
            base: i == 0,
            final_regret: s,
            relative_change: (s.mean - base_mean) / base_mean,
        })
        .collect())
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &std::path::Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["lambda", "p_max", "c", "base", "mean", "lower", "upper", "relative_change"])?;
    for r in rows {
        w.write_record([
            r.lambda.to_string(),
            r.p_max.to_string(),
            r.c.to_string(),
            r.base.to_string(),
            r.final_regret.mean.to_string(),
            r.final_regret.lower.to_string(),
            r.final_regret.upper.to_string(),
            r.relative_change.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_deduplicated_and_excludes_base() {
        let base = DipConfig::default();
        assert!(SweepGrid::default().variants(&base).is_empty());
        let grid = SweepGrid { lambda: vec![0.01, 0.1, 0.01, 1.0], ..Default::default() };
        let v = grid.variants(&base);
        assert_eq!(v.iter().map(|c| c.lambda).collect::<Vec<_>>(), vec![0.01, 1.0]);
        let full = SweepGrid { lambda: vec![0.01, 0.1, 1.0], p_max: vec![25.0, 30.0, 35.0], c: vec![15.0, 20.0, 25.0] };
        assert_eq!(full.variants(&base).len(), 26);
    }

    #[test]
    fn empty_grid_runs_base_only() {
        let base = ExperimentConfig {
            horizon: 600,
            replications: 2,
            dip: DipConfig { alpha1: 200, alpha2: 200, ..Default::default() },
            ..Default::default()
        };
        let rows = sensitivity_sweep(&base, &SweepGrid::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].base);
        assert_eq!(rows[0].relative_change, 0.0);
    }
}
