use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use dip_core::estimation::{estimate_noise, SmoothingOptions};
use dip_core::harness::{
    run_experiment, sensitivity_sweep, write_sweep_csv, EnvironmentSpec, ExperimentConfig, ExperimentResult, PolicyKind,
    SweepGrid,
};
use dip_core::plb::{plb_bench, write_plb_csv, PlbInstance};

#[derive(Parser)]
#[command(name = "dip", version, about = "Contextual dynamic pricing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    reps: Option<usize>,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MarketArgs {
    /// Preset (example1..example12, us-loan, ca-loan).
    #[arg(long)]
    env: Option<String>,
    /// Comma-separated policies: dip, dip-svm, rmlp, rmlp2, random.
    #[arg(long, value_delimiter = ',')]
    policies: Vec<PolicyKind>,
    /// Write every n-th step to regret.csv.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run policies on one environment and write traces.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// Like simulate, and print a table of final regrets and slopes.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// M-LinUCB on perturbed linear bandit instances.
    PlbBench {
        #[command(flatten)]
        common: Common,
        /// Central success probabilities of the adversarial instance.
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.6")]
        central: Vec<f64>,
        /// Perturbation constants to run on the adversarial instance.
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        cp: Vec<f64>,
        /// Success probabilities of an extra stationary instance.
        #[arg(long, value_delimiter = ',')]
        stationary: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Estimate a noise law from a CSV of (u, y) pairs.
    EstimateNoise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
    },
    /// Fit a market to loan records and replay policies on subsamples.
    LoanReplay {
        #[command(flatten)]
        common: Common,
        /// Loan records CSV; synthetic records are generated when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Keep only this state.
        #[arg(long)]
        state: Option<String>,
        /// Each replication samples 2^k records.
        #[arg(long, default_value_t = 16)]
        log2_size: u32,
        /// First and second episode length for every policy.
        #[arg(long, default_value_t = 1024)]
        alpha: usize,
        #[arg(long, value_delimiter = ',')]
        policies: Vec<PolicyKind>,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// DIP sensitivity to lambda, p_max and C.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        env: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1")]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "25,30,35")]
        p_max: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "15,20,25")]
        c: Vec<f64>,
    },
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(r) = common.reps {
        config.replications = r;
    }
    if let Some(h) = common.horizon {
        config.horizon = h;
    }
    if let Some(o) = &common.out {
        config.output = Some(o.clone());
    }
    Ok(config)
}

fn apply_market(config: &mut ExperimentConfig, market: &MarketArgs) {
    if let Some(env) = &market.env {
        config.environment = EnvironmentSpec::Preset(env.clone());
    }
    if !market.policies.is_empty() {
        config.policies = market.policies.clone();
    }
    if let Some(s) = market.stride {
        config.regret_stride = s;
    }
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config.output.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn run_and_write(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let res = run_experiment(config)?;
    let dir = out_dir(config);
    res.write(&dir, config.regret_stride)?;
    std::fs::write(dir.join("config.toml"), config.to_toml_string()?)?;
    info!("wrote results to {}", dir.display());
    Ok(res)
}

fn print_table(res: &ExperimentResult) {
    println!("{:<10} {:>12} {:>12} {:>12} {:>10} {:>10}", "policy", "final_mean", "ci_lower", "ci_upper", "slope", "est_slope");
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |s| format!("{s:.3}"));
    for p in &res.summary.policies {
        let (m, lo, hi) = p.final_regret.map_or((f64::NAN, f64::NAN, f64::NAN), |r| (r.mean, r.lower, r.upper));
        println!(
            "{:<10} {:>12.2} {:>12.2} {:>12.2} {:>10} {:>10}",
            p.policy,
            m,
            lo,
            hi,
            fmt(p.regret_slope),
            fmt(p.estimation_slope)
        );
    }
}

fn read_uy(path: &Path) -> Result<Vec<(f64, bool)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        u: f64,
        y: u8,
    }
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut data = Vec::new();
    for row in rdr.deserialize() {
        let r: Row = row?;
        if r.y > 1 || !r.u.is_finite() {
            bail!("row {}: expected finite u and y in {{0, 1}}", data.len() + 1);
        }
        data.push((r.u, r.y == 1));
    }
    Ok(data)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Simulate { common, market } => {
            let mut config = load_config(&common)?;
            apply_market(&mut config, &market);
            run_and_write(&config)?;
        }
        Command::Compare { common, market } => {
            let mut config = load_config(&common)?;
            apply_market(&mut config, &market);
            if market.policies.is_empty() && common.config.is_none() {
                config.policies = vec![PolicyKind::Dip, PolicyKind::Rmlp, PolicyKind::Rmlp2, PolicyKind::Random];
            }
            let res = run_and_write(&config)?;
            print_table(&res);
        }
        Command::PlbBench { common, central, cp, stationary, lambda } => {
            let mut config = load_config(&common)?;
            if common.horizon.is_none() && common.config.is_none() {
                config.horizon = 10_000;
            }
            config.validate()?;
            let mut instances = Vec::new();
            for &c in &cp {
                instances.push((format!("adversarial-{c}"), PlbInstance::adversarial(central.clone(), c)?));
            }
            if !stationary.is_empty() {
                instances.push(("stationary".to_string(), PlbInstance::stationary(stationary)?));
            }
            let rows = plb_bench(&instances, config.horizon, config.replications, config.seed, lambda)?;
            let dir = out_dir(&config);
            std::fs::create_dir_all(&dir)?;
            write_plb_csv(&rows, &dir.join("plb.csv"))?;
            for (name, inst) in &instances {
                let finals: Vec<f64> =
                    rows.iter().filter(|r| &r.instance == name && r.t == config.horizon).map(|r| r.cum_regret).collect();
                let ci = dip_core::harness::mean_ci(&finals)?;
                println!("{name}: C_p {} final regret {:.2} [{:.2}, {:.2}]", inst.perturbation(), ci.mean, ci.lower, ci.upper);
            }
        }
        Command::EstimateNoise { common, input, window, sigma } => {
            let config = load_config(&common)?;
            let data = read_uy(&input)?;
            let opts = SmoothingOptions { window, sigma, ..Default::default() };
            let est = estimate_noise(&data, &opts)?;
            let dir = out_dir(&config);
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("noise.json"), serde_json::to_string_pretty(&est)?)?;
            let mut w = csv::Writer::from_path(dir.join("noise_grid.csv"))?;
            w.write_record(["v", "cdf", "pdf"])?;
            for (v, f, d) in est.grid_dump(-20.0, 40.0, 600) {
                w.write_record([v.to_string(), f.to_string(), d.to_string()])?;
            }
            w.flush()?;
            println!("median {:.4}, {} mixture components", est.distribution.median()?, est.weights.len());
        }
        Command::LoanReplay { common, input, state, log2_size, alpha, policies, stride } => {
            let mut config = load_config(&common)?;
            let env = if state.as_deref() == Some("CA") { "ca-loan" } else { "us-loan" };
            config.environment = EnvironmentSpec::Preset(env.into());
            config.loan.data = input.or(config.loan.data);
            config.loan.state = state.or(config.loan.state);
            if common.horizon.is_none() {
                config.horizon = 1usize << log2_size;
            }
            (config.dip.alpha1, config.dip.alpha2) = (alpha, alpha);
            (config.rmlp.alpha1, config.rmlp.alpha2) = (alpha, alpha);
            if !policies.is_empty() {
                config.policies = policies;
            } else if common.config.is_none() {
                config.policies = vec![PolicyKind::Dip, PolicyKind::Rmlp2];
            }
            if let Some(s) = stride {
                config.regret_stride = s;
            }
            let res = run_and_write(&config)?;
            print_table(&res);
        }
        Command::Sweep { common, env, lambda, p_max, c } => {
            let mut config = load_config(&common)?;
            if let Some(env) = env {
                config.environment = EnvironmentSpec::Preset(env);
            }
            let grid = SweepGrid { lambda, p_max, c };
            let rows = sensitivity_sweep(&config, &grid)?;
            let dir = out_dir(&config);
            std::fs::create_dir_all(&dir)?;
            write_sweep_csv(&rows, &dir.join("sweep.csv"))?;
            std::fs::write(dir.join("sweep.json"), serde_json::to_string_pretty(&rows)?)?;
            println!("{:>8} {:>6} {:>6} {:>12} {:>10}", "lambda", "p_max", "C", "final_mean", "rel_change");
            for r in &rows {
                println!(
                    "{:>8} {:>6} {:>6} {:>12.2} {:>+10.3}{}",
                    r.lambda,
                    r.p_max,
                    r.c,
                    r.final_regret.mean,
                    r.relative_change,
                    if r.base { "  (base)" } else { "" }
                );
            }
        }
    }
    Ok(())
}
