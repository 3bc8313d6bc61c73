//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::error::{SimError, SimResult};
use crate::experiments::{run_experiment, Experiment};
use crate::output::write_result;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DOPPLER_SKG_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Maximum key rate over a grid of mobility constants
    KeyRate,
    /// Simulated NPSDS histograms against the analytic law
    NpsdsPdf,
    /// Histograms of the ML estimates at a fixed NPSDS
    Estimator,
    /// Estimation MSE per link against the number of observations
    Mse,
    /// Key disagreement rate against the quantization interval
    Kdr,
    /// Propagation-delay acceleration bound
    Timing,
    /// Every experiment in turn
    All,
}

impl Command {
    pub fn experiments(self) -> Vec<Experiment> {
        match self {
            Command::KeyRate => vec![Experiment::KeyRate],
            Command::NpsdsPdf => vec![Experiment::NpsdsPdf],
            Command::Estimator => vec![Experiment::Estimator],
            Command::Mse => vec![Experiment::Mse],
            Command::Kdr => vec![Experiment::Kdr],
            Command::Timing => vec![Experiment::Timing],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "doppler-skg", version, about = "Doppler-shift key generation simulator for spacecraft links")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML); built-in defaults when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long, global = true, env = OUT_ENV, default_value = "results")]
    out: PathBuf,
    /// Override the master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override trial and key-duration counts
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
}

/// Parse `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let a = Args::try_parse_from(argv)?;
    Ok(Invocation {
        command: a.command,
        config: a.config,
        out: a.out,
        seed: a.seed,
        trials: a.trials,
        threads: a.threads,
    })
}

/// Configuration with command-line overrides applied.
pub fn resolve_config(inv: &Invocation) -> SimResult<ScenarioConfig> {
    let mut cfg = match &inv.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = inv.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = inv.trials {
        cfg.trials = t;
        cfg.n_durations = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run the invocation, printing one line per experiment. Returns the
/// written CSV paths.
pub fn run(inv: &Invocation) -> SimResult<Vec<PathBuf>> {
    let cfg = resolve_config(inv)?;
    std::fs::create_dir_all(&inv.out).map_err(|e| SimError::io(&inv.out, e))?;
    let body = || -> SimResult<Vec<PathBuf>> {
        let mut written = Vec::new();
        for exp in inv.command.experiments() {
            let r = run_experiment(exp, &cfg)?;
            let (csv, _) = write_result(&r, &cfg, &inv.out)?;
            println!("{}", r.headline());
            written.push(csv);
        }
        Ok(written)
    };
    match inv.threads {
        Some(0) => Err(SimError::Usage("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Usage(e.to_string()))?
            .install(body),
        None => body(),
    }
}
