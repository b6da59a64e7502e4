//! The `epps-lab` command line.
//!
//! Settings are layered: built-in defaults, then the `--config` file
//! (`key = value` lines), then `--set key=value`, then the named flags.
//! Every output file gets a `<out>.meta` sidecar listing the effective
//! settings.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::{quote_series, sidecar_path, Mode, RunConfig};
pub use config::{defaults, parse_h_grid, parse_kv, read_kv, Settings};

#[derive(Debug, Parser)]
#[command(name = "epps-lab", version, about = "Lead-lag cross-correlation curves: model, simulation, data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form ρ(h) of the Gaussian momentum model.
    GaussianCurve(GaussianArgs),
    /// Simulate the Gaussian model and compare ρ̂(h) with the closed form.
    GaussianMc(McArgs),
    /// Run the agent-based market and estimate ρ̂(h) on its mids.
    AbmRun(AbmArgs),
    /// Estimate ρ̂(h) from two quote files.
    Analyze(AnalyzeArgs),
    /// Inner-join curve files on h.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Horizons in seconds: `start:stop:step` or `h1,h2,...`.
    #[arg(long)]
    pub h_grid: Option<String>,
    /// Override any setting, e.g. `--set abm.asset1.impact=3e-11`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_assignment)]
    pub set: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct ModelFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, conflicts_with = "xi")]
    pub nu: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<u64>,
    /// Batches for the Monte-Carlo standard error.
    #[arg(long)]
    pub batches: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AbmArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<u64>,
    /// Average the curve over this many consecutive seeds.
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long)]
    pub no_momentum: bool,
    /// Momentum moving-average window in seconds.
    #[arg(long)]
    pub window: Option<f64>,
    /// Mid-price CSV (default: `<out stem>.prices.csv`).
    #[arg(long)]
    pub prices_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Longest quote silence (seconds) bridged by carrying the last mid.
    #[arg(long)]
    pub max_gap: Option<f64>,
    /// `blocked` or `overlapping`.
    #[arg(long)]
    pub ci_mode: Option<String>,
    #[arg(required = true, num_args = 2)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

struct Overrides(Vec<(String, String)>);

impl Overrides {
    fn put<T: ToString>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.0.push((key.to_string(), v.to_string()));
        }
    }

    fn common(&mut self, c: &CommonArgs) {
        self.0.extend(c.set.iter().cloned());
        self.put("run.seed", c.seed);
        self.put("run.h_grid", c.h_grid.as_deref());
    }

    fn model(&mut self, m: &ModelFlags) {
        self.put("gaussian.lambda", m.lambda);
        self.put("gaussian.sigma", m.sigma);
        self.put("gaussian.theta", m.theta);
        self.put("gaussian.nu", m.nu);
        self.put("gaussian.xi", m.xi);
        self.put("gaussian.epsilon", m.epsilon);
        self.put("gaussian.tau", m.tau);
    }
}

impl Command {
    /// Resolves flags and config into a [`RunConfig`].
    pub fn into_run_config(self) -> crate::Result<RunConfig> {
        let mut o = Overrides(Vec::new());
        let (mode, common, inputs, prices_out) = match self {
            Command::GaussianCurve(a) => {
                o.common(&a.common);
                o.model(&a.model);
                (Mode::GaussianCurve, Some(a.common), vec![], None)
            }
            Command::GaussianMc(a) => {
                o.common(&a.common);
                o.model(&a.model);
                o.put("mc.dt", a.dt);
                o.put("mc.n_steps", a.n_steps);
                o.put("mc.batches", a.batches);
                (Mode::GaussianMc, Some(a.common), vec![], None)
            }
            Command::AbmRun(a) => {
                o.common(&a.common);
                o.put("abm.dt", a.dt);
                o.put("abm.n_steps", a.n_steps);
                o.put("abm.replicas", a.replicas);
                o.put("abm.momentum.window", a.window);
                o.put("abm.momentum.enabled", a.no_momentum.then_some(false));
                (Mode::AbmRun, Some(a.common), vec![], a.prices_out)
            }
            Command::Analyze(a) => {
                o.common(&a.common);
                o.put("analyze.dt", a.dt);
                o.put("analyze.max_gap", a.max_gap);
                o.put("analyze.ci_mode", a.ci_mode);
                (Mode::Analyze, Some(a.common), a.files, None)
            }
            Command::Compare(a) => {
                let common = CommonArgs {
                    config: None,
                    out: a.out,
                    seed: None,
                    h_grid: None,
                    set: vec![],
                };
                (Mode::Compare, Some(common), a.files, None)
            }
        };
        let common = common.expect("every mode has common args");
        let mut run = RunConfig::new(mode, common.config.as_deref(), o.0, common.out, inputs)?;
        if prices_out.is_some() {
            run.prices_out = prices_out;
        }
        Ok(run)
    }
}

/// Parses `args` (including the program name), runs the command and maps
/// the outcome to an exit status.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command.into_run_config().and_then(|run| run.execute()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
