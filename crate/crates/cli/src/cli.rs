use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::analyze::{cmd_analyze, AnalyzeOptions};
use crate::commands::experiment::{cmd_experiment, ExperimentOptions};
use crate::commands::monitor::{cmd_monitor, MonitorOptions};
use crate::commands::report::cmd_report;
use crate::commands::simulate::{cmd_simulate, SimulateOptions};
use crate::error::CliError;
use crate::manifest::{Manifest, Settings};

#[derive(Debug, Parser)]
#[command(name = "spikescope", version, about = "Spike-train analysis of neural-network activations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Manifest file (`key = value`, `[section]` per subcommand).
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct AnalysisFlags {
    /// Fano-factor window.
    #[arg(long)]
    pub window: Option<usize>,
    /// Ljung-Box lags.
    #[arg(long)]
    pub lags: Option<usize>,
    /// Significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bonferroni family size (default: number of comparisons made).
    #[arg(long)]
    pub comparisons: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a spike matrix of independent Bernoulli(lambda) nodes.
    Simulate {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the assumption-test battery on one or more trace files.
    Analyze {
        /// Activation or spike CSV files; paired conditions get similarity symbols.
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        adf_lags: Option<usize>,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train the condition x width x seed sweep and write its tables.
    Experiment {
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        analysis: AnalysisFlags,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Per-batch mean firing rate through a generalize -> memorize switch.
    Monitor {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Summarize a finished experiment directory.
    Report {
        /// Experiment output directory.
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
}

fn settings(common: &Common, section: &str) -> Result<(Manifest, Settings), CliError> {
    let manifest = match &common.config {
        Some(p) => Manifest::load(p)?,
        None => Manifest::default(),
    };
    let view = manifest.view(section);
    Ok((manifest, view))
}

fn apply_analysis(s: &mut Settings, a: &AnalysisFlags) {
    s.set_opt("window", a.window);
    s.set_opt("lags", a.lags);
    s.set_opt("alpha", a.alpha);
    s.set_opt("comparisons", a.comparisons);
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { lambda, n, nodes, seed, out, common } => {
            let (m, mut s) = settings(&common, "simulate")?;
            s.set_opt("lambda", lambda);
            s.set_opt("n", n);
            s.set_opt("nodes", nodes);
            s.set_opt("seed", seed);
            let o = SimulateOptions::from_settings(&s)?;
            s.reject_unused(&m)?;
            cmd_simulate(&o, &out, common.force)
        }
        Command::Analyze { traces, adf_lags, analysis, out, common } => {
            let (m, mut s) = settings(&common, "analyze")?;
            apply_analysis(&mut s, &analysis);
            s.set_opt("adf_lags", adf_lags);
            let o = AnalyzeOptions::from_settings(&s)?;
            s.reject_unused(&m)?;
            cmd_analyze(&traces, &o, &out, common.force)
        }
        Command::Experiment { seed, analysis, out, common } => {
            let (m, mut s) = settings(&common, "experiment")?;
            s.set_opt("seed", seed);
            apply_analysis(&mut s, &analysis);
            // lags only matter to `analyze`; accept the flag for symmetry
            let _ = s.get::<usize>("lags")?;
            let o = ExperimentOptions::from_settings(&s)?;
            s.reject_unused(&m)?;
            cmd_experiment(&o, &out, common.force).map(|_| ())
        }
        Command::Monitor { seed, out, common } => {
            let (m, mut s) = settings(&common, "monitor")?;
            s.set_opt("seed", seed);
            let o = MonitorOptions::from_settings(&s)?;
            s.reject_unused(&m)?;
            cmd_monitor(&o, &out, common.force)
        }
        Command::Report { input, out, force } => cmd_report(&input, &out, force),
    }
}
