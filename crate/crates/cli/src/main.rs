use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edgelbp_cli::commands;
use edgelbp_cli::{CliError, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "edgelbp", version, about = "edgeLBP relief descriptors and retrieval evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one descriptor file per mesh and a manifest.
    Describe(Overrides),
    /// Distance matrix over the descriptors of the output directory.
    Distmat(Overrides),
    /// Retrieval scores, confusion matrix and tier image from the matrix.
    Evaluate(Overrides),
    /// Export the configured curvature field of each mesh as CSV.
    Curvature(Overrides),
    /// describe, distmat and (with labels) evaluate in one go.
    Run(Overrides),
    /// Print the effective configuration as TOML.
    Config(Overrides),
}

/// Flags mirror the config file keys; flags win over the file, the file wins
/// over the defaults.
#[derive(Args, Default)]
struct Overrides {
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Mesh files (OFF, OBJ, PLY); replaces the config's inputs.
    inputs: Vec<PathBuf>,
    #[arg(long)]
    glob: Option<String>,
    /// k1, k2, H, K, SI or curvedness.
    #[arg(long)]
    field: Option<String>,
    /// Samples per ring.
    #[arg(short, long)]
    p: Option<usize>,
    /// Number of rings.
    #[arg(long)]
    rings: Option<usize>,
    /// explicit:<mm> (or <mm>), area, or edge:<C>.
    #[arg(long)]
    r_max: Option<String>,
    /// a1 or a2.
    #[arg(long)]
    alpha: Option<String>,
    /// bhattacharyya, chi2 or euclidean.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    e_cutoff: Option<usize>,
    /// model_id,class CSV.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
}

impl Overrides {
    fn apply(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(field, p, rings, r_max, alpha, metric, e_cutoff, output, workers);
        if self.glob.is_some() {
            cfg.glob = self.glob;
        }
        if self.labels.is_some() {
            cfg.labels = self.labels;
        }
        Ok(cfg)
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    let (overrides, run): (Overrides, fn(&RunConfig) -> CliResult<()>) = match command {
        Command::Describe(o) => (o, |c| commands::describe(c).map(|_| ())),
        Command::Distmat(o) => (o, |c| commands::distmat(c).map(|_| ())),
        Command::Evaluate(o) => (o, |c| {
            let r = commands::evaluate_run(c)?;
            println!(
                "NN {:.4}  FT {:.4}  ST {:.4}  mAP {:.4}  E {:.4}  DCG {:.4}",
                r.nn, r.ft, r.st, r.map, r.e_measure, r.dcg
            );
            Ok(())
        }),
        Command::Curvature(o) => (o, |c| commands::curvature(c).map(|_| ())),
        Command::Run(o) => (o, commands::run_all),
        Command::Config(o) => (o, |c| {
            c.resolve().map_err(CliError::config)?;
            print!("{}", c.to_toml());
            Ok(())
        }),
    };
    let cfg = overrides.apply().map_err(CliError::config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(CliError::config)?;
    pool.install(|| run(&cfg))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code)
        }
    }
}
