//! Command-line pipeline around the `synthgraph` library.

pub mod commands;
pub mod manifest;
pub mod pipeline;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "synthgraph", version, about = "Synthetic contact networks and graph-complexity comparison")]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for outputs that have no explicit path.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one stylized graph, or the twelve-graph reference suite.
    GenStylized(commands::GenStylizedArgs),
    /// Fit, sample and schedule a synthetic population; writes visits.
    GenPopulation(commands::GenPopulationArgs),
    /// Turn a visit schedule into collocation records.
    InduceContacts(commands::InduceContactsArgs),
    /// Thin collocations with per-activity probabilities.
    SampleContacts(commands::SampleContactsArgs),
    /// Compute feature vectors for graphs.
    Features(commands::FeaturesArgs),
    /// Cluster and project a feature table.
    Analyze(commands::AnalyzeArgs),
    /// Render a scatter CSV as SVG.
    Plot(commands::PlotArgs),
    /// Run every stage, resuming from finished artifacts.
    RunPipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// JSON pipeline config; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated subset of: stylized, agent, real.
    #[arg(long, value_delimiter = ',')]
    pub families: Vec<String>,
    /// Recompute stages even when their artifacts are current.
    #[arg(long)]
    pub force: bool,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    match cli.command {
        Command::GenStylized(a) => commands::gen_stylized(&a, cli.seed, &cli.out_dir),
        Command::GenPopulation(a) => commands::gen_population(&a, cli.seed, &cli.out_dir),
        Command::InduceContacts(a) => commands::induce(&a, &cli.out_dir),
        Command::SampleContacts(a) => commands::sample(&a, cli.seed, &cli.out_dir),
        Command::Features(a) => commands::features(&a, cli.seed, &cli.out_dir),
        Command::Analyze(a) => commands::analyze(&a, cli.seed, &cli.out_dir),
        Command::Plot(a) => commands::plot(&a, &cli.out_dir),
        Command::RunPipeline(a) => pipeline::run_pipeline(&a, cli.seed, &cli.out_dir).map(|_| ()),
    }
}

/// 3 for numerical failures, 2 for everything else.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    match e.chain().find_map(|c| c.downcast_ref::<synthgraph::Error>()) {
        Some(err) if err.is_numerical() => 3,
        _ => 2,
    }
}
