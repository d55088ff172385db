use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pagegraph::pipeline::{run_pipeline, Overrides, PipelineConfig, Verb};

#[derive(Parser)]
#[command(
    name = "pagegraph",
    version,
    about = "Classify users, measure pages and extract network backbones from activity logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the inputs; writes validation.json
    Ingest(Options),
    /// Label users; writes classification.csv and user_categories.json
    Classify(Options),
    /// Page metrics, correlations, distributions, breakdowns and map layers
    Stats(Options),
    /// Build the reshares and common-users networks
    Graphs(Options),
    /// Filter the networks written by a previous `graphs` run
    Backbone(Options),
    /// Run every stage and write every export
    All(Options),
}

#[derive(Args)]
struct Options {
    /// TOML configuration file
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Pages registry (CSV)
    #[arg(long)]
    pages: Option<PathBuf>,
    /// Posts (JSON lines)
    #[arg(long)]
    posts: Option<PathBuf>,
    /// Likes (JSON lines)
    #[arg(long)]
    likes: Option<PathBuf>,
    /// Comments (JSON lines)
    #[arg(long)]
    comments: Option<PathBuf>,
    /// Output directory
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Significance level; repeat for several backbones
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Distinct liked posts that make a user habitual
    #[arg(long)]
    habitual_min_likes: Option<usize>,
    /// Share of likes on one page that makes a habitual user polarized
    #[arg(long)]
    polarization_fraction: Option<f64>,
    /// Disable data parallelism
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (verb, opts) = match cli.command {
        Command::Ingest(o) => (Verb::Ingest, o),
        Command::Classify(o) => (Verb::Classify, o),
        Command::Stats(o) => (Verb::Stats, o),
        Command::Graphs(o) => (Verb::Graphs, o),
        Command::Backbone(o) => (Verb::Backbone, o),
        Command::All(o) => (Verb::All, o),
    };

    let result = opts
        .config
        .as_deref()
        .map_or_else(|| Ok(PipelineConfig::default()), PipelineConfig::from_toml_file)
        .and_then(|cfg| {
            cfg.with_overrides(Overrides {
                pages: opts.pages,
                posts: opts.posts,
                likes: opts.likes,
                comments: opts.comments,
                habitual_min_likes: opts.habitual_min_likes,
                polarization_fraction: opts.polarization_fraction,
                alphas: opts.alphas,
                out_dir: opts.out,
                sequential: opts.sequential,
            })
        })
        .and_then(|cfg| run_pipeline(&cfg, verb).map(|m| (cfg, m)));

    match result {
        Ok((cfg, manifest)) => {
            for t in &manifest.timings {
                log::info!("{} took {:.1} ms", t.stage, t.millis);
            }
            println!("wrote {} files to {}", manifest.files.len() + 1, cfg.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
