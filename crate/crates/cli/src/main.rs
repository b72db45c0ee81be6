mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::DiagnosticsMode;
use config::CommonArgs;

#[derive(Parser)]
#[command(
    name = "sfbow",
    version,
    about = "Fuzzy bag-of-words sentence similarity over pretrained word embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a universe matrix and persist it
    BuildUniverse(BuildUniverseArgs),
    /// Score one sentence pair
    Similarity(SimilarityArgs),
    /// Evaluate gold-labelled sentence-pair datasets
    EvalSts(EvalStsArgs),
    /// Emit elbow curves or explained-variance data for plotting
    Diagnostics(DiagnosticsArgs),
}

#[derive(Args)]
struct BuildUniverseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output universe file
    out: PathBuf,
}

#[derive(Args)]
struct SimilarityArgs {
    #[command(flatten)]
    common: CommonArgs,
    sentence_a: String,
    sentence_b: String,
}

#[derive(Args)]
struct EvalStsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// One TSV dataset per task: gold<TAB>sentence_a<TAB>sentence_b
    #[arg(required = true)]
    datasets: Vec<PathBuf>,
}

#[derive(Args)]
struct DiagnosticsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Explained-variance ratios per principal component
    #[arg(long, conflicts_with = "k_list")]
    pca: bool,
    /// Cluster counts to sweep, e.g. --k-list 100,1000
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<usize>,
    /// Sweep spherical k-means instead of Euclidean k-means
    #[arg(long, requires = "k_list")]
    spherical: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        match &cli.command {
            Command::BuildUniverse(args) => config::resolve(&args.common)
                .and_then(|cfg| commands::build_universe(&cfg, &args.out)),
            Command::Similarity(args) => config::resolve(&args.common)
                .and_then(|cfg| commands::similarity(&cfg, &args.sentence_a, &args.sentence_b)),
            Command::EvalSts(args) => config::resolve(&args.common)
                .and_then(|cfg| commands::eval_sts(&cfg, &args.datasets)),
            Command::Diagnostics(args) => config::resolve(&args.common).and_then(|cfg| {
                let mode = if args.pca {
                    DiagnosticsMode::Pca
                } else if !args.k_list.is_empty() {
                    DiagnosticsMode::Clustering {
                        k_list: args.k_list.clone(),
                        spherical: args.spherical,
                    }
                } else {
                    anyhow::bail!("diagnostics needs --pca or --k-list");
                };
                commands::diagnostics(&cfg, mode)
            }),
        };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
