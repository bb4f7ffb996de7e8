//! `htrec`: temporal hashtag-reuse analysis and recommendation experiments
//! on file-based or synthetic corpora.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use htrec_core::corpus::{MixWeights, SyntheticParams};
use htrec_core::recommend::{Algorithm, RecommenderConfig};

#[derive(Parser)]
#[command(
    name = "htrec",
    version,
    about = "Time-aware hashtag recommendation toolkit",
    long_about = "Ingests or generates tweet corpora, analyzes hashtag reuse decay, builds \
                  content indices, scores recommenders and runs leave-one-out experiments.\n\
                  Set HTREC_OUT to override any output directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of users (all become seed users)
    #[arg(long, default_value_t = 100)]
    users: usize,
    /// Followees per user
    #[arg(long, default_value_t = 10)]
    followee_degree: usize,
    /// Size of the fresh-hashtag pool
    #[arg(long, default_value_t = 5000)]
    vocabulary: usize,
    /// Number of tweets to simulate
    #[arg(long, default_value_t = 20000)]
    events: usize,
    /// Power-law decay exponent of the reuse kernel
    #[arg(long, default_value_t = 1.7)]
    decay: f64,
    /// Mixing weights individual,social,external (must sum to 1)
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.5, 0.3, 0.2])]
    weights: Vec<f64>,
    /// Mean inter-session gap in seconds
    #[arg(long, default_value_t = 60.0)]
    mean_gap_secs: f64,
    /// Probability that the next event continues the same user's session
    #[arg(long, default_value_t = 0.0)]
    session_continue: f64,
    /// Mean in-session gap in seconds
    #[arg(long, default_value_t = 90.0)]
    session_gap_secs: f64,
    /// RNG seed (runs are reproducible given the same seed)
    #[arg(long)]
    seed: u64,
    /// Generate tweet text from per-hashtag term pools
    #[arg(long)]
    with_text: bool,
}

impl GenerateArgs {
    fn to_params(&self) -> SyntheticParams {
        SyntheticParams {
            users: self.users,
            followee_degree: self.followee_degree,
            vocabulary: self.vocabulary,
            events: self.events,
            decay: self.decay,
            weights: MixWeights::new(self.weights[0], self.weights[1], self.weights[2]),
            mean_gap_secs: self.mean_gap_secs,
            session_continue: self.session_continue,
            session_gap_secs: self.session_gap_secs,
            seed: self.seed,
            with_text: self.with_text,
        }
    }
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Build a TF-IDF index over a corpus and save it as versioned JSON
    Build {
        /// Corpus directory (follows.tsv, tweets.tsv, seeds.txt)
        #[arg(long)]
        corpus: PathBuf,
        /// Output index file
        #[arg(long)]
        out: PathBuf,
        /// Recommender config file (TOML or JSON) for index thresholds
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print statistics of a saved index
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Ingest the three input files and persist the corpus with statistics
    Ingest {
        #[arg(long)]
        follows: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        /// Output corpus directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with power-law hashtag reuse
    Generate {
        #[command(flatten)]
        args: GenerateArgs,
        /// Output corpus directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute reuse-recency series and decay fits
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Content index operations
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Score one recommender for one user
    Recommend {
        #[arg(long)]
        corpus: PathBuf,
        /// One of: mp_i, mr_i, bll_i, mp_s, mr_s, bll_s, mp, cf, folkrank,
        /// bll_is, sr, bll_isc
        #[arg(long)]
        algo: String,
        #[arg(long)]
        user: String,
        /// Tweet text (required by sr and bll_isc)
        #[arg(long)]
        text: Option<String>,
        /// Reference timestamp; defaults to the corpus end plus one hour
        #[arg(long)]
        ts_ref: Option<i64>,
        /// Maximum list length
        #[arg(long)]
        k: Option<usize>,
        /// Recommender config file (TOML or JSON)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Saved index file (otherwise built on the fly when needed)
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Run a leave-one-out experiment described by a run config file
    Evaluate {
        /// Run config (TOML or JSON; see the repository README)
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest {
            follows,
            tweets,
            seeds,
            out,
        } => commands::cmd_ingest(&follows, &tweets, &seeds, &out),
        Command::Generate { args, out } => commands::cmd_generate(&args.to_params(), &out),
        Command::Analyze { corpus, out } => commands::cmd_analyze(&corpus, &out),
        Command::Index { command } => match command {
            IndexCommand::Build {
                corpus,
                out,
                config,
            } => {
                let cfg = match config {
                    Some(path) => config::load_config::<RecommenderConfig>(&path)?,
                    None => RecommenderConfig::default(),
                };
                cfg.validate()?;
                commands::cmd_index_build(&corpus, &out, &cfg)
            }
            IndexCommand::Stats { index } => commands::cmd_index_stats(&index),
        },
        Command::Recommend {
            corpus,
            algo,
            user,
            text,
            ts_ref,
            k,
            config,
            index,
        } => commands::cmd_recommend(&commands::RecommendArgs {
            corpus_dir: corpus,
            algo: algo.parse::<Algorithm>()?,
            user,
            text,
            ts_ref,
            k,
            config,
            index,
        }),
        Command::Evaluate { config } => commands::cmd_evaluate(&config),
    }
}
