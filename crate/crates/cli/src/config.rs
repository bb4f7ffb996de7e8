//! Run configuration files for the `evaluate` subcommand and shared
//! config-loading helpers.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use htrec_core::corpus::{MixWeights, SyntheticParams};
use htrec_core::recommend::RecommenderConfig;

/// Parses a TOML or JSON config file, chosen by extension (TOML unless the
/// file ends in `.json`).
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Synthetic-generator settings as they appear in config files. The seed is
/// mandatory so generated runs are always reproducible.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    pub users: usize,
    pub followee_degree: usize,
    pub vocabulary: usize,
    pub events: usize,
    pub decay: f64,
    /// individual, social, external; must sum to 1.
    pub weights: [f64; 3],
    #[serde(default = "default_mean_gap")]
    pub mean_gap_secs: f64,
    #[serde(default)]
    pub session_continue: f64,
    #[serde(default = "default_session_gap")]
    pub session_gap_secs: f64,
    pub seed: u64,
    #[serde(default)]
    pub with_text: bool,
}

fn default_mean_gap() -> f64 {
    60.0
}

fn default_session_gap() -> f64 {
    90.0
}

impl GenerateSection {
    pub fn to_params(&self) -> SyntheticParams {
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

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    /// Directory holding `follows.tsv`, `tweets.tsv` and `seeds.txt`.
    pub corpus: Option<PathBuf>,
    pub generate: Option<GenerateSection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scenario: u8,
    pub algorithms: Vec<String>,
    pub output_dir: PathBuf,
}

/// One self-describing experiment: an input corpus (files or generator),
/// the recommender configuration and what to run.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSection,
    #[serde(default)]
    pub recommender: RecommenderConfig,
    pub run: RunSection,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match (&self.input.corpus, &self.input.generate) {
            (Some(_), Some(_)) => {
                bail!("config must set exactly one of input.corpus and input.generate, not both")
            }
            (None, None) => bail!("config must set one of input.corpus or input.generate"),
            _ => {}
        }
        if !matches!(self.run.scenario, 1 | 2) {
            bail!("run.scenario must be 1 or 2");
        }
        if self.run.algorithms.is_empty() {
            bail!("run.algorithms must not be empty");
        }
        Ok(())
    }
}

/// Applies the `HTREC_OUT` environment override to an output directory.
pub fn resolve_out_dir(configured: &Path) -> PathBuf {
    match std::env::var_os("HTREC_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => configured.to_path_buf(),
    }
}
