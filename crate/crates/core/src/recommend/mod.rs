//! Hashtag recommenders: the base-level-activation family plus the
//! frequency, recency, collaborative-filtering and graph baselines.
//!
//! Every recommender is a pure function of the immutable training snapshot,
//! a reference timestamp and the configuration, and only counts usages
//! strictly before the reference timestamp.

mod baselines;
mod bll;
mod cf;
mod folkrank;

pub use baselines::{mp_global, mp_individual, mp_social, mr_individual, mr_social};
pub use bll::{
    bll_i, bll_individual, bll_is, bll_isc, bll_s, bll_social, softmax_over, Activation,
};
pub use cf::cf_user_based;
pub use folkrank::{folkrank, FolkGraph, FolkNode};

use serde::{Deserialize, Serialize};

use crate::content::{sr, Index};
use crate::corpus::{Corpus, HashtagId, UserId};
use crate::error::{Error, Result};

/// Every tunable of the recommender family in one place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecommenderConfig {
    /// Decay exponent for individual reuse.
    pub d_individual: f64,
    /// Decay exponent for social reuse.
    pub d_social: f64,
    /// Weight of the individual component when mixing with the social one.
    pub beta: f64,
    /// Weight of the usage-based component when mixing with content.
    pub lambda: f64,
    /// Neighborhood size for user-based collaborative filtering.
    pub cf_neighbors: usize,
    /// Preference-vector weight of the graph recommender.
    pub folkrank_d: f64,
    /// Spreading iterations of the graph recommender.
    pub folkrank_iters: usize,
    /// Maximum length of any ranked list.
    pub k_max: usize,
    /// Minimum candidate-side term frequency for content scoring.
    pub min_tf: u32,
    /// Minimum document frequency for content scoring.
    pub min_df: u32,
    /// Number of similar tweets retrieved for content scoring.
    pub s_max: usize,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        Self {
            d_individual: 1.7,
            d_social: 1.25,
            beta: 0.5,
            lambda: 0.3,
            cf_neighbors: 20,
            folkrank_d: 0.7,
            folkrank_iters: 10,
            k_max: 10,
            min_tf: 2,
            min_df: 5,
            s_max: 20,
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        let decay_ok = |d: f64| d.is_finite() && d > 0.0;
        if !decay_ok(self.d_individual) || !decay_ok(self.d_social) {
            return bad("decay exponents must be positive");
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad("beta must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.folkrank_d) {
            return bad("folkrank_d must be in [0, 1]");
        }
        if self.cf_neighbors == 0 || self.folkrank_iters == 0 {
            return bad("cf_neighbors and folkrank_iters must be >= 1");
        }
        if self.k_max == 0 || self.s_max == 0 {
            return bad("k_max and s_max must be >= 1");
        }
        Ok(())
    }
}

/// One recommended hashtag with its score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScoredHashtag {
    pub hashtag: HashtagId,
    pub score: f64,
}

/// Ordered recommendation list: scores strictly non-increasing, no
/// duplicate hashtags, at most `k_max` entries, and only hashtags with
/// positive evidence (zero or negative contributions are dropped).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RankedList {
    items: Vec<ScoredHashtag>,
}

impl RankedList {
    /// Builds a list from `(hashtag, score, most recent qualifying usage)`
    /// candidates: positive-score entries sorted by score, ties broken by
    /// the usage timestamp and then by hashtag id, truncated to `k_max`.
    /// A hashtag appearing more than once keeps only its best-ranked entry.
    pub fn from_candidates(
        candidates: impl IntoIterator<Item = (HashtagId, f64, i64)>,
        k_max: usize,
    ) -> Self {
        let mut ranked: Vec<(HashtagId, f64, i64)> = candidates
            .into_iter()
            .filter(|&(_, score, _)| score > 0.0 && score.is_finite())
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are finite")
                .then(b.2.cmp(&a.2))
                .then(a.0.cmp(&b.0))
        });
        let mut seen = std::collections::HashSet::new();
        ranked.retain(|&(h, _, _)| seen.insert(h));
        ranked.truncate(k_max);
        RankedList {
            items: ranked
                .into_iter()
                .map(|(hashtag, score, _)| ScoredHashtag { hashtag, score })
                .collect(),
        }
    }

    pub fn items(&self) -> &[ScoredHashtag] {
        &self.items
    }

    /// The ranked hashtag ids, highest score first.
    pub fn hashtags(&self) -> Vec<HashtagId> {
        self.items.iter().map(|s| s.hashtag).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// The recommenders runnable by the experiment harness and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MpI,
    MrI,
    BllI,
    MpS,
    MrS,
    BllS,
    Mp,
    Cf,
    Folkrank,
    BllIs,
    Sr,
    BllIsc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 12] = [
        Algorithm::MpI,
        Algorithm::MrI,
        Algorithm::BllI,
        Algorithm::MpS,
        Algorithm::MrS,
        Algorithm::BllS,
        Algorithm::Mp,
        Algorithm::Cf,
        Algorithm::Folkrank,
        Algorithm::BllIs,
        Algorithm::Sr,
        Algorithm::BllIsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MpI => "mp_i",
            Algorithm::MrI => "mr_i",
            Algorithm::BllI => "bll_i",
            Algorithm::MpS => "mp_s",
            Algorithm::MrS => "mr_s",
            Algorithm::BllS => "bll_s",
            Algorithm::Mp => "mp",
            Algorithm::Cf => "cf",
            Algorithm::Folkrank => "folkrank",
            Algorithm::BllIs => "bll_is",
            Algorithm::Sr => "sr",
            Algorithm::BllIsc => "bll_isc",
        }
    }

    /// Whether the algorithm needs the tweet text and a content index.
    pub fn needs_content(self) -> bool {
        matches!(self, Algorithm::Sr | Algorithm::BllIsc)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownId(format!("algorithm {s:?}")))
    }
}

/// Everything a recommender may read while scoring one request.
#[derive(Clone, Copy)]
pub struct ScoringContext<'a> {
    pub train: &'a Corpus,
    pub ts_ref: i64,
    pub text: Option<&'a str>,
    pub index: Option<&'a Index>,
    pub cfg: &'a RecommenderConfig,
}

/// Runs one algorithm for one user. Content-based algorithms fail when the
/// context carries no tweet text or index.
pub fn score(algo: Algorithm, user: UserId, ctx: &ScoringContext<'_>) -> Result<RankedList> {
    let content = || -> Result<(&str, &Index)> {
        match (ctx.text, ctx.index) {
            (Some(t), Some(i)) => Ok((t, i)),
            _ => Err(Error::ContentUnavailable(algo.name().into())),
        }
    };
    Ok(match algo {
        Algorithm::MpI => mp_individual(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::MrI => mr_individual(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::BllI => bll_i(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::MpS => mp_social(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::MrS => mr_social(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::BllS => bll_s(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::Mp => mp_global(ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::Cf => cf_user_based(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::Folkrank => folkrank(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::BllIs => bll_is(user, ctx.ts_ref, ctx.train, ctx.cfg),
        Algorithm::Sr => {
            let (text, index) = content()?;
            sr(text, index, ctx.cfg)
        }
        Algorithm::BllIsc => {
            let (text, index) = content()?;
            bll_isc(user, text, ctx.ts_ref, ctx.train, index, ctx.cfg)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranked_list_sorts_truncates_and_drops_nonpositive() {
        let c = |i: u32| HashtagId(i);
        let list = RankedList::from_candidates(
            vec![
                (c(1), 0.5, 10),
                (c(2), 0.9, 10),
                (c(3), 0.0, 99),
                (c(4), -1.0, 99),
                (c(5), 0.5, 20),
                (c(6), 0.5, 20),
            ],
            3,
        );
        // 2 first; ties at 0.5 resolved by recency then id
        assert_eq!(list.hashtags(), vec![c(2), c(5), c(6)]);
        let scores: Vec<f64> = list.items().iter().map(|s| s.score).collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn algorithm_names_roundtrip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_defaults_are_the_published_settings() {
        let cfg = RecommenderConfig::default();
        assert_eq!(cfg.d_individual, 1.7);
        assert_eq!(cfg.d_social, 1.25);
        assert_eq!(cfg.beta, 0.5);
        assert_eq!(cfg.lambda, 0.3);
        assert_eq!(cfg.cf_neighbors, 20);
        assert_eq!(cfg.folkrank_d, 0.7);
        assert_eq!(cfg.folkrank_iters, 10);
        assert_eq!(cfg.k_max, 10);
        assert_eq!(cfg.min_tf, 2);
        assert_eq!(cfg.min_df, 5);
        assert_eq!(cfg.s_max, 20);
    }

    #[test]
    fn config_validation_catches_bad_ranges() {
        let mut cfg = RecommenderConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.beta = 1.5;
        assert!(cfg.validate().is_err());
        cfg.beta = 0.5;
        cfg.d_social = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn recommenders_only_emit_qualified_hashtags() {
        use crate::corpus::{generate_synthetic, MixWeights, SyntheticParams};
        let c = generate_synthetic(&SyntheticParams {
            users: 30,
            followee_degree: 5,
            vocabulary: 2_000,
            events: 2_000,
            decay: 1.5,
            weights: MixWeights::new(0.5, 0.3, 0.2),
            mean_gap_secs: 30.0,
            session_continue: 0.5,
            session_gap_secs: 60.0,
            seed: 3,
            with_text: false,
        })
        .unwrap();
        let cfg = RecommenderConfig::default();
        let ts_ref = c.tweets()[c.tweets().len() / 2].timestamp;
        let ctx = ScoringContext {
            train: &c,
            ts_ref,
            text: None,
            index: None,
            cfg: &cfg,
        };
        for algo in Algorithm::ALL.iter().filter(|a| !a.needs_content()) {
            for uid in 0..10u32 {
                let user = UserId(uid);
                let list = score(*algo, user, &ctx).unwrap();
                for s in list.items() {
                    let qualified = c.hashtag_events(s.hashtag).any(|e| e.timestamp < ts_ref);
                    assert!(
                        qualified,
                        "{} emitted {:?} with no usage before ts_ref",
                        algo.name(),
                        s.hashtag
                    );
                }
            }
        }
    }
}
