//! Content-based retrieval: a TF-IDF inverted index over training tweets,
//! tweet-to-tweet similarity and the similarity-rank recommender.
//!
//! The similarity of a query text to a candidate tweet is the sum over the
//! distinct query terms of `tf_in_candidate * ln(total_docs / df)`. Terms
//! only count when the candidate-side term frequency reaches `min_tf` and
//! the document frequency reaches `min_df`. Natural log throughout; the
//! base only rescales scores and cannot change a ranking.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, HashtagId, TweetId};
use crate::error::{Error, Result};
use crate::recommend::{RankedList, RecommenderConfig};

/// Splits a text into lowercase terms: URLs (`http://`, `https://`,
/// `www.`) and `@mentions` are dropped whole, the rest is split on
/// non-alphanumeric characters, and terms shorter than two characters are
/// dropped. A hashtag survives as its bare word.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut terms = Vec::new();
    for word in text.split_whitespace() {
        let lower = word.to_lowercase();
        if lower.starts_with("http://")
            || lower.starts_with("https://")
            || lower.starts_with("www.")
            || lower.starts_with('@')
        {
            continue;
        }
        for term in lower.split(|c: char| !c.is_alphanumeric()) {
            if term.chars().count() >= 2 {
                terms.push(term.to_owned());
            }
        }
    }
    terms
}

/// A document in the index: enough of a tweet for retrieval and for
/// scoring the hashtags of similar tweets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexedDoc {
    pub tweet: TweetId,
    pub timestamp: i64,
    pub hashtags: Vec<HashtagId>,
}

/// Inverted TF-IDF index over the training tweets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Index {
    /// term -> (document position, term frequency), ascending by position.
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    /// term -> number of distinct documents containing it.
    doc_freq: BTreeMap<String, u32>,
    total_docs: usize,
    min_tf: u32,
    min_df: u32,
    docs: Vec<IndexedDoc>,
}

impl Index {
    pub fn total_docs(&self) -> usize {
        self.total_docs
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    pub fn num_postings(&self) -> usize {
        self.postings.values().map(|p| p.len()).sum()
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn thresholds(&self) -> (u32, u32) {
        (self.min_tf, self.min_df)
    }

    pub fn docs(&self) -> &[IndexedDoc] {
        &self.docs
    }

    fn idf(&self, term: &str) -> Option<f64> {
        let df = self.doc_freq(term);
        if df == 0 || df < self.min_df {
            return None;
        }
        Some((self.total_docs as f64 / df as f64).ln())
    }
}

/// Builds the index over all tweets of a corpus (callers pass the training
/// snapshot). Deterministic and independent of tweet order up to the
/// per-document ids.
pub fn build_index(corpus: &Corpus, cfg: &RecommenderConfig) -> Index {
    let mut docs: Vec<IndexedDoc> = corpus
        .tweets()
        .iter()
        .map(|t| IndexedDoc {
            tweet: t.id,
            timestamp: t.timestamp,
            hashtags: t.hashtags.clone(),
        })
        .collect();
    docs.sort_by_key(|d| d.tweet);

    let position: BTreeMap<TweetId, u32> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.tweet, i as u32))
        .collect();

    let mut postings: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
    for t in corpus.tweets() {
        let pos = position[&t.id];
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for term in tokenize(&t.text) {
            *counts.entry(term).or_insert(0) += 1;
        }
        for (term, tf) in counts {
            postings.entry(term).or_default().push((pos, tf));
        }
    }
    for list in postings.values_mut() {
        list.sort_unstable();
    }
    let doc_freq: BTreeMap<String, u32> = postings
        .iter()
        .map(|(t, l)| (t.clone(), l.len() as u32))
        .collect();

    Index {
        postings,
        doc_freq,
        total_docs: docs.len(),
        min_tf: cfg.min_tf,
        min_df: cfg.min_df,
        docs,
    }
}

/// TF-IDF similarity between a query text and one indexed tweet.
pub fn similarity(query_text: &str, candidate: TweetId, index: &Index) -> f64 {
    let pos = index
        .docs
        .binary_search_by_key(&candidate, |d| d.tweet)
        .ok()
        .map(|i| i as u32);
    let Some(pos) = pos else {
        return 0.0;
    };
    let mut terms: Vec<String> = tokenize(query_text);
    terms.sort_unstable();
    terms.dedup();

    let mut score = 0.0;
    for term in &terms {
        let Some(idf) = index.idf(term) else {
            continue;
        };
        let Some(list) = index.postings.get(term) else {
            continue;
        };
        if let Ok(i) = list.binary_search_by_key(&pos, |&(p, _)| p) {
            let tf = list[i].1;
            if tf >= index.min_tf {
                score += tf as f64 * idf;
            }
        }
    }
    score
}

/// The most similar indexed tweets for a query, plus per-hashtag
/// content scores.
#[derive(Clone, Debug, Default)]
pub struct SimilarityResult {
    /// (tweet, similarity), descending, ties by tweet id; at most `s_max`.
    pub neighbors: Vec<(TweetId, f64)>,
    /// hashtag -> (highest similarity among neighbors containing it,
    /// most recent such neighbor's timestamp).
    pub cb_scores: BTreeMap<HashtagId, (f64, i64)>,
}

/// Retrieves the `s_max` most similar tweets and derives content scores:
/// each hashtag of a neighbor scores the maximum similarity over the
/// neighbors containing it.
pub fn top_similar(query_text: &str, index: &Index, s_max: usize) -> SimilarityResult {
    let mut terms: Vec<String> = tokenize(query_text);
    terms.sort_unstable();
    terms.dedup();

    let mut scores: BTreeMap<u32, f64> = BTreeMap::new();
    for term in &terms {
        let Some(idf) = index.idf(term) else {
            continue;
        };
        let Some(list) = index.postings.get(term) else {
            continue;
        };
        for &(pos, tf) in list {
            if tf >= index.min_tf {
                *scores.entry(pos).or_insert(0.0) += tf as f64 * idf;
            }
        }
    }

    let mut ranked: Vec<(u32, f64)> = scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("similarities are finite")
            .then(a.0.cmp(&b.0))
    });
    ranked.truncate(s_max);

    let mut cb_scores: BTreeMap<HashtagId, (f64, i64)> = BTreeMap::new();
    let mut neighbors = Vec::with_capacity(ranked.len());
    for (pos, sim) in ranked {
        let doc = &index.docs[pos as usize];
        neighbors.push((doc.tweet, sim));
        for &h in &doc.hashtags {
            let e = cb_scores.entry(h).or_insert((f64::NEG_INFINITY, i64::MIN));
            e.0 = e.0.max(sim);
            e.1 = e.1.max(doc.timestamp);
        }
    }
    SimilarityResult {
        neighbors,
        cb_scores,
    }
}

/// Similarity-rank: hashtags of the most similar tweets, ranked by their
/// content score. Unpersonalized.
pub fn sr(query_text: &str, index: &Index, cfg: &RecommenderConfig) -> RankedList {
    let result = top_similar(query_text, index, cfg.s_max);
    RankedList::from_candidates(
        result
            .cb_scores
            .into_iter()
            .map(|(h, (score, ts))| (h, score, ts)),
        cfg.k_max,
    )
}

/// Writes the index as versioned JSON.
pub fn save_index(index: &Index, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct OnDisk<'a> {
        version: u32,
        index: &'a Index,
    }
    let payload = serde_json::to_vec(&OnDisk { version: 1, index })
        .map_err(|e| Error::IndexFormat(e.to_string()))?;
    std::fs::write(path, payload).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads an index written by [`save_index`], rejecting unknown versions.
pub fn load_index(path: &Path) -> Result<Index> {
    #[derive(Deserialize)]
    struct OnDisk {
        version: u32,
        index: Index,
    }
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let on_disk: OnDisk =
        serde_json::from_slice(&bytes).map_err(|e| Error::IndexFormat(e.to_string()))?;
    if on_disk.version != 1 {
        return Err(Error::IndexFormat(format!(
            "unsupported index version {}",
            on_disk.version
        )));
    }
    Ok(on_disk.index)
}
