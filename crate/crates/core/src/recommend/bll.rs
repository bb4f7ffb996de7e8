//! Base-level activation scoring.
//!
//! The activation of a hashtag for a user is `ln(sum over past uses of
//! age_hours^-d)`: frequent and recent usage both raise it, with a
//! power-law decay of exponent `d`. Individual activation counts the user's
//! own past uses, social activation counts all uses by her followees,
//! aggregated over the whole followee set. Activations are mapped onto
//! [0, 1] with a softmax over each component's own candidate set before
//! components are mixed.

use std::collections::BTreeMap;

use crate::content::{top_similar, Index};
use crate::corpus::{Corpus, HashtagId, UserId};

use super::{RankedList, RecommenderConfig};

/// Recencies under one hour count as one hour so the decayed weight never
/// exceeds 1 and the log stays finite.
const MIN_HOURS: f64 = 1.0;

fn age_hours(ts_ref: i64, ts: i64) -> f64 {
    ((ts_ref - ts) as f64 / 3600.0).max(MIN_HOURS)
}

/// Base-level activation of one hashtag; empty when no qualifying usage
/// exists, finite otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Activation(Option<f64>);

impl Activation {
    pub const EMPTY: Activation = Activation(None);

    pub fn value(self) -> Option<f64> {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0.is_none()
    }
}

fn decayed_log_sum(timestamps: impl Iterator<Item = i64>, ts_ref: i64, d: f64) -> Activation {
    let mut sum = 0.0;
    let mut any = false;
    for ts in timestamps {
        if ts >= ts_ref {
            continue; // simultaneous or later uses never count
        }
        sum += age_hours(ts_ref, ts).powf(-d);
        any = true;
    }
    if any {
        Activation(Some(sum.ln()))
    } else {
        Activation::EMPTY
    }
}

/// Individual base-level activation of `hashtag` for `user` at `ts_ref`.
pub fn bll_individual(
    user: UserId,
    hashtag: HashtagId,
    ts_ref: i64,
    corpus: &Corpus,
    cfg: &RecommenderConfig,
) -> Activation {
    decayed_log_sum(
        corpus
            .user_events(user)
            .filter(|e| e.hashtag == hashtag)
            .map(|e| e.timestamp),
        ts_ref,
        cfg.d_individual,
    )
}

/// Social base-level activation: all uses of `hashtag` by any followee of
/// `user`, aggregated over the followee set.
pub fn bll_social(
    user: UserId,
    hashtag: HashtagId,
    ts_ref: i64,
    corpus: &Corpus,
    cfg: &RecommenderConfig,
) -> Activation {
    let followees = corpus.followees(user);
    decayed_log_sum(
        followees
            .iter()
            .flat_map(|&f| corpus.user_events(f))
            .filter(|e| e.hashtag == hashtag)
            .map(|e| e.timestamp),
        ts_ref,
        cfg.d_social,
    )
}

/// Activation and most recent qualifying usage per candidate hashtag, built
/// in one pass over the relevant events.
fn activation_map(
    users: &[UserId],
    ts_ref: i64,
    corpus: &Corpus,
    d: f64,
) -> BTreeMap<HashtagId, (f64, i64)> {
    let mut sums: BTreeMap<HashtagId, (f64, i64)> = BTreeMap::new();
    for &u in users {
        for e in corpus.user_events(u) {
            if e.timestamp >= ts_ref {
                continue;
            }
            let w = age_hours(ts_ref, e.timestamp).powf(-d);
            let entry = sums.entry(e.hashtag).or_insert((0.0, i64::MIN));
            entry.0 += w;
            entry.1 = entry.1.max(e.timestamp);
        }
    }
    sums.into_iter()
        .map(|(h, (sum, last))| (h, (sum.ln(), last)))
        .collect()
}

/// Softmax normalization: `exp(activation) / sum of exp` over the map.
/// The maximum is subtracted before exponentiation, which leaves the
/// weights unchanged and keeps them finite. Empty in, empty out.
pub fn softmax_over(candidates: &BTreeMap<HashtagId, f64>) -> BTreeMap<HashtagId, f64> {
    let Some(max) = candidates
        .values()
        .copied()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    else {
        return BTreeMap::new();
    };
    let exps: BTreeMap<HashtagId, f64> = candidates
        .iter()
        .map(|(&h, &v)| (h, (v - max).exp()))
        .collect();
    let total: f64 = exps.values().sum();
    exps.into_iter().map(|(h, e)| (h, e / total)).collect()
}

fn softmax_with_ts(acts: &BTreeMap<HashtagId, (f64, i64)>) -> BTreeMap<HashtagId, (f64, i64)> {
    let plain: BTreeMap<HashtagId, f64> = acts.iter().map(|(&h, &(v, _))| (h, v)).collect();
    softmax_over(&plain)
        .into_iter()
        .map(|(h, w)| (h, (w, acts[&h].1)))
        .collect()
}

/// Ranking by individual activation alone.
pub fn bll_i(user: UserId, ts_ref: i64, corpus: &Corpus, cfg: &RecommenderConfig) -> RankedList {
    let acts = activation_map(&[user], ts_ref, corpus, cfg.d_individual);
    RankedList::from_candidates(
        softmax_with_ts(&acts)
            .into_iter()
            .map(|(h, (w, ts))| (h, w, ts)),
        cfg.k_max,
    )
}

/// Ranking by social activation alone.
pub fn bll_s(user: UserId, ts_ref: i64, corpus: &Corpus, cfg: &RecommenderConfig) -> RankedList {
    let acts = activation_map(corpus.followees(user), ts_ref, corpus, cfg.d_social);
    RankedList::from_candidates(
        softmax_with_ts(&acts)
            .into_iter()
            .map(|(h, (w, ts))| (h, w, ts)),
        cfg.k_max,
    )
}

/// Mixed usage-based score per candidate: `beta * softmax(individual) +
/// (1-beta) * softmax(social)`, each softmax over its own candidate set. A
/// hashtag outside a component's set contributes nothing for that
/// component. The timestamp kept per candidate is the most recent usage
/// among components that actually contributed, for tie-breaking.
fn bll_is_components(
    user: UserId,
    ts_ref: i64,
    corpus: &Corpus,
    cfg: &RecommenderConfig,
) -> BTreeMap<HashtagId, (f64, i64)> {
    let individual = softmax_with_ts(&activation_map(&[user], ts_ref, corpus, cfg.d_individual));
    let social = softmax_with_ts(&activation_map(
        corpus.followees(user),
        ts_ref,
        corpus,
        cfg.d_social,
    ));

    let mut combined: BTreeMap<HashtagId, (f64, i64)> = BTreeMap::new();
    if cfg.beta > 0.0 {
        for (h, (w, ts)) in individual {
            let e = combined.entry(h).or_insert((0.0, i64::MIN));
            e.0 += cfg.beta * w;
            e.1 = e.1.max(ts);
        }
    }
    if cfg.beta < 1.0 {
        for (h, (w, ts)) in social {
            let e = combined.entry(h).or_insert((0.0, i64::MIN));
            e.0 += (1.0 - cfg.beta) * w;
            e.1 = e.1.max(ts);
        }
    }
    combined
}

/// The hybrid usage-based recommender mixing individual and social
/// activation.
pub fn bll_is(user: UserId, ts_ref: i64, corpus: &Corpus, cfg: &RecommenderConfig) -> RankedList {
    RankedList::from_candidates(
        bll_is_components(user, ts_ref, corpus, cfg)
            .into_iter()
            .map(|(h, (w, ts))| (h, w, ts)),
        cfg.k_max,
    )
}

/// The content-aware hybrid: `lambda * mixed usage score + (1-lambda) *
/// softmax(content score)` over the union of the usage candidates and the
/// hashtags of tweets similar to `text`.
pub fn bll_isc(
    user: UserId,
    text: &str,
    ts_ref: i64,
    corpus: &Corpus,
    index: &Index,
    cfg: &RecommenderConfig,
) -> RankedList {
    let mut combined: BTreeMap<HashtagId, (f64, i64)> = BTreeMap::new();
    if cfg.lambda > 0.0 {
        for (h, (w, ts)) in bll_is_components(user, ts_ref, corpus, cfg) {
            if w > 0.0 {
                combined.insert(h, (cfg.lambda * w, ts));
            }
        }
    }
    if cfg.lambda < 1.0 {
        let result = top_similar(text, index, cfg.s_max);
        let cb: BTreeMap<HashtagId, f64> = result
            .cb_scores
            .iter()
            .map(|(&h, &(score, _))| (h, score))
            .collect();
        for (h, w) in softmax_over(&cb) {
            let ts = result.cb_scores[&h].1;
            let e = combined.entry(h).or_insert((0.0, i64::MIN));
            e.0 += (1.0 - cfg.lambda) * w;
            e.1 = e.1.max(ts);
        }
    }
    RankedList::from_candidates(
        combined.into_iter().map(|(h, (w, ts))| (h, w, ts)),
        cfg.k_max,
    )
}
