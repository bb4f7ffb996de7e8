//! User-based collaborative filtering over binary hashtag profiles.
//!
//! A profile is the set of distinct hashtags a user used strictly before
//! the reference timestamp; neighbors are ranked by cosine similarity of
//! these sets and their hashtags are scored by the summed similarity of the
//! neighbors that used them.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Corpus, HashtagId, UserId};

use super::{RankedList, RecommenderConfig};

/// Distinct hashtags with the latest usage timestamp, strictly before
/// `ts_ref`.
fn profile(user: UserId, ts_ref: i64, corpus: &Corpus) -> BTreeMap<HashtagId, i64> {
    let mut p = BTreeMap::new();
    for e in corpus.user_events(user) {
        if e.timestamp >= ts_ref {
            continue;
        }
        let v = p.entry(e.hashtag).or_insert(i64::MIN);
        *v = (*v).max(e.timestamp);
    }
    p
}

pub fn cf_user_based(
    user: UserId,
    ts_ref: i64,
    corpus: &Corpus,
    cfg: &RecommenderConfig,
) -> RankedList {
    let own = profile(user, ts_ref, corpus);
    if own.is_empty() {
        return RankedList::default();
    }

    // overlap counts with every user sharing at least one hashtag
    let mut overlap: HashMap<UserId, u32> = HashMap::new();
    for &h in own.keys() {
        let mut users: Vec<UserId> = corpus
            .hashtag_events(h)
            .take_while(|e| e.timestamp < ts_ref)
            .map(|e| e.user)
            .filter(|&v| v != user)
            .collect();
        users.sort_unstable();
        users.dedup();
        for v in users {
            *overlap.entry(v).or_insert(0) += 1;
        }
    }

    let mut similarities: Vec<(UserId, f64)> = overlap
        .into_iter()
        .map(|(v, shared)| {
            let size = corpus
                .user_events(v)
                .filter(|e| e.timestamp < ts_ref)
                .map(|e| e.hashtag)
                .collect::<std::collections::HashSet<_>>()
                .len();
            let sim = shared as f64 / ((own.len() as f64).sqrt() * (size as f64).sqrt());
            (v, sim)
        })
        .filter(|&(_, sim)| sim > 0.0)
        .collect();
    similarities.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("similarities are finite")
            .then(a.0.cmp(&b.0))
    });
    similarities.truncate(cfg.cf_neighbors);

    let mut scores: BTreeMap<HashtagId, (f64, i64)> = BTreeMap::new();
    for (v, sim) in similarities {
        for (h, last) in profile(v, ts_ref, corpus) {
            let e = scores.entry(h).or_insert((0.0, i64::MIN));
            e.0 += sim;
            e.1 = e.1.max(last);
        }
    }
    RankedList::from_candidates(scores.into_iter().map(|(h, (s, ts))| (h, s, ts)), cfg.k_max)
}
