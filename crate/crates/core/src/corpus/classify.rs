//! Classification of hashtag assignments by where the hashtag was seen
//! before: by the same user, by a followee, by both, by somebody else in the
//! corpus, or never. Only strictly earlier events count, so the hashtags of
//! a tweet never qualify as priors for themselves or for other tweets
//! posted at the same instant.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Corpus, UsageEvent, UsageType, UserId};

/// Classifies one assignment by scanning all earlier uses of its hashtag.
pub fn classify_usage_type(event: &UsageEvent, corpus: &Corpus) -> UsageType {
    let followees = corpus.followees(event.user);
    let mut individual = false;
    let mut social = false;
    let mut network = false;
    for prior in corpus.hashtag_events(event.hashtag) {
        if prior.timestamp >= event.timestamp {
            break; // per-hashtag event lists are timestamp-sorted
        }
        if prior.user == event.user {
            individual = true;
        } else if followees.binary_search(&prior.user).is_ok() {
            social = true;
        } else {
            network = true;
        }
        if individual && social {
            break;
        }
    }
    label(individual, social, network)
}

fn label(individual: bool, social: bool, network: bool) -> UsageType {
    match (individual, social) {
        (true, true) => UsageType::IndividualSocial,
        (true, false) => UsageType::Individual,
        (false, true) => UsageType::Social,
        (false, false) if network => UsageType::Network,
        _ => UsageType::External,
    }
}

/// Per-type assignment counts; sums to the total number of assignments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageTypeCounts {
    pub individual: usize,
    pub social: usize,
    pub individual_social: usize,
    pub network: usize,
    pub external: usize,
}

impl UsageTypeCounts {
    pub fn total(&self) -> usize {
        self.individual + self.social + self.individual_social + self.network + self.external
    }

    fn bump(&mut self, t: UsageType) {
        match t {
            UsageType::Individual => self.individual += 1,
            UsageType::Social => self.social += 1,
            UsageType::IndividualSocial => self.individual_social += 1,
            UsageType::Network => self.network += 1,
            UsageType::External => self.external += 1,
        }
    }
}

/// Classifies every assignment in one sweep. Returns the label per event (in
/// corpus event order) together with the counts.
///
/// Equivalent to calling [`classify_usage_type`] per event but linear-ish:
/// per hashtag it maintains the multiset of users seen so far and batches
/// events sharing a timestamp so ties never see each other.
pub fn classify_all(corpus: &Corpus) -> (Vec<UsageType>, UsageTypeCounts) {
    let mut labels = vec![UsageType::External; corpus.events().len()];
    let mut counts = UsageTypeCounts::default();

    // user -> number of this hashtag's prior events by that user
    let mut seen: Vec<HashMap<UserId, u32>> = vec![HashMap::new(); corpus.events_by_hashtag.len()];

    let events = corpus.events();
    let mut start = 0;
    while start < events.len() {
        let ts = events[start].timestamp;
        let mut end = start;
        while end < events.len() && events[end].timestamp == ts {
            end += 1;
        }
        for (i, e) in events[start..end].iter().enumerate() {
            let prior = &seen[e.hashtag.index()];
            if !prior.is_empty() {
                let individual = prior.contains_key(&e.user);
                let followees = corpus.followees(e.user);
                let mut covered = u32::from(individual) as usize;
                let mut social = false;
                if followees.len() <= prior.len() {
                    for f in followees {
                        if prior.contains_key(f) {
                            social = true;
                            covered += 1;
                        }
                    }
                } else {
                    for u in prior.keys() {
                        if followees.binary_search(u).is_ok() {
                            social = true;
                            covered += 1;
                        }
                    }
                }
                let network = prior.len() > covered;
                labels[start + i] = label(individual, social, network);
            }
            counts.bump(labels[start + i]);
        }
        for e in &events[start..end] {
            *seen[e.hashtag.index()].entry(e.user).or_insert(0) += 1;
        }
        start = end;
    }
    (labels, counts)
}
