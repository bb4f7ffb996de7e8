//! Reuse-recency analysis: how long after the previous (own or followee)
//! use of a hashtag the next use happens, and whether that decay follows a
//! power law or an exponential.

mod fit;

pub use fit::{
    fit_linear_r2, fit_power_law, fit_power_law_at, fit_report, loglik_ratio_power_vs_exp,
    FitReport, FitScale, PowerLawFit, VuongReport,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, HashtagId, UserId};

pub const SECS_PER_HOUR: f64 = 3600.0;
/// One year, the default recency cap.
pub const DEFAULT_CAP_HOURS: f64 = 8760.0;

/// Which reuse relation a series measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Individual,
    Social,
}

/// Recency samples in hours, one per qualifying hashtag assignment.
/// Assignments without a qualifying strictly-earlier prior contribute no
/// sample; samples beyond `cap_hours` are discarded.
#[derive(Clone, Debug)]
pub struct RecencySeries {
    pub kind: SeriesKind,
    pub samples: Vec<f64>,
    pub cap_hours: f64,
}

impl RecencySeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Pools samples into whole-hour bins (`ceil`, so every bin is >= 1).
    /// Bins with zero count are omitted; counts sum to the sample count.
    pub fn binned(&self) -> BinnedCounts {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for &s in &self.samples {
            let bin = (s.ceil() as u64).max(1);
            *counts.entry(bin).or_insert(0) += 1;
        }
        let mut pairs: Vec<(u64, u64)> = counts.into_iter().collect();
        pairs.sort_unstable();
        BinnedCounts { pairs }
    }
}

/// (hour bin, count) pairs in ascending bin order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinnedCounts {
    pub pairs: Vec<(u64, u64)>,
}

impl BinnedCounts {
    pub fn total(&self) -> u64 {
        self.pairs.iter().map(|&(_, c)| c).sum()
    }
}

/// Recency of each assignment relative to the latest strictly-earlier use
/// of the same hashtag by the same user.
pub fn individual_recency_series(corpus: &Corpus) -> RecencySeries {
    recency_series(corpus, SeriesKind::Individual, DEFAULT_CAP_HOURS)
}

/// Recency of each assignment relative to the most recent strictly-earlier
/// use of the same hashtag by any followee of the assigning user.
pub fn social_recency_series(corpus: &Corpus) -> RecencySeries {
    recency_series(corpus, SeriesKind::Social, DEFAULT_CAP_HOURS)
}

pub fn recency_series(corpus: &Corpus, kind: SeriesKind, cap_hours: f64) -> RecencySeries {
    let mut samples = Vec::new();
    // (user, hashtag) -> latest timestamp seen so far
    let mut last_use: HashMap<(UserId, HashtagId), i64> = HashMap::new();
    let events = corpus.events();

    // batch events sharing a timestamp so simultaneous uses never count as
    // priors for each other
    let mut start = 0;
    while start < events.len() {
        let ts = events[start].timestamp;
        let mut end = start;
        while end < events.len() && events[end].timestamp == ts {
            end += 1;
        }
        for e in &events[start..end] {
            let prior = match kind {
                SeriesKind::Individual => last_use.get(&(e.user, e.hashtag)).copied(),
                SeriesKind::Social => corpus
                    .followees(e.user)
                    .iter()
                    .filter_map(|&f| last_use.get(&(f, e.hashtag)).copied())
                    .max(),
            };
            if let Some(prior_ts) = prior {
                let hours = (e.timestamp - prior_ts) as f64 / SECS_PER_HOUR;
                if hours > 0.0 && hours <= cap_hours {
                    samples.push(hours);
                }
            }
        }
        for e in &events[start..end] {
            let slot = last_use.entry((e.user, e.hashtag)).or_insert(i64::MIN);
            *slot = (*slot).max(e.timestamp);
        }
        start = end;
    }
    RecencySeries {
        kind,
        samples,
        cap_hours,
    }
}
