//! Corpus data model: users, the followee graph, tweets and hashtag
//! assignments.
//!
//! A [`Corpus`] is an immutable snapshot. Identifiers are interned into
//! dense integer ids so the rest of the crate can index into plain vectors;
//! the interning is bijective with the source strings.

mod classify;
mod ingest;
mod split;
mod synthetic;

pub use classify::{classify_all, classify_usage_type, UsageTypeCounts};
pub use ingest::{ingest_dir, ingest_files};
pub use split::{leave_one_out_split, Scenario, Split, TestEntry};
pub use synthetic::{generate_synthetic, MixWeights, SyntheticParams};

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Dense id of a user within one corpus.
    UserId
);
id_type!(
    /// Dense id of a distinct hashtag within one corpus.
    HashtagId
);
id_type!(
    /// Dense id of a tweet within one corpus.
    TweetId
);

/// Bijective string <-> dense id mapping.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    names: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.lookup.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// One tweet. `hashtags` is derived from `text` by [`extract_hashtags`];
/// tweets whose text yields no hashtags are dropped at ingestion.
#[derive(Clone, Debug)]
pub struct Tweet {
    pub id: TweetId,
    pub author: UserId,
    /// Seconds since the epoch; always positive.
    pub timestamp: i64,
    pub text: String,
    pub hashtags: Vec<HashtagId>,
    pub is_retweet: bool,
}

/// One hashtag assignment: a single occurrence of one hashtag in one tweet.
/// The total event count of a corpus is the number of hashtag assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UsageEvent {
    pub user: UserId,
    pub hashtag: HashtagId,
    pub tweet: TweetId,
    /// Seconds since the epoch.
    pub timestamp: i64,
}

/// How a hashtag assignment relates to earlier use of the same hashtag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsageType {
    /// Used strictly earlier by the same user only.
    Individual,
    /// Used strictly earlier by a followee only.
    Social,
    /// Used strictly earlier by both the user and a followee.
    IndividualSocial,
    /// Used strictly earlier, but only by users outside the user and her
    /// followees.
    Network,
    /// Never used before anywhere in the corpus.
    External,
}

impl UsageType {
    pub const ALL: [UsageType; 5] = [
        UsageType::Individual,
        UsageType::Social,
        UsageType::IndividualSocial,
        UsageType::Network,
        UsageType::External,
    ];
}

/// Headline corpus statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub seed_users: usize,
    pub followee_edges: usize,
    pub users: usize,
    pub tweets: usize,
    pub hashtags: usize,
    pub assignments: usize,
}

/// Immutable training snapshot: users, the followee adjacency, tweets sorted
/// by timestamp and the materialized hashtag assignments.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub(crate) user_names: Interner,
    pub(crate) hashtag_names: Interner,
    pub(crate) tweet_names: Interner,
    /// Seed user flags, indexed by user id.
    pub(crate) seed: Vec<bool>,
    /// Followee adjacency, indexed by user id; sorted, deduplicated, never
    /// contains the user herself.
    pub(crate) followees: Vec<Vec<UserId>>,
    /// Sorted by (timestamp, id).
    pub(crate) tweets: Vec<Tweet>,
    /// Sorted by (timestamp, tweet, hashtag).
    pub(crate) events: Vec<UsageEvent>,
    /// Event indices per user, in event order.
    pub(crate) events_by_user: Vec<Vec<u32>>,
    /// Event indices per hashtag, in event order.
    pub(crate) events_by_hashtag: Vec<Vec<u32>>,
    /// Tweet slot per user, in tweet order.
    pub(crate) tweets_by_user: Vec<Vec<u32>>,
    /// Position of each tweet id in `tweets`.
    pub(crate) tweet_pos: Vec<u32>,
}

impl Corpus {
    pub fn num_users(&self) -> usize {
        self.user_names.len()
    }

    pub fn num_hashtags(&self) -> usize {
        self.hashtag_names.len()
    }

    pub fn user_name(&self, u: UserId) -> &str {
        self.user_names.name(u.0)
    }

    pub fn hashtag_name(&self, h: HashtagId) -> &str {
        self.hashtag_names.name(h.0)
    }

    pub fn tweet_name(&self, t: TweetId) -> &str {
        self.tweet_names.name(t.0)
    }

    pub fn user_id(&self, name: &str) -> Option<UserId> {
        self.user_names.get(name).map(UserId)
    }

    pub fn hashtag_id(&self, name: &str) -> Option<HashtagId> {
        self.hashtag_names.get(name).map(HashtagId)
    }

    pub fn is_seed(&self, u: UserId) -> bool {
        self.seed[u.index()]
    }

    /// Seed users in ascending id order.
    pub fn seed_users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.seed
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| UserId(i as u32))
    }

    pub fn followees(&self, u: UserId) -> &[UserId] {
        &self.followees[u.index()]
    }

    pub fn follows(&self, u: UserId, v: UserId) -> bool {
        self.followees[u.index()].binary_search(&v).is_ok()
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn tweet(&self, id: TweetId) -> &Tweet {
        &self.tweets[self.tweet_pos[id.index()] as usize]
    }

    pub fn events(&self) -> &[UsageEvent] {
        &self.events
    }

    pub fn user_events(&self, u: UserId) -> impl Iterator<Item = &UsageEvent> {
        self.events_by_user[u.index()]
            .iter()
            .map(|&i| &self.events[i as usize])
    }

    pub fn hashtag_events(&self, h: HashtagId) -> impl Iterator<Item = &UsageEvent> {
        self.events_by_hashtag[h.index()]
            .iter()
            .map(|&i| &self.events[i as usize])
    }

    pub fn user_tweets(&self, u: UserId) -> impl Iterator<Item = &Tweet> {
        self.tweets_by_user[u.index()]
            .iter()
            .map(|&i| &self.tweets[i as usize])
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            seed_users: self.seed.iter().filter(|&&s| s).count(),
            followee_edges: self.followees.iter().map(|f| f.len()).sum(),
            users: self.num_users(),
            tweets: self.tweets.len(),
            hashtags: self.hashtag_names.len(),
            assignments: self.events.len(),
        }
    }

    /// Writes the corpus back out in the canonical three-file layout
    /// (`follows.tsv`, `tweets.tsv`, `seeds.txt`). Rows are ordered by the
    /// source strings, so re-ingesting the emitted files reproduces them
    /// byte for byte.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let io_err = |path: &Path| {
            let path = path.to_owned();
            move |source| Error::Io { path, source }
        };

        let follows_path = dir.join("follows.tsv");
        let mut rows: Vec<(&str, &str)> = Vec::new();
        for (u, fs) in self.followees.iter().enumerate() {
            let uname = self.user_names.name(u as u32);
            for &f in fs {
                rows.push((uname, self.user_name(f)));
            }
        }
        rows.sort_unstable();
        let mut out = Vec::new();
        for (u, f) in rows {
            writeln!(out, "{u}\t{f}").expect("write to vec");
        }
        std::fs::write(&follows_path, out).map_err(io_err(&follows_path))?;

        let tweets_path = dir.join("tweets.tsv");
        let mut order: Vec<&Tweet> = self.tweets.iter().collect();
        order.sort_by(|a, b| self.tweet_name(a.id).cmp(self.tweet_name(b.id)));
        let mut out = Vec::new();
        for t in order {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                self.tweet_name(t.id),
                self.user_name(t.author),
                t.timestamp,
                u8::from(t.is_retweet),
                t.text
            )
            .expect("write to vec");
        }
        std::fs::write(&tweets_path, out).map_err(io_err(&tweets_path))?;

        let seeds_path = dir.join("seeds.txt");
        let mut seeds: Vec<&str> = self.seed_users().map(|u| self.user_name(u)).collect();
        seeds.sort_unstable();
        let mut out = Vec::new();
        for s in seeds {
            writeln!(out, "{s}").expect("write to vec");
        }
        std::fs::write(&seeds_path, out).map_err(io_err(&seeds_path))?;
        Ok(())
    }
}

/// Extracts normalized hashtags from tweet text: whitespace-separated words
/// starting with `#`, lowercased, `#` stripped, truncated at the first
/// character outside `[a-z0-9_]`. Duplicates within one text count once;
/// order of first occurrence is kept.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut seen = Vec::new();
    for word in text.split_whitespace() {
        let Some(rest) = word.strip_prefix('#') else {
            continue;
        };
        let lowered = rest.to_lowercase();
        let tag: String = lowered
            .chars()
            .take_while(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_')
            .collect();
        if !tag.is_empty() && !seen.contains(&tag) {
            seen.push(tag);
        }
    }
    seen
}

/// Mutable accumulator for assembling a corpus in memory; ingestion and
/// the synthetic generator are built on it.
#[derive(Default)]
pub struct CorpusBuilder {
    user_names: Interner,
    hashtag_names: Interner,
    tweet_names: Interner,
    seed: Vec<bool>,
    followees: Vec<Vec<UserId>>,
    tweets: Vec<Tweet>,
}

impl CorpusBuilder {
    pub fn user(&mut self, name: &str) -> UserId {
        let id = self.user_names.intern(name);
        if id as usize >= self.seed.len() {
            self.seed.push(false);
            self.followees.push(Vec::new());
        }
        UserId(id)
    }

    pub fn mark_seed(&mut self, u: UserId) {
        self.seed[u.index()] = true;
    }

    pub fn add_follow(&mut self, u: UserId, f: UserId) {
        if u != f {
            self.followees[u.index()].push(f);
        }
    }

    /// Adds a tweet; returns `None` when the text contains no hashtags
    /// (such tweets are not part of a corpus). Timestamps must be positive.
    pub fn add_tweet(
        &mut self,
        name: &str,
        author: UserId,
        timestamp: i64,
        is_retweet: bool,
        text: String,
    ) -> Option<TweetId> {
        debug_assert!(timestamp > 0, "tweet timestamps must be positive");
        let tags = extract_hashtags(&text);
        if tags.is_empty() {
            return None;
        }
        let id = TweetId(self.tweet_names.intern(name));
        let hashtags = tags
            .iter()
            .map(|t| HashtagId(self.hashtag_names.intern(t)))
            .collect();
        self.tweets.push(Tweet {
            id,
            author,
            timestamp,
            text,
            hashtags,
            is_retweet,
        });
        Some(id)
    }

    pub fn build(mut self) -> Corpus {
        for f in &mut self.followees {
            f.sort_unstable();
            f.dedup();
        }
        self.tweets.sort_by_key(|t| (t.timestamp, t.id));
        finish(
            self.user_names,
            self.hashtag_names,
            self.tweet_names,
            self.seed,
            self.followees,
            self.tweets,
        )
    }
}

/// Builds the event list and per-user/per-hashtag indices over sorted tweets.
pub(crate) fn finish(
    user_names: Interner,
    hashtag_names: Interner,
    tweet_names: Interner,
    seed: Vec<bool>,
    followees: Vec<Vec<UserId>>,
    tweets: Vec<Tweet>,
) -> Corpus {
    let mut events = Vec::new();
    for t in &tweets {
        for &h in &t.hashtags {
            events.push(UsageEvent {
                user: t.author,
                hashtag: h,
                tweet: t.id,
                timestamp: t.timestamp,
            });
        }
    }
    events.sort_by_key(|e| (e.timestamp, e.tweet, e.hashtag));

    let mut events_by_user = vec![Vec::new(); user_names.len()];
    let mut events_by_hashtag = vec![Vec::new(); hashtag_names.len()];
    for (i, e) in events.iter().enumerate() {
        events_by_user[e.user.index()].push(i as u32);
        events_by_hashtag[e.hashtag.index()].push(i as u32);
    }
    let mut tweets_by_user = vec![Vec::new(); user_names.len()];
    let mut tweet_pos = vec![0u32; tweet_names.len()];
    for (i, t) in tweets.iter().enumerate() {
        tweets_by_user[t.author.index()].push(i as u32);
        tweet_pos[t.id.index()] = i as u32;
    }

    Corpus {
        user_names,
        hashtag_names,
        tweet_names,
        seed,
        followees,
        tweets,
        events,
        events_by_user,
        events_by_hashtag,
        tweets_by_user,
        tweet_pos,
    }
}
