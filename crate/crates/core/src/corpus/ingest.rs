//! File ingestion for the canonical three-file corpus layout.
//!
//! `follows.tsv`: `user<TAB>followee` per line. `tweets.tsv`:
//! `tweet<TAB>user<TAB>unix_ts<TAB>is_retweet(0|1)<TAB>text`; a four-column
//! variant without the retweet flag is accepted, in which case a text
//! starting with `RT @` marks a retweet. `seeds.txt`: one user per line.
//! All files are UTF-8 with LF line endings; blank lines are skipped.

use std::collections::HashSet;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};

use super::{Corpus, CorpusBuilder};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        reason: reason.into(),
    }
}

/// Reads `follows.tsv`, `tweets.tsv` and `seeds.txt` from `dir` and builds a
/// corpus.
pub fn ingest_dir(dir: &Path) -> Result<Corpus> {
    ingest_files(
        &dir.join("follows.tsv"),
        &dir.join("tweets.tsv"),
        &dir.join("seeds.txt"),
    )
}

/// Builds a corpus from the three input files. Hashtag-free tweets are
/// dropped; followees that never tweet stay in the user set as isolated
/// users (a warning is logged per file).
pub fn ingest_files(follows_path: &Path, tweets_path: &Path, seeds_path: &Path) -> Result<Corpus> {
    let mut b = CorpusBuilder::default();

    let mut tweet_authors = HashSet::new();
    for (no, line) in read(tweets_path)?.lines().enumerate() {
        let no = no + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(5, '\t').collect();
        if fields.len() < 4 {
            return Err(parse_err(
                tweets_path,
                no,
                format!("expected 4 or 5 tab-separated fields, got {}", fields.len()),
            ));
        }
        let (tweet_name, user_name, ts_str) = (fields[0], fields[1], fields[2]);
        let timestamp: i64 = ts_str
            .parse()
            .map_err(|_| parse_err(tweets_path, no, format!("bad timestamp {ts_str:?}")))?;
        if timestamp <= 0 {
            return Err(parse_err(
                tweets_path,
                no,
                format!("timestamp must be positive, got {timestamp}"),
            ));
        }
        let (is_retweet, text) = if fields.len() == 5 {
            let flag = match fields[3] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(parse_err(
                        tweets_path,
                        no,
                        format!("retweet flag must be 0 or 1, got {other:?}"),
                    ))
                }
            };
            (flag, fields[4])
        } else {
            (fields[3].starts_with("RT @"), fields[3])
        };
        let author = b.user(user_name);
        tweet_authors.insert(author);
        b.add_tweet(tweet_name, author, timestamp, is_retweet, text.to_owned());
    }

    let mut dangling = 0usize;
    for (no, line) in read(follows_path)?.lines().enumerate() {
        let no = no + 1;
        if line.is_empty() {
            continue;
        }
        let Some((user, followee)) = line.split_once('\t') else {
            return Err(parse_err(follows_path, no, "expected user<TAB>followee"));
        };
        if user.is_empty() || followee.is_empty() {
            return Err(parse_err(follows_path, no, "empty user id"));
        }
        let u = b.user(user);
        let f = b.user(followee);
        if !tweet_authors.contains(&f) {
            dangling += 1;
        }
        b.add_follow(u, f);
    }
    if dangling > 0 {
        warn!("{follows_path:?}: {dangling} followee reference(s) without tweets; kept as isolated users");
    }

    for (no, line) in read(seeds_path)?.lines().enumerate() {
        let no = no + 1;
        let name = line.trim();
        if name.is_empty() {
            continue;
        }
        if name.contains('\t') {
            return Err(parse_err(seeds_path, no, "seed line must be a single id"));
        }
        let u = b.user(name);
        b.mark_seed(u);
    }

    Ok(b.build())
}
