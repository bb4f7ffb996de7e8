//! Leave-one-out protocol: each seed user's most recent tweet is held out
//! for testing, everything else stays in the training snapshot.

use log::warn;

use super::{finish, Corpus, Tweet, TweetId, UserId};

/// Evaluation scenario. Scenario 2 also uses the text of the held-out tweet
/// and therefore excludes retweets from the test set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    One,
    Two,
}

impl Scenario {
    pub fn number(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
        }
    }
}

/// One held-out tweet of one seed user.
#[derive(Clone, Debug)]
pub struct TestEntry {
    pub user: UserId,
    pub tweet: Tweet,
}

/// Training snapshot plus the held-out test entries, ordered by user id.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: Corpus,
    pub test: Vec<TestEntry>,
}

/// Splits a corpus per the leave-one-out protocol.
///
/// A seed user qualifies when she has at least two tweets and her most
/// recent tweet is strictly newer than the rest (a timestamp tie would make
/// "most recent" ambiguous; such users are skipped with a warning). The
/// held-out tweets of all qualifying users are removed from the training
/// corpus. Under [`Scenario::Two`] held-out retweets are dropped from the
/// test list without substitution; the training corpus is unaffected.
pub fn leave_one_out_split(corpus: &Corpus, scenario: Scenario) -> Split {
    let mut held_out: Vec<TweetId> = Vec::new();
    let mut test = Vec::new();
    let mut ambiguous = 0usize;

    for user in corpus.seed_users() {
        let tweets: Vec<&Tweet> = corpus.user_tweets(user).collect();
        if tweets.len() < 2 {
            continue;
        }
        // user_tweets is timestamp-sorted; the last one is the candidate
        let latest = tweets[tweets.len() - 1];
        if tweets[tweets.len() - 2].timestamp == latest.timestamp {
            ambiguous += 1;
            continue;
        }
        held_out.push(latest.id);
        if scenario == Scenario::Two && latest.is_retweet {
            continue;
        }
        test.push(TestEntry {
            user,
            tweet: latest.clone(),
        });
    }
    if ambiguous > 0 {
        warn!("{ambiguous} seed user(s) skipped: most recent tweet timestamp is tied");
    }
    test.sort_by_key(|e| e.user);
    held_out.sort_unstable();

    let train_tweets: Vec<Tweet> = corpus
        .tweets
        .iter()
        .filter(|t| held_out.binary_search(&t.id).is_err())
        .cloned()
        .collect();
    let train = finish(
        corpus.user_names.clone(),
        corpus.hashtag_names.clone(),
        corpus.tweet_names.clone(),
        corpus.seed.clone(),
        corpus.followees.clone(),
        train_tweets,
    );
    Split { train, test }
}
