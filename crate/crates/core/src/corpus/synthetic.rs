//! Seeded synthetic corpus generator with controllable temporal-decay reuse.
//!
//! The generator simulates a stream of tweets. At every step one user acts
//! and either reuses one of her own past hashtags, reuses a hashtag a
//! followee used before, or introduces a fresh hashtag, according to the
//! mixing weights. Reuse picks a past usage event with probability
//! proportional to `age_hours^-decay`, so both the recency and the
//! frequency of past usage drive reuse, and the aggregated reuse-recency
//! distribution decays as a power law with exponent close to `decay`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Corpus, CorpusBuilder};

/// Probabilities of the three actions at each simulated step.
#[derive(Clone, Copy, Debug)]
pub struct MixWeights {
    pub individual: f64,
    pub social: f64,
    pub external: f64,
}

impl MixWeights {
    pub fn new(individual: f64, social: f64, external: f64) -> Self {
        Self {
            individual,
            social,
            external,
        }
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.individual, self.social, self.external];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "mixing weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights { sum });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticParams {
    /// Number of users; every user is a seed user.
    pub users: usize,
    /// Out-degree of the followee graph (uniform random, no self-loops).
    pub followee_degree: usize,
    /// Size of the fresh-hashtag pool. Once exhausted, "external" draws
    /// fall back to a uniform pick from the pool.
    pub vocabulary: usize,
    /// Number of tweets to simulate (one hashtag per tweet).
    pub events: usize,
    /// Power-law decay exponent of the reuse kernel.
    pub decay: f64,
    pub weights: MixWeights,
    /// Mean of the exponential inter-event gap between sessions, in
    /// seconds.
    pub mean_gap_secs: f64,
    /// Probability that the next event continues the same user's session.
    pub session_continue: f64,
    /// Mean inter-event gap within a session, in seconds.
    pub session_gap_secs: f64,
    pub seed: u64,
    /// Generate tweet text from per-hashtag term pools (for content-based
    /// recommenders). Without it the text is just the hashtag itself.
    pub with_text: bool,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            users: 100,
            followee_degree: 10,
            vocabulary: 5_000,
            events: 20_000,
            decay: 1.7,
            weights: MixWeights::new(0.5, 0.3, 0.2),
            mean_gap_secs: 60.0,
            session_continue: 0.0,
            session_gap_secs: 90.0,
            seed: 7,
            with_text: false,
        }
    }
}

impl SyntheticParams {
    fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if self.users == 0 {
            return Err(Error::InvalidConfig("users must be >= 1".into()));
        }
        if self.followee_degree >= self.users {
            return Err(Error::InvalidConfig(
                "followee_degree must be smaller than users".into(),
            ));
        }
        if self.vocabulary == 0 {
            return Err(Error::InvalidConfig("vocabulary must be >= 1".into()));
        }
        if self.decay.is_nan() || self.decay <= 0.0 {
            return Err(Error::InvalidConfig("decay must be positive".into()));
        }
        let gap_ok = |g: f64| g.is_finite() && g > 0.0;
        if !gap_ok(self.mean_gap_secs) || !gap_ok(self.session_gap_secs) {
            return Err(Error::InvalidConfig("gap means must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.session_continue) {
            return Err(Error::InvalidConfig(
                "session_continue must be in [0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Only the most recent usages per user feed the reuse kernel; older ones
/// carry negligible weight under the power-law decay.
const HISTORY_WINDOW: usize = 1024;

/// Ring of past (timestamp, vocab index) pairs, oldest first.
struct UsageRing {
    buf: Vec<(i64, u32)>,
    head: usize,
}

impl UsageRing {
    fn new() -> Self {
        Self {
            buf: Vec::new(),
            head: 0,
        }
    }

    fn push(&mut self, ts: i64, tag: u32) {
        if self.buf.len() < HISTORY_WINDOW {
            self.buf.push((ts, tag));
        } else {
            self.buf[self.head] = (ts, tag);
            self.head = (self.head + 1) % HISTORY_WINDOW;
        }
    }

    fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.buf.iter().copied()
    }
}

/// Precomputed `h^-decay` per whole hour of age.
struct DecayTable {
    weights: Vec<f64>,
    decay: f64,
}

impl DecayTable {
    fn new(decay: f64) -> Self {
        Self {
            weights: vec![0.0, 1.0],
            decay,
        }
    }

    /// Weight for an event `age_secs` old; ages under one hour count as one
    /// hour, matching the hour floor used by the recommenders.
    fn weight(&mut self, age_secs: i64) -> f64 {
        let hours = ((age_secs.max(1) + 3599) / 3600) as usize;
        while self.weights.len() <= hours {
            let h = self.weights.len() as f64;
            self.weights.push(h.powf(-self.decay));
        }
        self.weights[hours]
    }
}

/// Picks a ring entry with probability proportional to its decayed age
/// weight; returns the vocab index, or `None` for an empty ring.
fn sample_decayed(
    ring: &UsageRing,
    now: i64,
    table: &mut DecayTable,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    if ring.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for (ts, _) in ring.iter() {
        total += table.weight(now - ts);
    }
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (ts, tag) in ring.iter() {
        acc += table.weight(now - ts);
        if acc >= target {
            chosen = Some(tag);
            break;
        }
    }
    // float round-off can leave acc fractionally short on the last entry
    chosen.or_else(|| ring.iter().last().map(|(_, t)| t))
}

fn tweet_text(tag: u32, with_text: bool, rng: &mut ChaCha8Rng) -> String {
    let name = format!("ht{tag:06}");
    if !with_text {
        return format!("#{name}");
    }
    // four signature terms per hashtag, six draws, plus two noise terms
    const SIGNATURE: [char; 4] = ['a', 'b', 'c', 'd'];
    let mut text = format!("#{name}");
    for _ in 0..6 {
        let s = SIGNATURE[rng.gen_range(0..SIGNATURE.len())];
        text.push_str(&format!(" w{tag:06}{s}"));
    }
    for _ in 0..2 {
        let n: u32 = rng.gen_range(0..50);
        text.push_str(&format!(" n{n:02}"));
    }
    text
}

/// Generates a corpus from the simulation described in the module docs.
/// Deterministic for a fixed parameter set: equal params produce
/// byte-identical corpora.
pub fn generate_synthetic(params: &SyntheticParams) -> Result<Corpus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.users;

    let mut builder = CorpusBuilder::default();
    let users: Vec<_> = (0..n)
        .map(|i| {
            let u = builder.user(&format!("u{i:06}"));
            builder.mark_seed(u);
            u
        })
        .collect();

    // uniform followee graph plus reverse adjacency for exposure updates
    let mut followers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut picked = Vec::with_capacity(params.followee_degree);
        while picked.len() < params.followee_degree {
            let j = rng.gen_range(0..n);
            if j != i && !picked.contains(&j) {
                picked.push(j);
            }
        }
        for j in picked {
            builder.add_follow(users[i], users[j]);
            followers[j].push(i);
        }
    }

    let mut own: Vec<UsageRing> = (0..n).map(|_| UsageRing::new()).collect();
    let mut exposure: Vec<UsageRing> = (0..n).map(|_| UsageRing::new()).collect();
    let mut table = DecayTable::new(params.decay);
    let mut next_fresh: u32 = 0;
    let mut now: i64 = 1_000_000_000;

    let mut actor = 0usize;
    for step in 0..params.events {
        // bursty clock: a session keeps the actor and ticks in short gaps,
        // session boundaries pick a fresh actor after a longer gap
        let continued = step > 0 && rng.gen::<f64>() < params.session_continue;
        let mean_gap = if continued {
            params.session_gap_secs
        } else {
            params.mean_gap_secs
        };
        let gap = -mean_gap * (1.0 - rng.gen::<f64>()).ln();
        now += (gap.ceil() as i64).max(1);
        if !continued {
            actor = rng.gen_range(0..n);
        }

        let roll: f64 = rng.gen();
        let tag = if roll < params.weights.individual {
            sample_decayed(&own[actor], now, &mut table, &mut rng)
        } else if roll < params.weights.individual + params.weights.social {
            sample_decayed(&exposure[actor], now, &mut table, &mut rng)
        } else {
            None
        };
        let tag = tag.unwrap_or_else(|| {
            if next_fresh < params.vocabulary as u32 {
                next_fresh += 1;
                next_fresh - 1
            } else {
                rng.gen_range(0..params.vocabulary as u32)
            }
        });

        let text = tweet_text(tag, params.with_text, &mut rng);
        builder.add_tweet(&format!("t{step:08}"), users[actor], now, false, text);

        own[actor].push(now, tag);
        for &f in &followers[actor] {
            exposure[f].push(now, tag);
        }
    }

    Ok(builder.build())
}
