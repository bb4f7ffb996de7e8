//! Differential weight spreading over the user-tweet-hashtag graph.
//!
//! Each pre-reference assignment contributes undirected co-occurrence edges
//! user-tweet, tweet-hashtag and user-hashtag, weighted by how often the
//! pair co-occurs. Weights spread by `w <- d*p + (1-d)*M*w` with `M` the
//! row-normalized adjacency, once with a preference vector concentrated on
//! the target user and once with a uniform one; a hashtag's score is the
//! difference of the two stationary-ish weights.

use std::collections::HashMap;

use crate::corpus::{Corpus, HashtagId, TweetId, UserId};

use super::{RankedList, RecommenderConfig};

/// A node of the tripartite co-occurrence graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FolkNode {
    User(UserId),
    Tweet(TweetId),
    Hashtag(HashtagId),
}

/// Undirected weighted co-occurrence graph over the events strictly before
/// a reference timestamp.
pub struct FolkGraph {
    nodes: Vec<FolkNode>,
    adjacency: Vec<Vec<(u32, f64)>>,
    /// Weighted degree per node.
    degree: Vec<f64>,
    user_nodes: HashMap<UserId, u32>,
    /// Latest pre-reference usage per hashtag, for tie-breaking.
    hashtag_last_ts: HashMap<HashtagId, i64>,
}

impl FolkGraph {
    /// Builds the graph from all events with `timestamp < ts_ref`. Only
    /// entities appearing in such events become nodes.
    pub fn build(corpus: &Corpus, ts_ref: i64) -> FolkGraph {
        let events = corpus.events();
        let end = events.partition_point(|e| e.timestamp < ts_ref);
        let window = &events[..end];

        let mut users: Vec<UserId> = window.iter().map(|e| e.user).collect();
        users.sort_unstable();
        users.dedup();
        let mut tweets: Vec<TweetId> = window.iter().map(|e| e.tweet).collect();
        tweets.sort_unstable();
        tweets.dedup();
        let mut hashtags: Vec<HashtagId> = window.iter().map(|e| e.hashtag).collect();
        hashtags.sort_unstable();
        hashtags.dedup();

        let mut nodes = Vec::with_capacity(users.len() + tweets.len() + hashtags.len());
        let mut user_nodes = HashMap::new();
        let mut tweet_nodes = HashMap::new();
        let mut hashtag_nodes = HashMap::new();
        for &u in &users {
            user_nodes.insert(u, nodes.len() as u32);
            nodes.push(FolkNode::User(u));
        }
        for &t in &tweets {
            tweet_nodes.insert(t, nodes.len() as u32);
            nodes.push(FolkNode::Tweet(t));
        }
        for &h in &hashtags {
            hashtag_nodes.insert(h, nodes.len() as u32);
            nodes.push(FolkNode::Hashtag(h));
        }

        let mut edge_weights: HashMap<(u32, u32), f64> = HashMap::new();
        let mut hashtag_last_ts: HashMap<HashtagId, i64> = HashMap::new();
        for e in window {
            let u = user_nodes[&e.user];
            let t = tweet_nodes[&e.tweet];
            let h = hashtag_nodes[&e.hashtag];
            for (a, b) in [(u, t), (t, h), (u, h)] {
                let key = if a < b { (a, b) } else { (b, a) };
                *edge_weights.entry(key).or_insert(0.0) += 1.0;
            }
            let last = hashtag_last_ts.entry(e.hashtag).or_insert(i64::MIN);
            *last = (*last).max(e.timestamp);
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut degree = vec![0.0; nodes.len()];
        let mut edges: Vec<((u32, u32), f64)> = edge_weights.into_iter().collect();
        edges.sort_by_key(|&(k, _)| k);
        for ((a, b), w) in edges {
            adjacency[a as usize].push((b, w));
            adjacency[b as usize].push((a, w));
            degree[a as usize] += w;
            degree[b as usize] += w;
        }

        FolkGraph {
            nodes,
            adjacency,
            degree,
            user_nodes,
            hashtag_last_ts,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[FolkNode] {
        &self.nodes
    }

    pub fn neighbors(&self, node: usize) -> &[(u32, f64)] {
        &self.adjacency[node]
    }

    pub fn user_node(&self, user: UserId) -> Option<usize> {
        self.user_nodes.get(&user).map(|&n| n as usize)
    }

    /// Uniform preference over all nodes.
    pub fn uniform_preference(&self) -> Vec<f64> {
        vec![1.0 / self.len() as f64; self.len()]
    }

    /// Preference concentrated on one node: half the mass on it, the rest
    /// uniform.
    pub fn concentrated_preference(&self, node: usize) -> Vec<f64> {
        let mut p = vec![0.5 / self.len() as f64; self.len()];
        p[node] += 0.5;
        p
    }

    /// Iterates `w <- d*p + (1-d) * M * w` from the uniform vector, where
    /// `(M*w)_i` averages the neighbor weights of `i` scaled by edge
    /// weight over its weighted degree.
    pub fn spread(&self, preference: &[f64], d: f64, iterations: usize) -> Vec<f64> {
        let n = self.len();
        let mut w = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        for _ in 0..iterations {
            for i in 0..n {
                let mut acc = 0.0;
                if self.degree[i] > 0.0 {
                    for &(j, weight) in &self.adjacency[i] {
                        acc += weight * w[j as usize];
                    }
                    acc /= self.degree[i];
                }
                next[i] = d * preference[i] + (1.0 - d) * acc;
            }
            std::mem::swap(&mut w, &mut next);
        }
        w
    }
}

/// Graph recommender score: preference-run weight minus uniform-run weight,
/// restricted to hashtag nodes. Users absent from the pre-reference graph
/// get an empty list.
pub fn folkrank(user: UserId, ts_ref: i64, corpus: &Corpus, cfg: &RecommenderConfig) -> RankedList {
    let graph = FolkGraph::build(corpus, ts_ref);
    let Some(user_node) = graph.user_node(user) else {
        return RankedList::default();
    };
    let with_pref = graph.spread(
        &graph.concentrated_preference(user_node),
        cfg.folkrank_d,
        cfg.folkrank_iters,
    );
    let baseline = graph.spread(
        &graph.uniform_preference(),
        cfg.folkrank_d,
        cfg.folkrank_iters,
    );

    let candidates = graph.nodes.iter().enumerate().filter_map(|(i, node)| {
        if let FolkNode::Hashtag(h) = node {
            let score = with_pref[i] - baseline[i];
            let ts = graph.hashtag_last_ts[h];
            Some((*h, score, ts))
        } else {
            None
        }
    });
    RankedList::from_candidates(candidates, cfg.k_max)
}
