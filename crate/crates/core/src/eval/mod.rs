//! Offline evaluation: ranking metrics per test entry, the leave-one-out
//! experiment runner and paired significance tests.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::content::build_index;
use crate::corpus::{leave_one_out_split, Corpus, CorpusStats, HashtagId, Scenario};
use crate::error::{Error, Result};
use crate::recommend::{score, Algorithm, RankedList, RecommenderConfig, ScoringContext};

/// Rank cutoff shared by the ranking metrics.
const K: usize = 10;

/// Accuracy and ranking metrics of one prediction list against one
/// relevant set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub precision_at: [f64; K],
    pub recall_at: [f64; K],
    pub f1_at_5: f64,
    pub mrr_at_10: f64,
    pub map_at_10: f64,
    pub ndcg_at_10: f64,
}

impl MetricSet {
    pub fn zero() -> Self {
        MetricSet {
            precision_at: [0.0; K],
            recall_at: [0.0; K],
            f1_at_5: 0.0,
            mrr_at_10: 0.0,
            map_at_10: 0.0,
            ndcg_at_10: 0.0,
        }
    }
}

/// Computes all metrics for one prediction. `relevant` must not be empty;
/// an empty prediction list scores zero everywhere.
///
/// P@k divides by `k`, R@k by the relevant-set size. The reciprocal rank
/// is that of the first relevant item within the top 10. Average precision
/// sums precision at the hit positions and divides by
/// `min(|relevant|, 10)`. The rank discount is binary-gain
/// `1 / log2(position + 1)`, normalized by the ideal prefix.
pub fn metrics_for(predicted: &RankedList, relevant: &BTreeSet<HashtagId>) -> Result<MetricSet> {
    if relevant.is_empty() {
        return Err(Error::EmptyRelevantSet);
    }
    let hits: Vec<bool> = predicted
        .hashtags()
        .iter()
        .take(K)
        .map(|h| relevant.contains(h))
        .collect();

    let mut precision_at = [0.0; K];
    let mut recall_at = [0.0; K];
    let mut cumulative = 0usize;
    let mut hit_count_at = [0usize; K];
    for k in 0..K {
        if k < hits.len() && hits[k] {
            cumulative += 1;
        }
        hit_count_at[k] = cumulative;
        precision_at[k] = cumulative as f64 / (k + 1) as f64;
        recall_at[k] = cumulative as f64 / relevant.len() as f64;
    }

    let f1_at_5 = {
        let (p, r) = (precision_at[4], recall_at[4]);
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    };

    let mrr_at_10 = hits
        .iter()
        .position(|&h| h)
        .map_or(0.0, |i| 1.0 / (i + 1) as f64);

    let map_at_10 = {
        let sum: f64 = hits
            .iter()
            .enumerate()
            .filter(|&(_, &h)| h)
            .map(|(i, _)| hit_count_at[i] as f64 / (i + 1) as f64)
            .sum();
        sum / relevant.len().min(K) as f64
    };

    let ndcg_at_10 = {
        let dcg: f64 = hits
            .iter()
            .enumerate()
            .filter(|&(_, &h)| h)
            .map(|(i, _)| 1.0 / ((i + 2) as f64).log2())
            .sum();
        let ideal: f64 = (0..relevant.len().min(K))
            .map(|i| 1.0 / ((i + 2) as f64).log2())
            .sum();
        dcg / ideal
    };

    Ok(MetricSet {
        precision_at,
        recall_at,
        f1_at_5,
        mrr_at_10,
        map_at_10,
        ndcg_at_10,
    })
}

/// Paired two-sided t-test result. `degenerate` marks a zero-variance
/// difference with unequal means, where the statistic is unbounded.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub degenerate: bool,
}

/// Standard paired t-test over per-entry metric values.
pub fn paired_t_test(per_entry_a: &[f64], per_entry_b: &[f64]) -> Result<TTest> {
    let n = per_entry_a.len();
    if n != per_entry_b.len() || n < 2 {
        return Err(Error::MismatchedPairs {
            a: per_entry_a.len(),
            b: per_entry_b.len(),
        });
    }
    let diffs: Vec<f64> = per_entry_a
        .iter()
        .zip(per_entry_b)
        .map(|(a, b)| a - b)
        .collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTest {
                t: 0.0,
                p: 1.0,
                degenerate: false,
            }
        } else {
            TTest {
                t: if mean > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                p: 0.0,
                degenerate: true,
            }
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("valid dof");
    let p = 2.0 * dist.cdf(-t.abs());
    Ok(TTest {
        t,
        p,
        degenerate: false,
    })
}

/// Per-entry scalar metrics of one algorithm, kept for significance tests.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PerEntryMetrics {
    pub f1_at_5: Vec<f64>,
    pub mrr_at_10: Vec<f64>,
    pub map_at_10: Vec<f64>,
    pub ndcg_at_10: Vec<f64>,
}

impl PerEntryMetrics {
    pub fn metric(&self, name: &str) -> Option<&[f64]> {
        match name {
            "f1_at_5" => Some(&self.f1_at_5),
            "mrr_at_10" => Some(&self.mrr_at_10),
            "map_at_10" => Some(&self.map_at_10),
            "ndcg_at_10" => Some(&self.ndcg_at_10),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 4] = ["f1_at_5", "mrr_at_10", "map_at_10", "ndcg_at_10"];
}

/// Results of one algorithm over the whole test set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub algorithm: Algorithm,
    pub mean: MetricSet,
    pub per_entry: PerEntryMetrics,
}

/// Full experiment output: averaged metrics per algorithm plus the
/// per-entry values they were averaged from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: u8,
    pub test_entries: usize,
    pub dataset: CorpusStats,
    pub config: RecommenderConfig,
    /// Conventions that the numbers depend on but the metrics names alone
    /// do not pin down.
    pub metadata: BTreeMap<String, String>,
    pub algorithms: Vec<AlgorithmReport>,
}

fn conventions(cfg: &RecommenderConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert(
        "map_normalization".into(),
        "sum of precision at hit positions / min(|relevant|, 10)".into(),
    );
    m.insert(
        "ndcg_gains".into(),
        "binary gains with 1/log2(rank+1) discount".into(),
    );
    m.insert("mr_scores".into(), "recency rank mapped onto (0, 1]".into());
    m.insert("cf_profiles".into(), "binary hashtag sets".into());
    m.insert(
        "empty_predictions".into(),
        "entries with an empty list score zero, never skipped".into(),
    );
    m.insert("s_max".into(), cfg.s_max.to_string());
    m
}

/// Runs the leave-one-out experiment for `algorithms` on `corpus`.
///
/// For every test entry each algorithm scores at the entry's timestamp and
/// is measured against the held-out tweet's hashtags. Entries are processed
/// in parallel but aggregated in deterministic order. Content-based
/// algorithms are only valid in scenario 2, where the index is built on the
/// training snapshot.
pub fn run_experiment(
    corpus: &Corpus,
    scenario: Scenario,
    algorithms: &[Algorithm],
    cfg: &RecommenderConfig,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    if scenario == Scenario::One {
        if let Some(bad) = algorithms.iter().find(|a| a.needs_content()) {
            return Err(Error::ContentUnavailable(bad.name().into()));
        }
    }
    let split = leave_one_out_split(corpus, scenario);
    debug_assert!(
        scenario == Scenario::One || split.test.iter().all(|e| !e.tweet.is_retweet),
        "scenario 2 test sets must not contain retweets"
    );
    let index = match scenario {
        Scenario::One => None,
        Scenario::Two => Some(build_index(&split.train, cfg)),
    };

    let per_entry: Vec<Vec<MetricSet>> = split
        .test
        .par_iter()
        .map(|entry| {
            let relevant: BTreeSet<HashtagId> = entry.tweet.hashtags.iter().copied().collect();
            let ctx = ScoringContext {
                train: &split.train,
                ts_ref: entry.tweet.timestamp,
                text: Some(entry.tweet.text.as_str()),
                index: index.as_ref(),
                cfg,
            };
            algorithms
                .iter()
                .map(|&algo| {
                    let list = score(algo, entry.user, &ctx)?;
                    metrics_for(&list, &relevant)
                })
                .collect::<Result<Vec<MetricSet>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let n = per_entry.len();
    let algorithms_report = algorithms
        .iter()
        .enumerate()
        .map(|(ai, &algorithm)| {
            let mut per = PerEntryMetrics::default();
            let mut mean = MetricSet::zero();
            for row in &per_entry {
                let m = &row[ai];
                per.f1_at_5.push(m.f1_at_5);
                per.mrr_at_10.push(m.mrr_at_10);
                per.map_at_10.push(m.map_at_10);
                per.ndcg_at_10.push(m.ndcg_at_10);
                for k in 0..K {
                    mean.precision_at[k] += m.precision_at[k];
                    mean.recall_at[k] += m.recall_at[k];
                }
            }
            if n > 0 {
                for k in 0..K {
                    mean.precision_at[k] /= n as f64;
                    mean.recall_at[k] /= n as f64;
                }
                mean.f1_at_5 = per.f1_at_5.iter().sum::<f64>() / n as f64;
                mean.mrr_at_10 = per.mrr_at_10.iter().sum::<f64>() / n as f64;
                mean.map_at_10 = per.map_at_10.iter().sum::<f64>() / n as f64;
                mean.ndcg_at_10 = per.ndcg_at_10.iter().sum::<f64>() / n as f64;
            }
            AlgorithmReport {
                algorithm,
                mean,
                per_entry: per,
            }
        })
        .collect();

    Ok(ExperimentReport {
        scenario: scenario.number(),
        test_entries: n,
        dataset: corpus.stats(),
        config: *cfg,
        metadata: conventions(cfg),
        algorithms: algorithms_report,
    })
}

/// One row of the all-pairs significance table.
#[derive(Clone, Debug, Serialize)]
pub struct SignificanceRow {
    pub algo_a: Algorithm,
    pub algo_b: Algorithm,
    pub metric: &'static str,
    pub t: f64,
    pub p: f64,
    pub degenerate: bool,
}

/// Paired t-tests for every algorithm pair and scalar metric in a report.
pub fn significance_table(report: &ExperimentReport) -> Result<Vec<SignificanceRow>> {
    let mut rows = Vec::new();
    for (i, a) in report.algorithms.iter().enumerate() {
        for b in report.algorithms.iter().skip(i + 1) {
            for metric in PerEntryMetrics::NAMES {
                let va = a.per_entry.metric(metric).expect("known metric");
                let vb = b.per_entry.metric(metric).expect("known metric");
                let tt = paired_t_test(va, vb)?;
                rows.push(SignificanceRow {
                    algo_a: a.algorithm,
                    algo_b: b.algorithm,
                    metric,
                    t: tt.t,
                    p: tt.p,
                    degenerate: tt.degenerate,
                });
            }
        }
    }
    Ok(rows)
}
