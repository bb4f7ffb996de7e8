//! Implementations of the CLI subcommands.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use serde::Serialize;

use htrec_core::content::{build_index, load_index, save_index, Index};
use htrec_core::corpus::{
    generate_synthetic, ingest_files, Corpus, Scenario, SyntheticParams, UserId,
};
use htrec_core::eval::{run_experiment, significance_table, ExperimentReport};
use htrec_core::recommend::{score, Algorithm, RecommenderConfig, ScoringContext};
use htrec_core::temporal::{
    fit_report, individual_recency_series, social_recency_series, RecencySeries,
};

use crate::config::{load_config, resolve_out_dir, RunConfig};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_file(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    manifest: &mut Vec<ManifestEntry>,
) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    manifest.push(ManifestEntry {
        file: name.to_owned(),
        bytes: bytes.len(),
    });
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    bytes: usize,
}

fn write_manifest(dir: &Path, command: &str, manifest: Vec<ManifestEntry>) -> Result<()> {
    #[derive(Serialize)]
    struct Manifest {
        command: String,
        outputs: Vec<ManifestEntry>,
    }
    let m = Manifest {
        command: command.to_owned(),
        outputs: manifest,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&m)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_corpus(dir: &Path) -> Result<Corpus> {
    let corpus = htrec_core::corpus::ingest_dir(dir)
        .with_context(|| format!("ingesting corpus from {}", dir.display()))?;
    info!("loaded corpus: {:?}", corpus.stats());
    Ok(corpus)
}

/// Persists a corpus plus its statistics into `out`.
fn persist_corpus(corpus: &Corpus, out: &Path, command: &str) -> Result<()> {
    ensure_dir(out)?;
    corpus.write_dir(out)?;
    let mut manifest: Vec<ManifestEntry> = ["follows.tsv", "tweets.tsv", "seeds.txt"]
        .iter()
        .map(|f| ManifestEntry {
            file: (*f).to_owned(),
            bytes: std::fs::metadata(out.join(f))
                .map(|m| m.len() as usize)
                .unwrap_or(0),
        })
        .collect();
    let stats = serde_json::to_vec_pretty(&corpus.stats())?;
    write_file(out, "stats.json", &stats, &mut manifest)?;
    write_manifest(out, command, manifest)?;
    Ok(())
}

pub fn cmd_ingest(follows: &Path, tweets: &Path, seeds: &Path, out: &Path) -> Result<()> {
    let corpus = ingest_files(follows, tweets, seeds)?;
    if corpus.tweets().is_empty() {
        bail!(
            "{}: no usable tweets (empty file or all tweets hashtag-free)",
            tweets.display()
        );
    }
    let out = resolve_out_dir(out);
    persist_corpus(&corpus, &out, "ingest")?;
    println!("{}", serde_json::to_string_pretty(&corpus.stats())?);
    Ok(())
}

pub fn cmd_generate(params: &SyntheticParams, out: &Path) -> Result<()> {
    let corpus = generate_synthetic(params)?;
    let out = resolve_out_dir(out);
    persist_corpus(&corpus, &out, "generate")?;
    println!("{}", serde_json::to_string_pretty(&corpus.stats())?);
    Ok(())
}

fn recency_csv(series: &RecencySeries) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "bin,count").expect("write to vec");
    for (bin, count) in &series.binned().pairs {
        writeln!(out, "{bin},{count}").expect("write to vec");
    }
    out
}

pub fn cmd_analyze(corpus_dir: &Path, out: &Path) -> Result<()> {
    let corpus = load_corpus(corpus_dir)?;
    let individual = individual_recency_series(&corpus);
    let social = social_recency_series(&corpus);
    let fit_individual =
        fit_report(&individual).context("fitting the individual recency series")?;
    let fit_social = fit_report(&social).context("fitting the social recency series")?;

    #[derive(Serialize)]
    struct AnalyzeReport {
        individual: htrec_core::temporal::FitReport,
        social: htrec_core::temporal::FitReport,
        individual_samples: usize,
        social_samples: usize,
        cap_hours: f64,
        metadata: std::collections::BTreeMap<String, String>,
    }
    let mut metadata = std::collections::BTreeMap::new();
    metadata.insert(
        "p_value".into(),
        "two-sided normal approximation of the normalized log-likelihood ratio".into(),
    );
    metadata.insert(
        "x_min_search".into(),
        "KS minimization over at most 500 quantile-thinned sample values".into(),
    );
    metadata.insert("binning".into(), "whole hours, ceil".into());
    let report = AnalyzeReport {
        individual: fit_individual,
        social: fit_social,
        individual_samples: individual.len(),
        social_samples: social.len(),
        cap_hours: individual.cap_hours,
        metadata,
    };

    let out = resolve_out_dir(out);
    ensure_dir(&out)?;
    let mut manifest = Vec::new();
    write_file(
        &out,
        "recency_individual.csv",
        &recency_csv(&individual),
        &mut manifest,
    )?;
    write_file(
        &out,
        "recency_social.csv",
        &recency_csv(&social),
        &mut manifest,
    )?;
    write_file(
        &out,
        "fit_report.json",
        &serde_json::to_vec_pretty(&report)?,
        &mut manifest,
    )?;
    write_manifest(&out, "analyze", manifest)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

pub fn cmd_index_build(corpus_dir: &Path, out: &Path, cfg: &RecommenderConfig) -> Result<()> {
    let corpus = load_corpus(corpus_dir)?;
    let index = build_index(&corpus, cfg);
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    save_index(&index, out)?;
    println!(
        "indexed {} docs, {} terms, {} postings -> {}",
        index.total_docs(),
        index.num_terms(),
        index.num_postings(),
        out.display()
    );
    Ok(())
}

pub fn cmd_index_stats(path: &Path) -> Result<()> {
    let index = load_index(path)?;
    #[derive(Serialize)]
    struct Stats {
        docs: usize,
        terms: usize,
        postings: usize,
        min_tf: u32,
        min_df: u32,
    }
    let (min_tf, min_df) = index.thresholds();
    let stats = Stats {
        docs: index.total_docs(),
        terms: index.num_terms(),
        postings: index.num_postings(),
        min_tf,
        min_df,
    };
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}

pub struct RecommendArgs {
    pub corpus_dir: PathBuf,
    pub algo: Algorithm,
    pub user: String,
    pub text: Option<String>,
    pub ts_ref: Option<i64>,
    pub k: Option<usize>,
    pub config: Option<PathBuf>,
    pub index: Option<PathBuf>,
}

pub fn cmd_recommend(args: &RecommendArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus_dir)?;
    let mut cfg: RecommenderConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => RecommenderConfig::default(),
    };
    if let Some(k) = args.k {
        cfg.k_max = k;
    }
    cfg.validate()?;

    let user: UserId = corpus
        .user_id(&args.user)
        .with_context(|| format!("user {:?} not in corpus", args.user))?;
    // recommend "after the corpus" unless a reference timestamp is given
    let ts_ref = args.ts_ref.unwrap_or_else(|| {
        corpus
            .tweets()
            .last()
            .map(|t| t.timestamp + 3600)
            .unwrap_or(3600)
    });

    let index: Option<Index> = if args.algo.needs_content() {
        Some(match &args.index {
            Some(path) => load_index(path)?,
            None => build_index(&corpus, &cfg),
        })
    } else {
        None
    };
    let ctx = ScoringContext {
        train: &corpus,
        ts_ref,
        text: args.text.as_deref(),
        index: index.as_ref(),
        cfg: &cfg,
    };
    let list = score(args.algo, user, &ctx)?;

    #[derive(Serialize)]
    struct Item {
        hashtag: String,
        score: f64,
    }
    #[derive(Serialize)]
    struct Output {
        user: String,
        algo: &'static str,
        ts_ref: i64,
        items: Vec<Item>,
    }
    let output = Output {
        user: args.user.clone(),
        algo: args.algo.name(),
        ts_ref,
        items: list
            .items()
            .iter()
            .map(|s| Item {
                hashtag: corpus.hashtag_name(s.hashtag).to_owned(),
                score: s.score,
            })
            .collect(),
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(())
}

fn pr_curve_csv(report: &ExperimentReport, algo_index: usize) -> Vec<u8> {
    let mean = &report.algorithms[algo_index].mean;
    let mut out = Vec::new();
    writeln!(out, "k,precision,recall").expect("write to vec");
    for k in 0..10 {
        writeln!(
            out,
            "{},{},{}",
            k + 1,
            mean.precision_at[k],
            mean.recall_at[k]
        )
        .expect("write to vec");
    }
    out
}

pub fn cmd_evaluate(config_path: &Path) -> Result<()> {
    let config: RunConfig = load_config(config_path)?;
    config.validate()?;

    let corpus = match (&config.input.corpus, &config.input.generate) {
        (Some(dir), None) => load_corpus(dir)?,
        (None, Some(gen)) => {
            let corpus = generate_synthetic(&gen.to_params())?;
            info!("generated corpus: {:?}", corpus.stats());
            corpus
        }
        _ => unreachable!("validated above"),
    };
    let scenario = match config.run.scenario {
        1 => Scenario::One,
        _ => Scenario::Two,
    };
    let algorithms: Vec<Algorithm> = config
        .run
        .algorithms
        .iter()
        .map(|name| name.parse::<Algorithm>().map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;

    let report = run_experiment(&corpus, scenario, &algorithms, &config.recommender)?;
    let significance = significance_table(&report)?;

    let out = resolve_out_dir(&config.run.output_dir);
    ensure_dir(&out)?;
    let mut manifest = Vec::new();
    write_file(
        &out,
        "report.json",
        &serde_json::to_vec_pretty(&report)?,
        &mut manifest,
    )?;
    for (i, algo) in algorithms.iter().enumerate() {
        write_file(
            &out,
            &format!("pr_curve_{}.csv", algo.name()),
            &pr_curve_csv(&report, i),
            &mut manifest,
        )?;
    }
    let mut sig_csv = Vec::new();
    writeln!(sig_csv, "algo_a,algo_b,metric,t,p").expect("write to vec");
    for row in &significance {
        writeln!(
            sig_csv,
            "{},{},{},{},{}",
            row.algo_a.name(),
            row.algo_b.name(),
            row.metric,
            row.t,
            row.p
        )
        .expect("write to vec");
    }
    write_file(&out, "significance.csv", &sig_csv, &mut manifest)?;
    write_manifest(&out, "evaluate", manifest)?;

    for algo in &report.algorithms {
        println!(
            "{:10} f1@5={:.4} mrr@10={:.4} map@10={:.4} ndcg@10={:.4}",
            algo.algorithm.name(),
            algo.mean.f1_at_5,
            algo.mean.mrr_at_10,
            algo.mean.map_at_10,
            algo.mean.ndcg_at_10
        );
    }
    println!(
        "wrote {} ({} test entries)",
        out.join("report.json").display(),
        report.test_entries
    );
    Ok(())
}
