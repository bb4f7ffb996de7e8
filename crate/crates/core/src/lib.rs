//! Time-aware hashtag recommendation toolkit.
//!
//! The crate models how users reuse hashtags over time and turns that into
//! recommenders and an offline evaluation harness:
//!
//! - [`corpus`]: data model, file ingestion, usage-type classification,
//!   leave-one-out splitting and a seeded synthetic corpus generator.
//! - [`temporal`]: reuse-recency series and power-law vs. exponential
//!   decay fitting (MLE + likelihood-ratio test).
//! - [`recommend`]: the base-level-activation recommender family and the
//!   frequency, recency, CF and graph baselines.
//! - [`content`]: TF-IDF inverted index, tweet similarity and the
//!   similarity-rank baseline.
//! - [`eval`]: ranking metrics, experiment runner and paired significance
//!   tests.

pub mod content;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod recommend;
pub mod temporal;

pub use error::{Error, Result};
