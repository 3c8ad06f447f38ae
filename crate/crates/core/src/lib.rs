//! Toolkit for deriving translation-direction-annotated bilingual corpora
//! from a mirrored per-language directory layout, and for classifying English
//! text chunks as original or translated using translationese features
//! (function words, POS n-grams) with linear classifiers.
//!
//! The crate is organized along the processing pipeline:
//!
//! - [`corpus`] walks a corpus tree, resolves per-sentence translation
//!   direction through link files, and emits aligned text files.
//! - [`text`] tokenizes English text and assigns POS tags with a trainable
//!   averaged-perceptron tagger (or ingests externally pre-tagged data).
//! - [`chunking`] assembles tagged sentences into ~N-token chunks and
//!   balances datasets by class.
//! - [`features`] turns chunks into sparse vectors (function words,
//!   POS bigrams/trigrams, combinations).
//! - [`learner`] trains linear classifiers with SGD and evaluates them with
//!   stratified cross-validation.
//! - [`synth`] generates synthetic corpora with a controllable signal,
//!   providing a ground-truth oracle for end-to-end tests.
//! - [`experiments`] ties everything together into reproducible experiment
//!   suites with machine-readable reports.

pub mod chunking;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod features;
pub mod learner;
pub mod seed;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
