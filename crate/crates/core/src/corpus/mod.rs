//! Derivation of direction-annotated parallel corpora.
//!
//! The input is a directory tree with one directory per language holding
//! documents at mirrored relative paths, plus a `{foreign}_en` directory of
//! link files aligning foreign sentences to their English counterparts.
//! Traversal starts from the foreign side (link files map foreign sentences
//! to English, not the other way around), documents and sentences are run
//! through validity filters, and three line-aligned text files plus stats
//! and reject logs are produced per pair.

mod derive;
pub mod format;
mod output;

pub use derive::{filter_documents, resolve_directions, scan_pair, ScanEntry, ValidDocPair};
pub use output::{
    emit_parallel_files, read_parallel_files, write_rejects, write_stats, PairOutputPaths,
};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use format::CorpusFormat;

/// A bilingual pair: some foreign language against English.
///
/// Rendered as `"{foreign}-en"` (e.g. `"fr-en"`); the matching link-file
/// directory in a corpus tree is `"{foreign}_en"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguagePair {
    foreign: String,
}

impl LanguagePair {
    /// Build a pair from a two-letter foreign-language code (not `"en"`).
    pub fn new(foreign: &str) -> Result<Self> {
        let code = foreign.trim().to_ascii_lowercase();
        if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(Error::Config(format!(
                "language code must be two ASCII letters, got {foreign:?}"
            )));
        }
        if code == "en" {
            return Err(Error::Config("foreign language of a pair cannot be \"en\"".into()));
        }
        Ok(LanguagePair { foreign: code })
    }

    /// Parse a pair code of the form `"fr-en"` (or a bare foreign code).
    pub fn parse_code(code: &str) -> Result<Self> {
        match code.split_once('-') {
            Some((foreign, "en")) => LanguagePair::new(foreign),
            Some(_) => Err(Error::Config(format!(
                "pair code must look like \"fr-en\", got {code:?}"
            ))),
            None => LanguagePair::new(code),
        }
    }

    pub fn foreign(&self) -> &str {
        &self.foreign
    }

    pub fn english(&self) -> &'static str {
        "en"
    }

    /// Canonical pair code, e.g. `"fr-en"`.
    pub fn code(&self) -> String {
        format!("{}-en", self.foreign)
    }

    /// Name of the link-file directory inside a corpus root, e.g. `"fr_en"`.
    pub fn link_dir(&self) -> String {
        format!("{}_en", self.foreign)
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-en", self.foreign)
    }
}

impl Serialize for LanguagePair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for LanguagePair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let code = String::deserialize(deserializer)?;
        LanguagePair::parse_code(&code).map_err(serde::de::Error::custom)
    }
}

/// One sentence of a parsed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub lang_tag: String,
    pub text: String,
}

/// A parsed document: mirrored relative path, language, optional declared
/// source language, and its sentences in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub relative_path: String,
    pub language: String,
    pub declared_source_language: Option<String>,
    pub sentences: Vec<Sentence>,
}

/// One `link` element: source (foreign) and target (English) sentence ids.
/// Either side may carry several ids; only 1:1 links survive filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub src: Vec<String>,
    pub trg: Vec<String>,
}

impl Link {
    pub fn is_one_to_one(&self) -> bool {
        self.src.len() == 1 && self.trg.len() == 1
    }
}

/// A parsed link file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkRecord {
    pub src_doc: String,
    pub trg_doc: String,
    pub links: Vec<Link>,
}

/// An aligned sentence pair with its direction annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedSentence {
    pub english_text: String,
    pub foreign_text: String,
    /// ISO code of the language the sentence was originally authored in:
    /// either the pair's foreign code or `"en"`.
    pub original_language: String,
    pub source_doc: String,
}

/// Why a document or sentence was removed from the corpus. Filters run in
/// the declaration order below, so each subject carries the first reason
/// that applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectCode {
    NoCounterpart,
    NoSourceLang,
    SourceLangMismatch,
    ContradictorySourceLang,
    SentLangTagMismatch,
    SentNoLink,
    NonOneToOneLink,
}

impl RejectCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectCode::NoCounterpart => "NO_COUNTERPART",
            RejectCode::NoSourceLang => "NO_SOURCE_LANG",
            RejectCode::SourceLangMismatch => "SOURCE_LANG_MISMATCH",
            RejectCode::ContradictorySourceLang => "CONTRADICTORY_SOURCE_LANG",
            RejectCode::SentLangTagMismatch => "SENT_LANG_TAG_MISMATCH",
            RejectCode::SentNoLink => "SENT_NO_LINK",
            RejectCode::NonOneToOneLink => "NON_ONE_TO_ONE_LINK",
        }
    }
}

impl fmt::Display for RejectCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected document (no sentence id) or sentence (with id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub code: RejectCode,
    pub path: String,
    pub sentence_id: Option<String>,
}

impl Reject {
    pub fn document(code: RejectCode, path: impl Into<String>) -> Self {
        Reject { code, path: path.into(), sentence_id: None }
    }

    pub fn sentence(code: RejectCode, path: impl Into<String>, id: impl Into<String>) -> Self {
        Reject { code, path: path.into(), sentence_id: Some(id.into()) }
    }
}

/// Fractions relative to the initial scan (documents) and to the total of
/// kept sentences. Raw counts are authoritative; these are conveniences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFractions {
    pub docs_foreign_original_of_initial: f64,
    pub docs_english_original_of_initial: f64,
    pub sentences_foreign_original_of_total: f64,
    pub sentences_english_original_of_total: f64,
}

/// Counters summarizing one pair derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationStats {
    pub pair: String,
    pub initial_docs: u64,
    pub valid_docs_foreign_original: u64,
    pub valid_docs_english_original: u64,
    pub valid_sentences_total: u64,
    pub valid_sentences_foreign_original: u64,
    pub valid_sentences_english_original: u64,
    pub rejects_by_reason: BTreeMap<String, u64>,
    pub fractions: StatsFractions,
}

/// Assemble stats from pipeline outputs. `valid_sentences_total` always
/// equals the sum of the two per-direction sentence counts.
pub fn derivation_stats(
    pair: &LanguagePair,
    initial_docs: usize,
    valid_docs: &[ValidDocPair],
    sentences: &[AlignedSentence],
    rejects: &[Reject],
) -> DerivationStats {
    let foreign = pair.foreign();
    let docs_foreign = valid_docs.iter().filter(|d| d.original_language == foreign).count() as u64;
    let docs_english = valid_docs.len() as u64 - docs_foreign;
    let sents_foreign =
        sentences.iter().filter(|s| s.original_language == foreign).count() as u64;
    let sents_english = sentences.len() as u64 - sents_foreign;

    let mut rejects_by_reason = BTreeMap::new();
    for reject in rejects {
        *rejects_by_reason.entry(reject.code.as_str().to_string()).or_insert(0) += 1;
    }

    let frac = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let total = sents_foreign + sents_english;
    DerivationStats {
        pair: pair.code(),
        initial_docs: initial_docs as u64,
        valid_docs_foreign_original: docs_foreign,
        valid_docs_english_original: docs_english,
        valid_sentences_total: total,
        valid_sentences_foreign_original: sents_foreign,
        valid_sentences_english_original: sents_english,
        fractions: StatsFractions {
            docs_foreign_original_of_initial: frac(docs_foreign, initial_docs as u64),
            docs_english_original_of_initial: frac(docs_english, initial_docs as u64),
            sentences_foreign_original_of_total: frac(sents_foreign, total),
            sentences_english_original_of_total: frac(sents_english, total),
        },
        rejects_by_reason,
    }
}

/// Everything `derive_pair` produces besides files on disk.
#[derive(Debug)]
pub struct Derivation {
    pub sentences: Vec<AlignedSentence>,
    pub stats: DerivationStats,
    pub rejects: Vec<Reject>,
}

/// Run the full derivation for one pair without touching the output side:
/// scan, filter, resolve, count.
///
/// Documents are processed in parallel; results are merged in lexicographic
/// relative-path order, so output is deterministic.
pub fn derive_pair_in_memory(
    root: &Path,
    pair: &LanguagePair,
    format: &dyn CorpusFormat,
) -> Result<Derivation> {
    let entries = scan_pair(root, pair, format)?;
    let initial_docs = entries.len();
    let (valid, mut rejects) = filter_documents(&entries, pair, format);

    let per_doc: Vec<(Vec<AlignedSentence>, Vec<Reject>)> =
        valid.par_iter().map(resolve_directions).collect();

    let mut sentences = Vec::new();
    for (aligned, doc_rejects) in per_doc {
        sentences.extend(aligned);
        rejects.extend(doc_rejects);
    }

    let stats = derivation_stats(pair, initial_docs, &valid, &sentences, &rejects);
    Ok(Derivation { sentences, stats, rejects })
}

/// File outputs of a full pair derivation.
#[derive(Debug)]
pub struct DeriveOutcome {
    pub stats: DerivationStats,
    pub files: PairOutputPaths,
    pub stats_path: std::path::PathBuf,
    pub rejects_path: std::path::PathBuf,
}

/// Full derivation for one pair: triple text files, stats JSON, reject TSV.
pub fn derive_pair(
    root: &Path,
    pair: &LanguagePair,
    out_dir: &Path,
    format: &dyn CorpusFormat,
) -> Result<DeriveOutcome> {
    let derivation = derive_pair_in_memory(root, pair, format)?;
    let files = emit_parallel_files(&derivation.sentences, out_dir, pair)?;
    let stats_path = write_stats(&derivation.stats, out_dir, pair)?;
    let rejects_path = write_rejects(&derivation.rejects, out_dir, pair)?;
    Ok(DeriveOutcome { stats: derivation.stats, files, stats_path, rejects_path })
}
