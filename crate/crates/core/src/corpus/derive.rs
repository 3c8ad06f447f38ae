//! Scanning, document filters, and per-sentence direction resolution.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use crate::error::{Error, Result};

use super::format::CorpusFormat;
use super::{AlignedSentence, DocumentRecord, LanguagePair, LinkRecord, Reject, RejectCode};

/// One foreign document found during the scan, with its mirrored English
/// counterpart and link file when they exist at the same relative location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanEntry {
    /// Relative path of the foreign document inside its language directory.
    pub relative_path: String,
    pub foreign_doc: PathBuf,
    pub english_doc: Option<PathBuf>,
    pub link_file: Option<PathBuf>,
}

/// A document pair that survived the document-level filters, with the
/// resolved direction annotation.
#[derive(Debug, Clone)]
pub struct ValidDocPair {
    pub relative_path: String,
    pub foreign_doc: DocumentRecord,
    pub english_doc: DocumentRecord,
    pub links: LinkRecord,
    /// Declared source language: the pair's foreign code or `"en"`.
    pub original_language: String,
}

/// Walk the foreign-language directory of `root` and index every document
/// together with its English counterpart and link file, in lexicographic
/// relative-path order.
///
/// A missing or unreadable root is a configuration error; a missing
/// counterpart or link file is recorded as `None` and handled by
/// [`filter_documents`].
pub fn scan_pair(
    root: &Path,
    pair: &LanguagePair,
    format: &dyn CorpusFormat,
) -> Result<Vec<ScanEntry>> {
    if !root.is_dir() {
        return Err(Error::Config(format!("corpus root {} is not a directory", root.display())));
    }
    let foreign_root = root.join(pair.foreign());
    let english_root = root.join(pair.english());
    let link_root = root.join(pair.link_dir());

    let mut entries = Vec::new();
    if !foreign_root.is_dir() {
        return Ok(entries);
    }
    for item in WalkDir::new(&foreign_root).sort_by_file_name() {
        let item = item.map_err(|e| {
            Error::Config(format!("cannot traverse {}: {e}", foreign_root.display()))
        })?;
        if !item.file_type().is_file() {
            continue;
        }
        let path = item.path();
        if path.extension().and_then(|e| e.to_str()) != Some(format.document_extension()) {
            continue;
        }
        let relative = path
            .strip_prefix(&foreign_root)
            .expect("walked path is under its root")
            .to_string_lossy()
            .into_owned();

        let english_doc = english_root.join(&relative);
        let link_file = link_root.join(&relative).with_extension(format.link_extension());
        entries.push(ScanEntry {
            relative_path: relative,
            foreign_doc: path.to_path_buf(),
            english_doc: english_doc.is_file().then_some(english_doc),
            link_file: link_file.is_file().then_some(link_file),
        });
    }
    entries.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    Ok(entries)
}

fn read_and_parse_doc(
    path: &Path,
    relative: &str,
    format: &dyn CorpusFormat,
) -> std::result::Result<DocumentRecord, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    format.parse_document(&text, relative).map_err(|e| e.to_string())
}

fn read_and_parse_links(
    path: &Path,
    format: &dyn CorpusFormat,
) -> std::result::Result<LinkRecord, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    format.parse_links(&text).map_err(|e| e.to_string())
}

/// Apply the document-level filters, in order:
///
/// 1. `NO_COUNTERPART` — missing English document or link file, or a file on
///    either side (or the link file) that cannot be parsed.
/// 2. `NO_SOURCE_LANG` — neither side declares a source language.
/// 3. `SOURCE_LANG_MISMATCH` — a declared source language is neither the
///    pair's foreign code nor `"en"`.
/// 4. `CONTRADICTORY_SOURCE_LANG` — both sides declare one and they differ.
///
/// When only one side declares the source language, the declaring side wins.
pub fn filter_documents(
    entries: &[ScanEntry],
    pair: &LanguagePair,
    format: &dyn CorpusFormat,
) -> (Vec<ValidDocPair>, Vec<Reject>) {
    let results: Vec<std::result::Result<ValidDocPair, Reject>> = entries
        .par_iter()
        .map(|entry| classify_entry(entry, pair, format))
        .collect();

    let mut valid = Vec::new();
    let mut rejects = Vec::new();
    for result in results {
        match result {
            Ok(pair) => valid.push(pair),
            Err(reject) => rejects.push(reject),
        }
    }
    (valid, rejects)
}

fn classify_entry(
    entry: &ScanEntry,
    pair: &LanguagePair,
    format: &dyn CorpusFormat,
) -> std::result::Result<ValidDocPair, Reject> {
    let no_counterpart = || Reject::document(RejectCode::NoCounterpart, &entry.relative_path);

    let (Some(english_path), Some(link_path)) = (&entry.english_doc, &entry.link_file) else {
        return Err(no_counterpart());
    };
    let Ok(foreign_doc) = read_and_parse_doc(&entry.foreign_doc, &entry.relative_path, format)
    else {
        return Err(no_counterpart());
    };
    let Ok(english_doc) = read_and_parse_doc(english_path, &entry.relative_path, format) else {
        return Err(no_counterpart());
    };
    let Ok(links) = read_and_parse_links(link_path, format) else {
        return Err(no_counterpart());
    };

    let declared_foreign = foreign_doc.declared_source_language.as_deref();
    let declared_english = english_doc.declared_source_language.as_deref();
    let original_language = match (declared_foreign, declared_english) {
        (None, None) => {
            return Err(Reject::document(RejectCode::NoSourceLang, &entry.relative_path))
        }
        (f, e) => {
            for declared in [f, e].into_iter().flatten() {
                if declared != pair.foreign() && declared != pair.english() {
                    return Err(Reject::document(
                        RejectCode::SourceLangMismatch,
                        &entry.relative_path,
                    ));
                }
            }
            match (f, e) {
                (Some(f), Some(e)) if f != e => {
                    return Err(Reject::document(
                        RejectCode::ContradictorySourceLang,
                        &entry.relative_path,
                    ))
                }
                (Some(declared), _) | (_, Some(declared)) => declared.to_string(),
                (None, None) => unreachable!(),
            }
        }
    };

    Ok(ValidDocPair {
        relative_path: entry.relative_path.clone(),
        foreign_doc,
        english_doc,
        links,
        original_language,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum SentenceState {
    Untouched,
    InDeadLink,
    InNonOneToOne,
    Aligned,
}

/// Resolve the direction of every 1:1-linked sentence pair of one valid
/// document pair.
///
/// Per-sentence filters, in order: a sentence whose language tag differs
/// from its document's language is dropped (`SENT_LANG_TAG_MISMATCH`); a
/// sentence absent from the link file, or whose only links are unusable
/// because the other side is missing or invalid, is dropped (`SENT_NO_LINK`);
/// a sentence reachable only through links that are not one-to-one is dropped
/// (`NON_ONE_TO_ONE_LINK`). Links referencing a nonexistent sentence id are
/// additionally reported as `SENT_NO_LINK` against the missing side.
pub fn resolve_directions(pair: &ValidDocPair) -> (Vec<AlignedSentence>, Vec<Reject>) {
    let foreign = &pair.foreign_doc;
    let english = &pair.english_doc;

    let foreign_by_id: HashMap<&str, usize> =
        foreign.sentences.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let english_by_id: HashMap<&str, usize> =
        english.sentences.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();

    let bad_tag_foreign: HashSet<usize> = foreign
        .sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| s.lang_tag != foreign.language)
        .map(|(i, _)| i)
        .collect();
    let bad_tag_english: HashSet<usize> = english
        .sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| s.lang_tag != english.language)
        .map(|(i, _)| i)
        .collect();

    let mut foreign_state = vec![SentenceState::Untouched; foreign.sentences.len()];
    let mut english_state = vec![SentenceState::Untouched; english.sentences.len()];
    let mut aligned = Vec::new();
    let mut link_rejects = Vec::new();

    let mark = |state: &mut Vec<SentenceState>, idx: usize, new: SentenceState| {
        // Alignment wins over any dead-link bookkeeping from other links.
        if state[idx] != SentenceState::Aligned {
            state[idx] = new;
        }
    };

    for link in &pair.links.links {
        if !link.is_one_to_one() {
            for id in &link.src {
                if let Some(&i) = foreign_by_id.get(id.as_str()) {
                    mark(&mut foreign_state, i, SentenceState::InNonOneToOne);
                }
            }
            for id in &link.trg {
                if let Some(&i) = english_by_id.get(id.as_str()) {
                    mark(&mut english_state, i, SentenceState::InNonOneToOne);
                }
            }
            continue;
        }

        let src_id = &link.src[0];
        let trg_id = &link.trg[0];
        let src_idx = foreign_by_id.get(src_id.as_str()).copied();
        let trg_idx = english_by_id.get(trg_id.as_str()).copied();

        match (src_idx, trg_idx) {
            (Some(src), Some(trg)) => {
                if bad_tag_foreign.contains(&src) || bad_tag_english.contains(&trg) {
                    // The offending sentence gets its own reject below; its
                    // partner is left without a usable destination.
                    mark(&mut foreign_state, src, SentenceState::InDeadLink);
                    mark(&mut english_state, trg, SentenceState::InDeadLink);
                } else {
                    aligned.push(AlignedSentence {
                        english_text: english.sentences[trg].text.clone(),
                        foreign_text: foreign.sentences[src].text.clone(),
                        original_language: pair.original_language.clone(),
                        source_doc: pair.relative_path.clone(),
                    });
                    foreign_state[src] = SentenceState::Aligned;
                    english_state[trg] = SentenceState::Aligned;
                }
            }
            (missing_src, missing_trg) => {
                if missing_src.is_none() {
                    link_rejects.push(Reject::sentence(
                        RejectCode::SentNoLink,
                        &pair.relative_path,
                        src_id.clone(),
                    ));
                } else if let Some(i) = missing_src {
                    mark(&mut foreign_state, i, SentenceState::InDeadLink);
                }
                if missing_trg.is_none() {
                    link_rejects.push(Reject::sentence(
                        RejectCode::SentNoLink,
                        &pair.relative_path,
                        trg_id.clone(),
                    ));
                } else if let Some(i) = missing_trg {
                    mark(&mut english_state, i, SentenceState::InDeadLink);
                }
            }
        }
    }

    let mut rejects = link_rejects;
    let sides = [
        (foreign, &foreign_state, &bad_tag_foreign),
        (english, &english_state, &bad_tag_english),
    ];
    for (doc, states, bad_tags) in sides {
        for (idx, sentence) in doc.sentences.iter().enumerate() {
            let code = match states[idx] {
                SentenceState::Aligned => continue,
                _ if bad_tags.contains(&idx) => RejectCode::SentLangTagMismatch,
                SentenceState::Untouched | SentenceState::InDeadLink => RejectCode::SentNoLink,
                SentenceState::InNonOneToOne => RejectCode::NonOneToOneLink,
            };
            rejects.push(Reject::sentence(code, &pair.relative_path, sentence.id.clone()));
        }
    }

    (aligned, rejects)
}
