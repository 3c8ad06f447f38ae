//! Feature extraction: chunks to sparse vectors.
//!
//! Four vectorization schemes are supported: function-word frequencies
//! scaled to a fixed token basis, raw POS bigram/trigram counts against a
//! top-k vocabulary, and concatenations of the two. POS n-grams never cross
//! sentence boundaries and no padding symbols are used, so pooled chunks
//! contain no artifact n-grams from shuffling.

mod dataset;

pub use dataset::{manifest_path, read_dataset, read_manifest, write_dataset, FeatureManifest};

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::chunking::Chunk;
use crate::error::{Error, Result};

const DEFAULT_FW_LIST: &str = include_str!("function_words_en.txt");

/// The default normalization basis: function-word counts are scaled to a
/// 2000-token chunk.
pub const DEFAULT_BASIS: f64 = 2000.0;

/// An ordered list of lowercase function words; the order fixes the vector
/// indices of the FW feature family.
#[derive(Debug, Clone)]
pub struct FunctionWordList {
    words: Vec<String>,
    index: HashMap<String, usize>,
    source: String,
}

impl FunctionWordList {
    fn build(words: Vec<String>, source: String) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Config(format!("function word list {source} is empty")));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            if word.chars().any(char::is_whitespace) {
                return Err(Error::Data(format!(
                    "function word list {source}: entry {word:?} contains whitespace"
                )));
            }
            if *word != word.to_lowercase() {
                return Err(Error::Data(format!(
                    "function word list {source}: entry {word:?} is not lowercase"
                )));
            }
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::Data(format!(
                    "function word list {source}: duplicate entry {word:?}"
                )));
            }
        }
        Ok(FunctionWordList { words, index, source })
    }

    /// The built-in English list (~470 entries, the standard stylometry
    /// inventory).
    pub fn default_english() -> Arc<Self> {
        let words = DEFAULT_FW_LIST
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Arc::new(Self::build(words, "builtin:en".into()).expect("builtin list is valid"))
    }

    /// Load a one-word-per-line list from a file.
    pub fn from_path(path: &Path) -> Result<Arc<Self>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Ok(Arc::new(Self::build(words, path.display().to_string())?))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// SHA-256 over the newline-joined entries, hex-encoded.
    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.words {
            hasher.update(word.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A top-k POS n-gram vocabulary; `entries` are ordered by descending
/// training frequency with lexicographic tie-breaking, fixing vector indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramVocab {
    pub n: usize,
    pub k: usize,
    entries: Vec<Vec<String>>,
    index: HashMap<Vec<String>, usize>,
}

impl NgramVocab {
    pub fn new(n: usize, k: usize, entries: Vec<Vec<String>>) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::Config(format!("n-gram order must be 2 or 3, got {n}")));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            if entry.len() != n {
                return Err(Error::Data(format!(
                    "vocabulary entry {entry:?} has arity {} instead of {n}",
                    entry.len()
                )));
            }
            if index.insert(entry.clone(), i).is_some() {
                return Err(Error::Data(format!("duplicate vocabulary entry {entry:?}")));
            }
        }
        Ok(NgramVocab { n, k, entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Vec<String>] {
        &self.entries
    }
}

/// Count tag n-grams per sentence (never across sentence boundaries)
/// over all chunks, and keep the `k` most frequent. Ties are broken
/// lexicographically, so the vocabulary does not depend on input order.
pub fn top_k_ngrams<'a>(
    chunks: impl IntoIterator<Item = &'a Chunk>,
    n: usize,
    k: usize,
) -> Result<NgramVocab> {
    if !(n == 2 || n == 3) {
        return Err(Error::Config(format!("n-gram order must be 2 or 3, got {n}")));
    }
    if k == 0 {
        return Err(Error::Config("top-k must be at least 1".into()));
    }
    let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
    for chunk in chunks {
        for sentence in &chunk.sentences {
            for window in sentence.tags.windows(n) {
                match counts.get_mut(window) {
                    Some(count) => *count += 1,
                    None => {
                        counts.insert(window.to_vec(), 1);
                    }
                }
            }
        }
    }
    let mut ranked: Vec<(Vec<String>, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    NgramVocab::new(n, k, ranked.into_iter().map(|(entry, _)| entry).collect())
}

/// The feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Fw,
    Pos2,
    Pos3,
    FwPos2,
    FwPos3,
}

impl FeatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Fw => "fw",
            FeatureKind::Pos2 => "pos2",
            FeatureKind::Pos3 => "pos3",
            FeatureKind::FwPos2 => "fw_pos2",
            FeatureKind::FwPos3 => "fw_pos3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fw" => Ok(FeatureKind::Fw),
            "pos2" => Ok(FeatureKind::Pos2),
            "pos3" => Ok(FeatureKind::Pos3),
            "fw_pos2" => Ok(FeatureKind::FwPos2),
            "fw_pos3" => Ok(FeatureKind::FwPos3),
            other => Err(Error::Config(format!(
                "unknown feature kind {other:?} (expected fw, pos2, pos3, fw_pos2, fw_pos3)"
            ))),
        }
    }

    pub fn uses_function_words(&self) -> bool {
        matches!(self, FeatureKind::Fw | FeatureKind::FwPos2 | FeatureKind::FwPos3)
    }

    pub fn ngram_order(&self) -> Option<usize> {
        match self {
            FeatureKind::Fw => None,
            FeatureKind::Pos2 | FeatureKind::FwPos2 => Some(2),
            FeatureKind::Pos3 | FeatureKind::FwPos3 => Some(3),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully resolved vectorization scheme: which families, against which
/// resources, at which normalization basis.
#[derive(Debug, Clone)]
pub struct FeatureSpec {
    pub kind: FeatureKind,
    pub fw_list: Option<Arc<FunctionWordList>>,
    pub vocab: Option<NgramVocab>,
    /// Normalization basis B: function-word counts are scaled by B / n.
    pub basis: f64,
    /// Scale POS n-gram counts by B / n too (off by default; counts are raw).
    pub normalize_pos: bool,
}

impl FeatureSpec {
    pub fn new(
        kind: FeatureKind,
        fw_list: Option<Arc<FunctionWordList>>,
        vocab: Option<NgramVocab>,
        basis: f64,
        normalize_pos: bool,
    ) -> Result<Self> {
        if kind.uses_function_words() && fw_list.is_none() {
            return Err(Error::Config(format!("feature kind {kind} needs a function word list")));
        }
        if let Some(order) = kind.ngram_order() {
            match &vocab {
                None => {
                    return Err(Error::Config(format!("feature kind {kind} needs an n-gram vocabulary")))
                }
                Some(v) if v.n != order => {
                    return Err(Error::Config(format!(
                        "feature kind {kind} needs {order}-grams but vocabulary holds {}-grams",
                        v.n
                    )))
                }
                Some(_) => {}
            }
        }
        if !(basis.is_finite() && basis > 0.0) {
            return Err(Error::Config(format!("normalization basis must be positive, got {basis}")));
        }
        Ok(FeatureSpec { kind, fw_list, vocab, basis, normalize_pos })
    }

    pub fn dimension(&self) -> usize {
        let fw = if self.kind.uses_function_words() {
            self.fw_list.as_ref().map_or(0, |l| l.len())
        } else {
            0
        };
        let pos = if self.kind.ngram_order().is_some() {
            self.vocab.as_ref().map_or(0, |v| v.len())
        } else {
            0
        };
        fw + pos
    }

    /// Vectorize one chunk under this spec.
    pub fn vectorize(&self, chunk: &Chunk) -> FeatureVector {
        match self.kind {
            FeatureKind::Fw => {
                fw_vector(chunk, self.fw_list.as_ref().unwrap(), self.basis)
            }
            FeatureKind::Pos2 | FeatureKind::Pos3 => pos_ngram_vector(
                chunk,
                self.vocab.as_ref().unwrap(),
                self.normalize_pos,
                self.basis,
            ),
            FeatureKind::FwPos2 | FeatureKind::FwPos3 => {
                let fw = fw_vector(chunk, self.fw_list.as_ref().unwrap(), self.basis);
                let pos = pos_ngram_vector(
                    chunk,
                    self.vocab.as_ref().unwrap(),
                    self.normalize_pos,
                    self.basis,
                );
                combine(&fw, &pos).expect("same chunk, same label")
            }
        }
    }

    pub fn manifest(&self) -> FeatureManifest {
        FeatureManifest {
            kind: self.kind.as_str().to_string(),
            dimension: self.dimension(),
            basis: self.basis,
            normalize_pos: self.normalize_pos,
            fw_list_len: self.fw_list.as_ref().map(|l| l.len()),
            fw_list_sha256: self.fw_list.as_ref().map(|l| l.sha256()),
            fw_list_source: self.fw_list.as_ref().map(|l| l.source().to_string()),
            top_k: self.vocab.as_ref().map(|v| v.k),
            vocab: self.vocab.as_ref().map(|v| v.entries().to_vec()),
        }
    }
}

/// A sparse labeled vector; indices are strictly increasing and below
/// `dimension`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub dimension: usize,
    pub entries: Vec<(u32, f64)>,
    pub label: crate::chunking::DirectionLabel,
}

impl FeatureVector {
    /// Dot product against a dense weight vector.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i as usize] * v).sum()
    }
}

/// Function-word frequencies of a chunk, scaled to the basis:
/// entry i = count(fw_list\[i\]) * basis / chunk tokens. Matching is
/// lowercase-exact on token surfaces; zero counts are omitted.
pub fn fw_vector(chunk: &Chunk, fw_list: &FunctionWordList, basis: f64) -> FeatureVector {
    let mut counts = vec![0u32; fw_list.len()];
    for sentence in &chunk.sentences {
        for token in &sentence.tokens {
            let lowered = token.to_lowercase();
            if let Some(&idx) = fw_list.index.get(&lowered) {
                counts[idx] += 1;
            }
        }
    }
    let scale = basis / chunk.token_count as f64;
    let entries = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (i as u32, c as f64 * scale))
        .collect();
    FeatureVector { dimension: fw_list.len(), entries, label: chunk.label }
}

/// Occurrence counts of vocabulary n-grams within a chunk, counted per
/// sentence. Raw counts by default; with `normalize` they are scaled by
/// basis / chunk tokens.
pub fn pos_ngram_vector(
    chunk: &Chunk,
    vocab: &NgramVocab,
    normalize: bool,
    basis: f64,
) -> FeatureVector {
    let mut counts = vec![0u32; vocab.len()];
    for sentence in &chunk.sentences {
        for window in sentence.tags.windows(vocab.n) {
            if let Some(&idx) = vocab.index.get(window) {
                counts[idx] += 1;
            }
        }
    }
    let scale = if normalize { basis / chunk.token_count as f64 } else { 1.0 };
    let entries = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (i as u32, c as f64 * scale))
        .collect();
    FeatureVector { dimension: vocab.len(), entries, label: chunk.label }
}

/// Concatenate a function-word vector with a POS vector from the same chunk:
/// POS indices are offset by the FW dimension, values are unchanged.
pub fn combine(fw_vec: &FeatureVector, pos_vec: &FeatureVector) -> Result<FeatureVector> {
    if fw_vec.label != pos_vec.label {
        return Err(Error::Data(
            "combining vectors with different labels; they must come from one chunk".into(),
        ));
    }
    let offset = fw_vec.dimension as u32;
    let mut entries = fw_vec.entries.clone();
    entries.extend(pos_vec.entries.iter().map(|&(i, v)| (i + offset, v)));
    Ok(FeatureVector {
        dimension: fw_vec.dimension + pos_vec.dimension,
        entries,
        label: fw_vec.label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunking::DirectionLabel;
    use crate::corpus::LanguagePair;
    use crate::text::TaggedSentence;

    fn chunk_of(token_lists: &[&[&str]], tag_lists: &[&[&str]]) -> Chunk {
        let pair = LanguagePair::new("fr").unwrap();
        let sentences: Vec<TaggedSentence> = token_lists
            .iter()
            .zip(tag_lists)
            .map(|(tokens, tags)| {
                TaggedSentence::new(
                    tokens.iter().map(|t| t.to_string()).collect(),
                    tags.iter().map(|t| t.to_string()).collect(),
                    "fr".into(),
                    pair.clone(),
                )
                .unwrap()
            })
            .collect();
        let token_count = sentences.iter().map(|s| s.token_count()).sum();
        Chunk {
            sentences,
            label: DirectionLabel::Translated,
            token_count,
            provenance: "fr-en".into(),
        }
    }

    #[test]
    fn builtin_list_is_well_formed() {
        let list = FunctionWordList::default_english();
        assert!((430..=500).contains(&list.len()), "unexpected size {}", list.len());
        assert!(list.words().contains(&"the".to_string()));
        assert_eq!(list.sha256().len(), 64);
    }

    #[test]
    fn fw_vector_scales_counts_to_basis() {
        // 10 tokens, "the" occurs 3 times: entry = 3 * 2000/10 = 600.
        let chunk = chunk_of(
            &[&["The", "cat", "saw", "the", "dog", "near", "the", "house", "this", "week"]],
            &[&["DT", "NN", "VB", "DT", "NN", "IN", "DT", "NN", "DT", "NN"]],
        );
        let list = FunctionWordList::default_english();
        let vec = fw_vector(&chunk, &list, 2000.0);
        let the_idx = list.words().iter().position(|w| w == "the").unwrap() as u32;
        let value = vec.entries.iter().find(|(i, _)| *i == the_idx).unwrap().1;
        assert!((value - 600.0).abs() < 1e-12);
    }

    #[test]
    fn fw_vector_without_function_words_is_empty() {
        let chunk = chunk_of(&[&["zebra", "quagga"]], &[&["NN", "NN"]]);
        let vec = fw_vector(&chunk, &FunctionWordList::default_english(), 2000.0);
        assert!(vec.entries.is_empty());
    }

    #[test]
    fn fw_vector_is_scale_invariant() {
        let chunk = chunk_of(
            &[&["the", "cat", "of", "it"], &["a", "dog", "and", "cat"]],
            &[&["DT", "NN", "IN", "PRP"], &["DT", "NN", "CC", "NN"]],
        );
        let mut doubled = chunk.clone();
        doubled.sentences.extend(chunk.sentences.clone());
        doubled.token_count *= 2;
        let list = FunctionWordList::default_english();
        let a = fw_vector(&chunk, &list, 2000.0);
        let b = fw_vector(&doubled, &list, 2000.0);
        assert_eq!(a.entries.len(), b.entries.len());
        for ((i, x), (j, y)) in a.entries.iter().zip(&b.entries) {
            assert_eq!(i, j);
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn top_k_orders_by_count_then_lexicographic() {
        let tags: &[&str] = &["DT", "NN", "VB"];
        let chunks: Vec<Chunk> =
            (0..100).map(|_| chunk_of(&[&["a", "b", "c"]], &[tags])).collect();
        let vocab = top_k_ngrams(&chunks, 2, 2).unwrap();
        assert_eq!(
            vocab.entries(),
            &[
                vec!["DT".to_string(), "NN".to_string()],
                vec!["NN".to_string(), "VB".to_string()]
            ]
        );
    }

    #[test]
    fn top_k_truncation_is_noop_when_k_exceeds_distinct() {
        let chunk = chunk_of(&[&["a", "b", "c"]], &[&["DT", "NN", "VB"]]);
        let vocab = top_k_ngrams([&chunk], 2, 400).unwrap();
        assert_eq!(vocab.len(), 2);
    }

    #[test]
    fn top_k_ties_break_lexicographically() {
        let chunk = chunk_of(&[&["a", "b"], &["c", "d"]], &[&["ZZ", "AA"], &["AA", "BB"]]);
        let vocab = top_k_ngrams([&chunk], 2, 2).unwrap();
        assert_eq!(
            vocab.entries(),
            &[
                vec!["AA".to_string(), "BB".to_string()],
                vec!["ZZ".to_string(), "AA".to_string()]
            ]
        );
    }

    #[test]
    fn top_k_zero_is_config_error() {
        let chunk = chunk_of(&[&["a"]], &[&["DT"]]);
        assert!(matches!(top_k_ngrams([&chunk], 2, 0), Err(Error::Config(_))));
    }

    #[test]
    fn pos_counts_match_sliding_window() {
        let chunk = chunk_of(&[&["a", "b", "c", "d", "e"]], &[&["DT", "NN", "VB", "DT", "NN"]]);
        let vocab =
            NgramVocab::new(2, 1, vec![vec!["DT".into(), "NN".into()]]).unwrap();
        let vec = pos_ngram_vector(&chunk, &vocab, false, 2000.0);
        assert_eq!(vec.entries, vec![(0, 2.0)]);
    }

    #[test]
    fn absent_vocab_entries_are_omitted() {
        let chunk = chunk_of(&[&["a", "b"]], &[&["NN", "NN"]]);
        let vocab =
            NgramVocab::new(2, 1, vec![vec!["DT".into(), "NN".into()]]).unwrap();
        assert!(pos_ngram_vector(&chunk, &vocab, false, 2000.0).entries.is_empty());
    }

    #[test]
    fn short_sentences_contribute_nothing() {
        let chunk = chunk_of(&[&["a"], &["b"]], &[&["DT"], &["NN"]]);
        let vocab =
            NgramVocab::new(2, 1, vec![vec!["DT".into(), "NN".into()]]).unwrap();
        // Per-sentence windows: no bigram crosses the boundary.
        assert!(pos_ngram_vector(&chunk, &vocab, false, 2000.0).entries.is_empty());
    }

    #[test]
    fn combine_offsets_indices() {
        let label = DirectionLabel::Translated;
        let fw = FeatureVector { dimension: 3, entries: vec![(0, 1.0)], label };
        let pos = FeatureVector { dimension: 2, entries: vec![(1, 4.0)], label };
        let combined = combine(&fw, &pos).unwrap();
        assert_eq!(combined.dimension, 5);
        assert_eq!(combined.entries, vec![(0, 1.0), (4, 4.0)]);

        let empty = FeatureVector { dimension: 2, entries: vec![], label };
        let widened = combine(&fw, &empty).unwrap();
        assert_eq!(widened.dimension, 5);
        assert_eq!(widened.entries, vec![(0, 1.0)]);
    }

    #[test]
    fn combine_rejects_label_mismatch() {
        let fw = FeatureVector {
            dimension: 1,
            entries: vec![],
            label: DirectionLabel::Original,
        };
        let pos = FeatureVector {
            dimension: 1,
            entries: vec![],
            label: DirectionLabel::Translated,
        };
        assert!(matches!(combine(&fw, &pos), Err(Error::Data(_))));
    }

    #[test]
    fn vocabulary_is_order_independent() {
        let chunks: Vec<Chunk> = vec![
            chunk_of(&[&["a", "b", "c"]], &[&["DT", "NN", "VB"]]),
            chunk_of(&[&["d", "e"]], &[&["IN", "DT"]]),
            chunk_of(&[&["f", "g", "h"]], &[&["NN", "VB", "IN"]]),
        ];
        let forward = top_k_ngrams(&chunks, 2, 10).unwrap();
        let reversed: Vec<&Chunk> = chunks.iter().rev().collect();
        let backward = top_k_ngrams(reversed, 2, 10).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn spec_validates_components_and_dimension() {
        let list = FunctionWordList::default_english();
        let vocab = NgramVocab::new(2, 1, vec![vec!["DT".into(), "NN".into()]]).unwrap();
        assert!(FeatureSpec::new(FeatureKind::Fw, None, None, 2000.0, false).is_err());
        assert!(FeatureSpec::new(FeatureKind::Pos2, None, None, 2000.0, false).is_err());
        assert!(FeatureSpec::new(
            FeatureKind::Pos3,
            None,
            Some(vocab.clone()),
            2000.0,
            false
        )
        .is_err());
        let spec = FeatureSpec::new(
            FeatureKind::FwPos2,
            Some(list.clone()),
            Some(vocab),
            2000.0,
            false,
        )
        .unwrap();
        assert_eq!(spec.dimension(), list.len() + 1);

        let chunk = chunk_of(&[&["the", "cat"]], &[&["DT", "NN"]]);
        let vec = spec.vectorize(&chunk);
        assert_eq!(vec.dimension, spec.dimension());
        assert!(vec.entries.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(vec.entries.iter().all(|&(i, _)| (i as usize) < vec.dimension));
    }
}
