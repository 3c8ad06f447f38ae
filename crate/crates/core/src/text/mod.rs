//! Tokenization, POS tagging, and the tagged-sentence intermediate format.

mod io;
mod tagger;
mod tokenize;

pub use io::{
    load_pretagged, read_tagger_corpus_tsv, save_tagged, write_tagger_corpus_tsv,
};
pub use tagger::{
    train_tagger, train_tagger_with_dev, TaggedExample, TaggerMetadata, TaggerModel,
};
pub use tokenize::tokenize;

use serde::{Deserialize, Serialize};

use crate::corpus::LanguagePair;
use crate::error::{Error, Result};

/// A tokenized, tagged English sentence annotated with the language it was
/// originally authored in and the bilingual pair it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
    #[serde(rename = "origin")]
    pub origin_language: String,
    pub pair: LanguagePair,
}

impl TaggedSentence {
    pub fn new(
        tokens: Vec<String>,
        tags: Vec<String>,
        origin_language: String,
        pair: LanguagePair,
    ) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Data("tagged sentence has no tokens".into()));
        }
        if tokens.len() != tags.len() {
            return Err(Error::Data(format!(
                "tagged sentence has {} tokens but {} tags",
                tokens.len(),
                tags.len()
            )));
        }
        Ok(TaggedSentence { tokens, tags, origin_language, pair })
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// True when the sentence was originally authored in English.
    pub fn is_original_english(&self) -> bool {
        self.origin_language == "en"
    }
}

/// Tokenize and tag one aligned English sentence. Returns `None` for
/// sentences that tokenize to nothing.
pub fn tag_aligned_sentence(
    english_text: &str,
    origin_language: &str,
    pair: &LanguagePair,
    model: &TaggerModel,
) -> Option<TaggedSentence> {
    let tokens = tokenize(english_text);
    if tokens.is_empty() {
        return None;
    }
    let tags = model.tag(&tokens);
    Some(TaggedSentence {
        tokens,
        tags,
        origin_language: origin_language.to_string(),
        pair: pair.clone(),
    })
}
