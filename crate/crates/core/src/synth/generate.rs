//! Writing synthetic corpus trees.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::chunking::DirectionLabel;
use crate::corpus::format::XmlCorpusFormat;
use crate::corpus::{DocumentRecord, LanguagePair, Link, LinkRecord, Sentence};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, scoped_rng};
use crate::text::TaggedExample;

use super::{sample_categorical, SynthConfig};

/// Ground-truth labels of a generated corpus, sorted by relative path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub pair: String,
    pub docs: Vec<GroundTruthDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthDoc {
    pub relative_path: String,
    pub original_language: String,
    pub sentences: usize,
}

impl GroundTruth {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self).expect("ground truth serialize");
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&json).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }

    /// Total sentences across all documents.
    pub fn total_sentences(&self) -> usize {
        self.docs.iter().map(|d| d.sentences).sum()
    }
}

/// Sample one sentence: tag indices from the transition matrix, then a word
/// per tag from the emission tables.
fn sample_sentence(
    config: &SynthConfig,
    transitions: &[Vec<f64>],
    rng: &mut impl Rng,
) -> (Vec<String>, Vec<String>) {
    let poisson = Poisson::new(config.mean_sentence_length as f64)
        .expect("validated mean length");
    let raw_len = poisson.sample(rng) as usize;
    let length = raw_len.clamp(3, config.mean_sentence_length * 4);

    let n = config.tags.len();
    let uniform: Vec<f64> = vec![1.0 / n as f64; n];
    let mut state = sample_categorical(rng, &uniform);
    let mut tags = Vec::with_capacity(length);
    let mut words = Vec::with_capacity(length);
    for position in 0..length {
        if position > 0 {
            state = sample_categorical(rng, &transitions[state]);
        }
        let tag = &config.tags[state];
        let table = &config.emissions[tag];
        let word_idx = sample_categorical(rng, &table.iter().map(|(_, p)| *p).collect::<Vec<_>>());
        tags.push(tag.clone());
        words.push(table[word_idx].0.clone());
    }
    (words, tags)
}

fn pseudo_foreign(words: &[String], foreign: &str) -> String {
    // Placeholder transliteration; the foreign side is never featurized but
    // must exist so the derivation machinery has real files to align.
    words.iter().map(|w| format!("{foreign}:{w}")).collect::<Vec<_>>().join(" ")
}

/// Write a complete corpus tree (foreign documents, English documents, link
/// files) for one pair under `out_root`. Deterministic in the config.
pub fn generate_corpus(config: &SynthConfig, out_root: &Path) -> Result<GroundTruth> {
    config.validate()?;
    let foreign = config.pair.foreign().to_string();
    let pair_dir = config.pair.link_dir();

    let mut docs = Vec::new();
    for label in [DirectionLabel::Original, DirectionLabel::Translated] {
        let transitions = config.effective_transitions(label);
        let (class_char, original_language) = match label {
            DirectionLabel::Original => ('o', "en".to_string()),
            DirectionLabel::Translated => ('t', foreign.clone()),
        };
        for doc_idx in 0..config.docs_per_class {
            let mut rng = scoped_rng(
                config.seed,
                &["doc", &class_char.to_string(), &doc_idx.to_string()],
            );
            let relative = format!("synth/doc-{doc_idx:04}-{class_char}.xml");

            let mut english_sentences = Vec::with_capacity(config.sentences_per_doc);
            let mut foreign_sentences = Vec::with_capacity(config.sentences_per_doc);
            let mut links = Vec::with_capacity(config.sentences_per_doc);
            for sentence_idx in 0..config.sentences_per_doc {
                let (words, _) = sample_sentence(config, &transitions, &mut rng);
                let id = format!("s{}", sentence_idx + 1);
                english_sentences.push(Sentence {
                    id: id.clone(),
                    lang_tag: "en".into(),
                    text: words.join(" "),
                });
                foreign_sentences.push(Sentence {
                    id: id.clone(),
                    lang_tag: foreign.clone(),
                    text: pseudo_foreign(&words, &foreign),
                });
                links.push(Link { src: vec![id.clone()], trg: vec![id] });
            }

            let english_doc = DocumentRecord {
                relative_path: relative.clone(),
                language: "en".into(),
                declared_source_language: Some(original_language.clone()),
                sentences: english_sentences,
            };
            let foreign_doc = DocumentRecord {
                relative_path: relative.clone(),
                language: foreign.clone(),
                declared_source_language: Some(original_language.clone()),
                sentences: foreign_sentences,
            };
            let link_record = LinkRecord {
                src_doc: format!("{foreign}/{relative}"),
                trg_doc: format!("en/{relative}"),
                links,
            };

            let write = |rel: String, content: String| -> Result<()> {
                let path = out_root.join(rel);
                let parent = path.parent().expect("document paths have parents");
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                std::fs::write(&path, content).map_err(|e| Error::io(&path, e))
            };
            write(
                format!("{foreign}/{relative}"),
                XmlCorpusFormat::write_document(&foreign_doc),
            )?;
            write(format!("en/{relative}"), XmlCorpusFormat::write_document(&english_doc))?;
            let link_relative = relative.replace(".xml", ".lnk");
            write(
                format!("{pair_dir}/{link_relative}"),
                XmlCorpusFormat::write_links(&link_record),
            )?;

            docs.push(GroundTruthDoc {
                relative_path: relative,
                original_language: original_language.clone(),
                sentences: config.sentences_per_doc,
            });
        }
    }

    docs.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    Ok(GroundTruth { pair: config.pair.code(), docs })
}

/// Generate corpora for several pairs under one root. Each pair gets its
/// own seed derived from the base config's seed and the pair code, keeping
/// per-pair nuisance matrices distinct.
pub fn generate_multi(
    base: &SynthConfig,
    pairs: &[LanguagePair],
    out_root: &Path,
) -> Result<Vec<(LanguagePair, GroundTruth)>> {
    let mut results = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let config = SynthConfig {
            pair: pair.clone(),
            seed: derive_seed(base.seed, &["pair", &pair.code()]),
            ..base.clone()
        };
        let truth = generate_corpus(&config, out_root)?;
        results.push((pair.clone(), truth));
    }
    Ok(results)
}

/// Sample gold-tagged sentences from the base (original-class, no nuisance)
/// process, for training the POS tagger on the synthetic vocabulary.
pub fn generate_tagger_examples(config: &SynthConfig, sentences: usize) -> Result<Vec<TaggedExample>> {
    config.validate()?;
    let mut rng = scoped_rng(config.seed, &["tagger-corpus"]);
    let transitions = &config.base_transitions;
    Ok((0..sentences)
        .map(|_| sample_sentence(config, transitions, &mut rng))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::format::XmlCorpusFormat;
    use crate::corpus::{derive_pair_in_memory, LanguagePair};

    fn small_config() -> SynthConfig {
        let mut config = SynthConfig::default_for(LanguagePair::new("fr").unwrap(), 1);
        config.docs_per_class = 2;
        config.sentences_per_doc = 3;
        config
    }

    #[test]
    fn derivation_recovers_generated_labels() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let truth = generate_corpus(&config, dir.path()).unwrap();
        assert_eq!(truth.docs.len(), 4);

        let derivation =
            derive_pair_in_memory(dir.path(), &config.pair, &XmlCorpusFormat).unwrap();
        assert!(derivation.rejects.is_empty());
        assert_eq!(derivation.sentences.len(), 12);

        // Derivation emits documents in lexicographic path order; expand the
        // ground truth the same way and compare label sequences.
        let expected: Vec<String> = truth
            .docs
            .iter()
            .flat_map(|d| std::iter::repeat_n(d.original_language.clone(), d.sentences))
            .collect();
        let actual: Vec<String> =
            derivation.sentences.iter().map(|s| s.original_language.clone()).collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = small_config();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let truth_a = generate_corpus(&config, dir_a.path()).unwrap();
        let truth_b = generate_corpus(&config, dir_b.path()).unwrap();
        assert_eq!(truth_a, truth_b);

        for doc in &truth_a.docs {
            for side in ["fr", "en"] {
                let a = std::fs::read(dir_a.path().join(side).join(&doc.relative_path)).unwrap();
                let b = std::fs::read(dir_b.path().join(side).join(&doc.relative_path)).unwrap();
                assert_eq!(a, b, "{side}/{}", doc.relative_path);
            }
        }
    }

    #[test]
    fn tagger_examples_use_config_vocabulary() {
        let config = small_config();
        let examples = generate_tagger_examples(&config, 20).unwrap();
        assert_eq!(examples.len(), 20);
        for (tokens, tags) in &examples {
            assert_eq!(tokens.len(), tags.len());
            for (token, tag) in tokens.iter().zip(tags) {
                assert!(config.emissions[tag].iter().any(|(word, _)| word == token));
            }
        }
    }

    #[test]
    fn ground_truth_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let truth = generate_corpus(&config, dir.path()).unwrap();
        let path = dir.path().join("truth.json");
        truth.save(&path).unwrap();
        assert_eq!(GroundTruth::load(&path).unwrap(), truth);
    }
}
