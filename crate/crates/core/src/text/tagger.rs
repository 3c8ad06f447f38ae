//! Trainable averaged-perceptron POS tagger with greedy left-to-right
//! decoding.
//!
//! Features per token: the lowercased word, suffixes of length 1-3, the
//! first character, a word-shape code, the previous one and two tags, and
//! the neighboring words. Unseen words are covered by the suffix and shape
//! features, so tagging is total. Training shuffles sentences once per epoch
//! from a seeded stream and averages all intermediate weight vectors, which
//! makes the result deterministic in (corpus, epochs, seed).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from;

const MODEL_VERSION: u32 = 1;
const START: &str = "-START-";
const END: &str = "-END-";

/// A sentence paired with its gold tags, the unit of tagger training data.
pub type TaggedExample = (Vec<String>, Vec<String>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggerMetadata {
    pub corpus_id: String,
    pub epochs: u32,
    pub seed: u64,
}

/// A trained tagger. Weights are keyed by feature string, then tag; maps are
/// ordered so serialization is byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaggerModel {
    pub version: u32,
    weights: BTreeMap<String, BTreeMap<String, f64>>,
    tags: Vec<String>,
    pub metadata: TaggerMetadata,
}

fn word_shape(word: &str) -> String {
    let mut shape = String::new();
    for c in word.chars() {
        let mapped = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if shape.chars().next_back() != Some(mapped) {
            shape.push(mapped);
        }
    }
    shape
}

/// Context-independent features of the token at `idx` plus its neighbors.
/// `words` are the lowercased surfaces.
fn push_static_features(words: &[String], surfaces: &[String], idx: usize, out: &mut Vec<String>) {
    let word = &words[idx];
    out.push("b".to_string());
    out.push(format!("w={word}"));
    let chars: Vec<char> = word.chars().collect();
    for suffix_len in 1..=3usize {
        if chars.len() >= suffix_len {
            let suffix: String = chars[chars.len() - suffix_len..].iter().collect();
            out.push(format!("s{suffix_len}={suffix}"));
        }
    }
    if let Some(first) = chars.first() {
        out.push(format!("c0={first}"));
    }
    out.push(format!("sh={}", word_shape(&surfaces[idx])));
    let prev_word = if idx == 0 { START } else { &words[idx - 1] };
    let next_word = if idx + 1 == words.len() { END } else { &words[idx + 1] };
    out.push(format!("w-1={prev_word}"));
    out.push(format!("w+1={next_word}"));
}

fn push_tag_features(prev: &str, prev2: &str, out: &mut Vec<String>) {
    out.push(format!("t-1={prev}"));
    out.push(format!("t-2,t-1={prev2}|{prev}"));
}

impl TaggerModel {
    /// The tag inventory, sorted.
    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    fn score_into(&self, features: &[String], scores: &mut [f64]) {
        for feature in features {
            if let Some(by_tag) = self.weights.get(feature) {
                for (tag, weight) in by_tag {
                    // Tags in the weights are always in the inventory.
                    if let Ok(idx) = self.tags.binary_search(tag) {
                        scores[idx] += weight;
                    }
                }
            }
        }
    }

    /// Tag a tokenized sentence; returns exactly one tag per token. Ties are
    /// broken toward the lexicographically smallest tag, so decoding is
    /// deterministic.
    pub fn tag(&self, tokens: &[String]) -> Vec<String> {
        let surfaces: Vec<String> = tokens.to_vec();
        let words: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        let mut prev = START.to_string();
        let mut prev2 = START.to_string();
        let mut output = Vec::with_capacity(tokens.len());
        let mut features = Vec::with_capacity(12);
        let mut scores = vec![0.0; self.tags.len()];

        for idx in 0..tokens.len() {
            features.clear();
            push_static_features(&words, &surfaces, idx, &mut features);
            push_tag_features(&prev, &prev2, &mut features);
            scores.iter_mut().for_each(|s| *s = 0.0);
            self.score_into(&features, &mut scores);
            let best = argmax(&scores);
            let tag = self.tags[best].clone();
            prev2 = std::mem::replace(&mut prev, tag.clone());
            output.push(tag);
        }
        output
    }

    /// Token-level accuracy of this model on gold-tagged sentences.
    pub fn evaluate(&self, examples: &[TaggedExample]) -> f64 {
        let mut correct = 0usize;
        let mut total = 0usize;
        for (tokens, gold) in examples {
            let predicted = self.tag(tokens);
            correct += predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
            total += gold.len();
        }
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tagger model serialize")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: TaggerModel =
            serde_json::from_str(json).map_err(|e| Error::Data(format!("tagger model: {e}")))?;
        if model.version != MODEL_VERSION {
            return Err(Error::Data(format!(
                "unsupported tagger model version {}",
                model.version
            )));
        }
        if model.tags.is_empty() {
            return Err(Error::Data("tagger model has an empty tag inventory".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (idx, score) in scores.iter().enumerate().skip(1) {
        if *score > scores[best] {
            best = idx;
        }
    }
    best
}

#[derive(Default, Clone, Copy)]
struct WeightCell {
    weight: f64,
    total: f64,
    updated_at: u64,
}

struct Trainer {
    tags: Vec<String>,
    tag_ids: HashMap<String, usize>,
    // feature -> tag index -> running weight; the inner map is ordered so
    // score accumulation order (and thus float rounding) is reproducible.
    cells: HashMap<String, BTreeMap<usize, WeightCell>>,
    instances: u64,
}

impl Trainer {
    fn new(tags: Vec<String>) -> Self {
        let tag_ids = tags.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Trainer { tags, tag_ids, cells: HashMap::new(), instances: 0 }
    }

    fn predict(&self, features: &[String], scores: &mut [f64]) -> usize {
        scores.iter_mut().for_each(|s| *s = 0.0);
        for feature in features {
            if let Some(by_tag) = self.cells.get(feature) {
                for (&tag, cell) in by_tag {
                    scores[tag] += cell.weight;
                }
            }
        }
        argmax(scores)
    }

    fn bump(&mut self, feature: &str, tag: usize, delta: f64) {
        let cell = self
            .cells
            .entry(feature.to_string())
            .or_default()
            .entry(tag)
            .or_default();
        cell.total += (self.instances - cell.updated_at) as f64 * cell.weight;
        cell.updated_at = self.instances;
        cell.weight += delta;
    }

    fn update(&mut self, features: &[String], truth: usize, guess: usize) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        for feature in features {
            self.bump(feature, truth, 1.0);
            self.bump(feature, guess, -1.0);
        }
    }

    fn into_model(self, metadata: TaggerMetadata) -> TaggerModel {
        let mut weights: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        let denominator = self.instances.max(1) as f64;
        for (feature, by_tag) in self.cells {
            for (tag, cell) in by_tag {
                let total =
                    cell.total + (self.instances - cell.updated_at) as f64 * cell.weight;
                let averaged = total / denominator;
                if averaged.abs() < 1e-12 {
                    continue;
                }
                weights
                    .entry(feature.clone())
                    .or_default()
                    .insert(self.tags[tag].clone(), averaged);
            }
        }
        TaggerModel { version: MODEL_VERSION, weights, tags: self.tags, metadata }
    }
}

/// Train an averaged perceptron on gold-tagged sentences.
///
/// `dev` sentences, when given, are scored with the averaged model and the
/// accuracy is returned alongside it.
pub fn train_tagger_with_dev(
    corpus: &[TaggedExample],
    epochs: usize,
    seed: u64,
    corpus_id: &str,
    dev: Option<&[TaggedExample]>,
) -> Result<(TaggerModel, Option<f64>)> {
    if corpus.is_empty() {
        return Err(Error::Config("tagger training corpus is empty".into()));
    }
    if epochs == 0 {
        return Err(Error::Config("tagger training needs at least one epoch".into()));
    }
    let mut inventory = BTreeSet::new();
    for (i, (tokens, tags)) in corpus.iter().enumerate() {
        if tokens.len() != tags.len() {
            return Err(Error::Data(format!(
                "training sentence {}: {} tokens but {} tags",
                i + 1,
                tokens.len(),
                tags.len()
            )));
        }
        inventory.extend(tags.iter().cloned());
    }
    if inventory.is_empty() {
        return Err(Error::Config("tagger training corpus has no tagged tokens".into()));
    }

    let mut trainer = Trainer::new(inventory.into_iter().collect());
    let mut rng = rng_from(seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut features = Vec::with_capacity(12);
    let mut scores = vec![0.0; trainer.tags.len()];

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &sentence_idx in &order {
            let (tokens, gold) = &corpus[sentence_idx];
            if tokens.is_empty() {
                continue;
            }
            let surfaces = tokens;
            let words: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
            let mut prev = START.to_string();
            let mut prev2 = START.to_string();
            for idx in 0..tokens.len() {
                features.clear();
                push_static_features(&words, surfaces, idx, &mut features);
                push_tag_features(&prev, &prev2, &mut features);
                let guess = trainer.predict(&features, &mut scores);
                let truth = trainer.tag_ids[&gold[idx]];
                trainer.update(&features, truth, guess);
                // Condition the next step on the model's own prediction, as
                // it will be at decode time.
                let guess_tag = trainer.tags[guess].clone();
                prev2 = std::mem::replace(&mut prev, guess_tag);
            }
        }
    }

    let model = trainer.into_model(TaggerMetadata {
        corpus_id: corpus_id.to_string(),
        epochs: epochs as u32,
        seed,
    });
    let dev_accuracy = dev.map(|examples| model.evaluate(examples));
    Ok((model, dev_accuracy))
}

/// [`train_tagger_with_dev`] without a dev split.
pub fn train_tagger(
    corpus: &[TaggedExample],
    epochs: usize,
    seed: u64,
    corpus_id: &str,
) -> Result<TaggerModel> {
    train_tagger_with_dev(corpus, epochs, seed, corpus_id, None).map(|(model, _)| model)
}
