//! Synthetic corpus generation with a controllable class signal.
//!
//! English sentences are sampled from a hidden Markov model over POS tags
//! with fixed per-tag word emissions. Original-class documents use the base
//! transition matrix; translated-class documents use a convex mix of the
//! base and a perturbation matrix, weighted by the divergence knob. Several
//! closed-class tags emit real English function words, so the class signal
//! shows up in function-word rates as well as in POS n-grams. Emissions are
//! class-independent and per-tag word sets are disjoint, which keeps the
//! corpus learnable by the built-in tagger and makes the Bayes bound
//! computable from transitions alone.

mod generate;
mod oracle;

pub use generate::{
    generate_corpus, generate_multi, generate_tagger_examples, GroundTruth, GroundTruthDoc,
};
pub use oracle::oracle_accuracy_bound;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chunking::DirectionLabel;
use crate::corpus::LanguagePair;
use crate::error::{Error, Result};
use crate::seed::scoped_rng;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Class divergence in [0, 1]: 0 makes both classes identical, 1 uses
    /// the perturbation matrix unmixed for the translated class.
    pub divergence: f64,
    pub docs_per_class: usize,
    pub sentences_per_doc: usize,
    pub mean_sentence_length: usize,
    /// Tag inventory; indexes the transition matrices.
    pub tags: Vec<String>,
    /// Base transition matrix (original class), row-stochastic.
    pub base_transitions: Vec<Vec<f64>>,
    /// Perturbation matrix blended in for the translated class.
    pub class_transitions: Vec<Vec<f64>>,
    /// Per-tag word emission tables, identical for both classes.
    pub emissions: BTreeMap<String, Vec<(String, f64)>>,
    pub pair: LanguagePair,
    pub seed: u64,
    /// Strength of a per-pair nuisance perturbation mixed into both classes
    /// alike, for experiments on pair-specific style variation. Zero by
    /// default.
    pub pair_nuisance: f64,
}

fn normalize_rows(raw: &[&[f64]]) -> Vec<Vec<f64>> {
    raw.iter()
        .map(|row| {
            let sum: f64 = row.iter().sum();
            row.iter().map(|w| w / sum).collect()
        })
        .collect()
}

fn normalize_weights(raw: &[(&str, f64)]) -> Vec<(String, f64)> {
    let sum: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.iter().map(|(word, w)| (word.to_string(), w / sum)).collect()
}

fn synthetic_words(prefix: &str, count: usize) -> Vec<(String, f64)> {
    // Zipf-ish weights so open-class vocabularies are not uniform.
    let raw: Vec<f64> = (0..count).map(|i| 1.0 / (1.0 + i as f64 * 0.15)).collect();
    let sum: f64 = raw.iter().sum();
    (0..count).map(|i| (format!("{prefix}{i:02}"), raw[i] / sum)).collect()
}

impl SynthConfig {
    /// A ready-to-use configuration: eight PTB-style tags, four of them
    /// closed-class tags emitting real English function words.
    pub fn default_for(pair: LanguagePair, seed: u64) -> Self {
        let tags: Vec<String> =
            ["DT", "IN", "PRP", "MD", "NN", "VB", "JJ", "RB"].iter().map(|t| t.to_string()).collect();

        // Row order matches `tags`. Raw preference weights, normalized below.
        let base: [&[f64]; 8] = [
            //        DT    IN    PRP   MD    NN    VB    JJ    RB
            &[0.05, 0.20, 0.20, 0.05, 6.00, 0.20, 3.00, 0.30], // DT ->
            &[4.50, 0.10, 1.50, 0.10, 2.50, 0.30, 0.80, 0.20], // IN ->
            &[0.30, 0.70, 0.30, 2.00, 0.50, 5.00, 0.20, 1.00], // PRP ->
            &[0.50, 0.30, 0.80, 0.10, 0.20, 6.00, 0.10, 2.00], // MD ->
            &[0.50, 3.00, 0.50, 0.80, 1.50, 2.50, 0.50, 0.70], // NN ->
            &[3.00, 2.00, 1.20, 0.50, 1.00, 0.50, 0.60, 1.20], // VB ->
            &[0.30, 0.90, 0.30, 0.20, 5.50, 0.40, 1.00, 0.40], // JJ ->
            &[0.90, 1.00, 0.30, 0.20, 0.60, 3.00, 2.00, 1.00], // RB ->
        ];
        let perturbed: [&[f64]; 8] = [
            &[0.50, 0.50, 0.20, 0.10, 3.00, 0.30, 5.00, 0.40], // DT ->
            &[1.50, 0.80, 2.50, 0.10, 4.00, 0.20, 0.50, 0.40], // IN ->
            &[0.30, 1.50, 0.40, 4.00, 0.40, 2.50, 0.10, 0.80], // PRP ->
            &[0.40, 0.50, 0.50, 0.20, 0.30, 3.00, 0.10, 4.00], // MD ->
            &[0.80, 2.00, 0.50, 1.50, 3.00, 1.00, 0.50, 0.70], // NN ->
            &[1.50, 3.50, 1.00, 0.50, 0.80, 0.70, 0.50, 1.50], // VB ->
            &[0.30, 1.20, 0.30, 0.10, 3.00, 0.50, 3.00, 0.60], // JJ ->
            &[0.60, 0.80, 0.40, 0.10, 0.60, 2.00, 2.50, 2.50], // RB ->
        ];

        let mut emissions = BTreeMap::new();
        emissions.insert(
            "DT".to_string(),
            normalize_weights(&[
                ("the", 10.0),
                ("a", 5.0),
                ("an", 1.0),
                ("this", 1.5),
                ("that", 1.5),
                ("these", 0.8),
                ("those", 0.7),
                ("each", 0.5),
                ("every", 0.5),
                ("some", 0.8),
                ("any", 0.7),
                ("no", 0.5),
                ("all", 0.8),
                ("both", 0.3),
                ("another", 0.3),
            ]),
        );
        emissions.insert(
            "IN".to_string(),
            normalize_weights(&[
                ("of", 9.0),
                ("in", 6.0),
                ("to", 5.0),
                ("for", 4.0),
                ("on", 3.5),
                ("with", 3.0),
                ("at", 2.5),
                ("by", 2.5),
                ("from", 2.0),
                ("as", 1.8),
                ("into", 1.0),
                ("about", 1.0),
                ("between", 0.8),
                ("through", 0.7),
                ("under", 0.5),
                ("after", 0.5),
                ("over", 0.5),
                ("during", 0.4),
                ("without", 0.4),
                ("within", 0.3),
            ]),
        );
        emissions.insert(
            "PRP".to_string(),
            normalize_weights(&[
                ("it", 3.0),
                ("we", 2.5),
                ("he", 2.0),
                ("they", 2.0),
                ("i", 2.0),
                ("she", 1.5),
                ("you", 1.5),
                ("them", 1.0),
                ("him", 0.8),
                ("her", 0.8),
                ("us", 0.7),
                ("me", 0.6),
            ]),
        );
        emissions.insert(
            "MD".to_string(),
            normalize_weights(&[
                ("will", 2.5),
                ("can", 2.0),
                ("would", 2.0),
                ("should", 1.5),
                ("could", 1.5),
                ("may", 1.5),
                ("must", 1.2),
                ("might", 0.8),
                ("shall", 0.7),
            ]),
        );
        emissions.insert("NN".to_string(), synthetic_words("item", 40));
        emissions.insert("VB".to_string(), synthetic_words("act", 30));
        emissions.insert("JJ".to_string(), synthetic_words("adj", 20));
        emissions.insert("RB".to_string(), synthetic_words("adv", 15));

        SynthConfig {
            divergence: 0.4,
            docs_per_class: 20,
            sentences_per_doc: 50,
            mean_sentence_length: 15,
            tags,
            base_transitions: normalize_rows(&base),
            class_transitions: normalize_rows(&perturbed),
            emissions,
            pair,
            seed,
            pair_nuisance: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.divergence) {
            return Err(Error::Config(format!(
                "divergence must be in [0, 1], got {}",
                self.divergence
            )));
        }
        if !(0.0..=1.0).contains(&self.pair_nuisance) {
            return Err(Error::Config(format!(
                "pair_nuisance must be in [0, 1], got {}",
                self.pair_nuisance
            )));
        }
        if self.docs_per_class == 0 || self.sentences_per_doc == 0 || self.mean_sentence_length == 0
        {
            return Err(Error::Config(
                "docs_per_class, sentences_per_doc, and mean_sentence_length must be positive"
                    .into(),
            ));
        }
        let n = self.tags.len();
        if n == 0 {
            return Err(Error::Config("tag inventory is empty".into()));
        }
        for (name, matrix) in [
            ("base_transitions", &self.base_transitions),
            ("class_transitions", &self.class_transitions),
        ] {
            if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                return Err(Error::Config(format!("{name} must be {n}x{n}")));
            }
            for (i, row) in matrix.iter().enumerate() {
                if row.iter().any(|p| *p < 0.0 || !p.is_finite()) {
                    return Err(Error::Config(format!("{name} row {i} has invalid entries")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::Config(format!(
                        "{name} row {i} sums to {sum}, not 1"
                    )));
                }
            }
        }
        for tag in &self.tags {
            let Some(table) = self.emissions.get(tag) else {
                return Err(Error::Config(format!("no emission table for tag {tag:?}")));
            };
            if table.is_empty() {
                return Err(Error::Config(format!("emission table for {tag:?} is empty")));
            }
            let sum: f64 = table.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Config(format!(
                    "emission table for {tag:?} sums to {sum}, not 1"
                )));
            }
            for (word, p) in table {
                if word.is_empty() || word.chars().any(char::is_whitespace) {
                    return Err(Error::Config(format!(
                        "emission word {word:?} for {tag:?} must be non-empty without whitespace"
                    )));
                }
                if *p < 0.0 || !p.is_finite() {
                    return Err(Error::Config(format!(
                        "emission probability for {word:?} is invalid"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Effective transition matrix of one class: the divergence mix for the
    /// translated class, then the per-pair nuisance mix for both alike.
    pub fn effective_transitions(&self, label: DirectionLabel) -> Vec<Vec<f64>> {
        let n = self.tags.len();
        let mix = |a: &[Vec<f64>], b: &[Vec<f64>], w: f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| (1.0 - w) * a[i][j] + w * b[i][j]).collect())
                .collect()
        };
        let class_matrix = match label {
            DirectionLabel::Original => self.base_transitions.clone(),
            DirectionLabel::Translated => {
                mix(&self.base_transitions, &self.class_transitions, self.divergence)
            }
        };
        if self.pair_nuisance > 0.0 {
            let nuisance = self.nuisance_matrix();
            mix(&class_matrix, &nuisance, self.pair_nuisance)
        } else {
            class_matrix
        }
    }

    /// The pair's nuisance matrix: a random row-stochastic matrix drawn from
    /// a stream scoped to (seed, pair), identical for both classes.
    fn nuisance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.tags.len();
        let mut rng = scoped_rng(self.seed, &["nuisance", &self.pair.code()]);
        (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|w| w / sum).collect()
            })
            .collect()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: SynthConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("synth config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("synth config serialize")
    }
}

/// Draw an index from a normalized categorical distribution.
pub(crate) fn sample_categorical(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let draw: f64 = rng.random();
    let mut cumulative = 0.0;
    for (idx, w) in weights.iter().enumerate() {
        cumulative += w;
        if draw < cumulative {
            return idx;
        }
    }
    weights.len() - 1
}
