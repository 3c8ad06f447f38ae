//! Monte-Carlo estimate of the Bayes-optimal chunk classification accuracy.
//!
//! Emissions are class-independent, so the likelihood ratio of a chunk under
//! the two class processes reduces to its tag-transition terms (initial-state
//! and emission terms cancel). Chunks are sampled from the true per-class
//! processes and scored with the exact log-likelihood ratio; no learned
//! classifier over any feature of the text can beat this in expectation.

use crate::chunking::DirectionLabel;
use crate::seed::scoped_rng;

use super::{sample_categorical, SynthConfig};

fn log_ratio_matrix(t_translated: &[Vec<f64>], t_original: &[Vec<f64>]) -> Vec<Vec<f64>> {
    t_translated
        .iter()
        .zip(t_original)
        .map(|(row_t, row_o)| {
            row_t
                .iter()
                .zip(row_o)
                .map(|(&p_t, &p_o)| match (p_t > 0.0, p_o > 0.0) {
                    (true, true) => (p_t / p_o).ln(),
                    (true, false) => f64::INFINITY,
                    (false, true) => f64::NEG_INFINITY,
                    // Unreachable for observed transitions: a sampled
                    // transition has positive probability under its class.
                    (false, false) => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Estimate the Bayes-optimal accuracy for classifying chunks of about
/// `chunk_tokens` tokens, from `n_chunks` Monte-Carlo samples (balanced
/// across classes, seeded from the config). Returns a value in [0.5, 1].
pub fn oracle_accuracy_bound(config: &SynthConfig, chunk_tokens: usize, n_chunks: usize) -> f64 {
    let t_original = config.effective_transitions(DirectionLabel::Original);
    let t_translated = config.effective_transitions(DirectionLabel::Translated);
    let llr = log_ratio_matrix(&t_translated, &t_original);

    let mut rng = scoped_rng(config.seed, &["oracle"]);
    let n = config.tags.len();
    let uniform = vec![1.0 / n as f64; n];
    let poisson = rand_distr::Poisson::new(config.mean_sentence_length as f64)
        .expect("validated mean length");

    let mut credit = 0.0f64;
    for chunk_idx in 0..n_chunks {
        let label = if chunk_idx % 2 == 0 {
            DirectionLabel::Original
        } else {
            DirectionLabel::Translated
        };
        let transitions =
            if label == DirectionLabel::Translated { &t_translated } else { &t_original };

        let mut chunk_llr = 0.0f64;
        let mut tokens = 0usize;
        while tokens < chunk_tokens {
            let raw_len = rand_distr::Distribution::sample(&poisson, &mut rng) as usize;
            let length = raw_len.clamp(3, config.mean_sentence_length * 4);
            let mut state = sample_categorical(&mut rng, &uniform);
            for _ in 1..length {
                let next = sample_categorical(&mut rng, &transitions[state]);
                chunk_llr += llr[state][next];
                state = next;
            }
            tokens += length;
        }

        if chunk_llr == 0.0 {
            credit += 0.5;
        } else if (chunk_llr > 0.0) == (label == DirectionLabel::Translated) {
            credit += 1.0;
        }
    }

    (credit / n_chunks as f64).max(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LanguagePair;

    fn config(divergence: f64) -> SynthConfig {
        let mut config = SynthConfig::default_for(LanguagePair::new("fr").unwrap(), 1);
        config.divergence = divergence;
        config
    }

    #[test]
    fn zero_divergence_is_chance_level() {
        let bound = oracle_accuracy_bound(&config(0.0), 2000, 1200);
        assert!((0.48..=0.52).contains(&bound), "bound {bound}");
    }

    #[test]
    fn disjoint_support_is_fully_separable() {
        // A two-tag perturbation whose support is disjoint from the base:
        // the base always stays in place, the perturbed chain always moves.
        let mut cfg = config(1.0);
        cfg.tags = vec!["A".into(), "B".into()];
        cfg.base_transitions = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        cfg.class_transitions = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        cfg.emissions = [
            ("A".to_string(), vec![("alpha".to_string(), 1.0)]),
            ("B".to_string(), vec![("beta".to_string(), 1.0)]),
        ]
        .into_iter()
        .collect();
        let bound = oracle_accuracy_bound(&cfg, 200, 1000);
        assert!(bound >= 0.99, "bound {bound}");
    }

    #[test]
    fn bound_is_monotone_in_divergence() {
        let mut last = 0.0;
        for divergence in [0.0, 0.1, 0.3, 0.6, 1.0] {
            // Shared seed: all runs draw common random numbers.
            let bound = oracle_accuracy_bound(&config(divergence), 500, 1000);
            assert!(
                bound >= last - 1e-12,
                "bound decreased at divergence {divergence}: {bound} < {last}"
            );
            assert!((0.5..=1.0).contains(&bound));
            last = bound;
        }
        assert!(last >= 0.99, "full divergence should be near-perfect, got {last}");
    }
}
