//! Stratified k-fold cross-validation.
//!
//! Folds are assigned from a seeded stream, disjoint and jointly exhaustive,
//! with per-fold class counts within one sample of the global ratio. Folds
//! train in parallel on independently derived seeds; the report is a
//! deterministic function of (dataset order, k, hyperparameters).

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chunking::{Chunk, DirectionLabel};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::seed::{derive_seed, scoped_rng};

use super::sgd::train;
use super::{accuracy, Hyperparams};

/// Aggregated confusion counts over all test folds; translated is the
/// positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    fn record(&mut self, predicted: DirectionLabel, gold: DirectionLabel) {
        use DirectionLabel::{Original, Translated};
        match (predicted, gold) {
            (Translated, Translated) => self.tp += 1,
            (Translated, Original) => self.fp += 1,
            (Original, Original) => self.tn += 1,
            (Original, Translated) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    fn merge(&mut self, other: Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

/// Cross-validation result. `std` is the population standard deviation of
/// the per-fold accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub confusion: Confusion,
    pub seed: u64,
}

impl CvReport {
    fn from_folds(folds: Vec<(f64, Confusion)>, seed: u64) -> Self {
        let k = folds.len();
        let per_fold_accuracy: Vec<f64> = folds.iter().map(|(a, _)| *a).collect();
        let mean = per_fold_accuracy.iter().sum::<f64>() / k as f64;
        let variance = per_fold_accuracy
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / k as f64;
        let mut confusion = Confusion::default();
        for (_, fold) in folds {
            confusion.merge(fold);
        }
        CvReport { k, per_fold_accuracy, mean, std: variance.sqrt(), confusion, seed }
    }
}

/// Assign sample indices to `k` stratified folds. Each class's indices are
/// shuffled from the seeded stream and dealt round-robin, so every fold
/// holds `floor(c/k)` or `ceil(c/k)` samples of each class.
pub fn stratified_folds(
    labels: &[DirectionLabel],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("cross-validation needs k >= 2, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::Config(format!(
            "cannot split {} samples into {k} folds",
            labels.len()
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (idx, label) in labels.iter().enumerate() {
        by_class[label.as_index() as usize].push(idx);
    }
    for class in &by_class {
        if !class.is_empty() && class.len() < k {
            return Err(Error::Config(format!(
                "class with {} samples cannot be stratified into {k} folds",
                class.len()
            )));
        }
    }

    let mut rng = scoped_rng(seed, &["folds"]);
    let mut folds = vec![Vec::new(); k];
    for class in &mut by_class {
        class.shuffle(&mut rng);
        for (position, idx) in class.iter().enumerate() {
            folds[position % k].push(*idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

fn evaluate_fold(
    train_set: &[FeatureVector],
    test_set: &[FeatureVector],
    hp: &Hyperparams,
) -> Result<(f64, Confusion)> {
    let model = train(train_set, hp)?;
    let mut confusion = Confusion::default();
    let mut predictions = Vec::with_capacity(test_set.len());
    let mut golds = Vec::with_capacity(test_set.len());
    for x in test_set {
        let predicted = model.predict(x)?;
        confusion.record(predicted, x.label);
        predictions.push(predicted);
        golds.push(x.label);
    }
    Ok((accuracy(&predictions, &golds)?, confusion))
}

fn check_balanced(labels: &[DirectionLabel]) -> Result<()> {
    let translated = labels.iter().filter(|l| **l == DirectionLabel::Translated).count();
    if translated * 2 != labels.len() {
        return Err(Error::Config(format!(
            "dataset is not balanced: {translated} translated vs {} original",
            labels.len() - translated
        )));
    }
    Ok(())
}

/// Cross-validate pre-vectorized data. The dataset must be balanced (the
/// balancing step runs upstream).
pub fn cross_validate_vectors(
    data: &[FeatureVector],
    k: usize,
    hp: &Hyperparams,
) -> Result<CvReport> {
    let labels: Vec<DirectionLabel> = data.iter().map(|x| x.label).collect();
    check_balanced(&labels)?;
    let folds = stratified_folds(&labels, k, hp.seed)?;

    let results: Vec<Result<(f64, Confusion)>> = folds
        .par_iter()
        .enumerate()
        .map(|(fold_idx, test_indices)| {
            let in_test: Vec<bool> = {
                let mut mask = vec![false; data.len()];
                for &i in test_indices {
                    mask[i] = true;
                }
                mask
            };
            let train_set: Vec<FeatureVector> = data
                .iter()
                .enumerate()
                .filter(|(i, _)| !in_test[*i])
                .map(|(_, x)| x.clone())
                .collect();
            let test_set: Vec<FeatureVector> =
                test_indices.iter().map(|&i| data[i].clone()).collect();
            let fold_hp = Hyperparams {
                seed: derive_seed(hp.seed, &["fold", &fold_idx.to_string()]),
                ..hp.clone()
            };
            evaluate_fold(&train_set, &test_set, &fold_hp)
        })
        .collect();

    let folds: Vec<(f64, Confusion)> = results.into_iter().collect::<Result<_>>()?;
    Ok(CvReport::from_folds(folds, hp.seed))
}

/// Per-fold vectorization hook: anything that can fit its resources on the
/// training fold and vectorize both sides. Keeping vocabulary selection
/// inside the fold avoids leaking test counts into the feature space.
pub trait FoldFeaturizer: Sync {
    fn featurize(
        &self,
        train_chunks: &[&Chunk],
        test_chunks: &[&Chunk],
    ) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)>;
}

/// Cross-validate at the chunk level, refitting the feature pipeline per
/// fold through `featurizer`. The chunk set must be balanced.
pub fn cross_validate_chunks(
    chunks: &[Chunk],
    featurizer: &dyn FoldFeaturizer,
    k: usize,
    hp: &Hyperparams,
) -> Result<CvReport> {
    let labels: Vec<DirectionLabel> = chunks.iter().map(|c| c.label).collect();
    check_balanced(&labels)?;
    let folds = stratified_folds(&labels, k, hp.seed)?;

    let results: Vec<Result<(f64, Confusion)>> = folds
        .par_iter()
        .enumerate()
        .map(|(fold_idx, test_indices)| {
            let mut in_test = vec![false; chunks.len()];
            for &i in test_indices {
                in_test[i] = true;
            }
            let train_chunks: Vec<&Chunk> = chunks
                .iter()
                .enumerate()
                .filter(|(i, _)| !in_test[*i])
                .map(|(_, c)| c)
                .collect();
            let test_chunks: Vec<&Chunk> =
                test_indices.iter().map(|&i| &chunks[i]).collect();
            let (train_set, test_set) = featurizer.featurize(&train_chunks, &test_chunks)?;
            let fold_hp = Hyperparams {
                seed: derive_seed(hp.seed, &["fold", &fold_idx.to_string()]),
                ..hp.clone()
            };
            evaluate_fold(&train_set, &test_set, &fold_hp)
        })
        .collect();

    let folds: Vec<(f64, Confusion)> = results.into_iter().collect::<Result<_>>()?;
    Ok(CvReport::from_folds(folds, hp.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunking::DirectionLabel::{Original, Translated};
    use crate::seed::rng_from;
    use rand::Rng;

    fn balanced_labels(n: usize) -> Vec<DirectionLabel> {
        (0..n).map(|i| if i % 2 == 0 { Translated } else { Original }).collect()
    }

    #[test]
    fn folds_partition_the_dataset() {
        let labels = balanced_labels(100);
        let folds = stratified_folds(&labels, 10, 7).unwrap();
        assert_eq!(folds.len(), 10);
        let mut seen = vec![false; 100];
        for fold in &folds {
            assert_eq!(fold.len(), 10);
            let translated = fold.iter().filter(|&&i| labels[i] == Translated).count();
            assert_eq!(translated, 5);
            for &i in fold {
                assert!(!seen[i], "index {i} in two folds");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn folds_stratify_within_one_sample() {
        let mut rng = rng_from(99);
        for trial in 0..20 {
            let n = 20 + rng.random_range(0..80);
            let translated = 5 + rng.random_range(0..(n - 10));
            let labels: Vec<DirectionLabel> = (0..n)
                .map(|i| if i < translated { Translated } else { Original })
                .collect();
            let k = 5;
            if translated < k || n - translated < k {
                continue;
            }
            let folds = stratified_folds(&labels, k, trial).unwrap();
            for fold in &folds {
                let fold_translated =
                    fold.iter().filter(|&&i| labels[i] == Translated).count() as f64;
                let expected = translated as f64 * fold.len() as f64 / n as f64;
                assert!(
                    (fold_translated - expected).abs() <= 1.0 + 1e-9,
                    "fold ratio off by more than one sample"
                );
            }
        }
    }

    #[test]
    fn fold_count_errors() {
        let labels = balanced_labels(10);
        assert!(stratified_folds(&labels, 1, 0).is_err());
        assert!(stratified_folds(&labels, 6, 0).is_err()); // 5 per class < 6 folds
        assert!(stratified_folds(&labels[..0], 2, 0).is_err());
    }

    fn separable_vectors(n: usize) -> Vec<FeatureVector> {
        (0..n)
            .map(|i| {
                let positive = i % 2 == 0;
                FeatureVector {
                    dimension: 2,
                    entries: vec![
                        (0, if positive { 1.0 } else { -1.0 }),
                        (1, (i % 7) as f64 * 0.01),
                    ],
                    label: if positive { Translated } else { Original },
                }
            })
            .collect()
    }

    #[test]
    fn cv_on_separable_data_is_accurate_and_deterministic() {
        let data = separable_vectors(60);
        let hp = Hyperparams { seed: 13, ..Default::default() };
        let report = cross_validate_vectors(&data, 10, &hp).unwrap();
        assert!(report.mean >= 0.95, "mean {}", report.mean);
        assert_eq!(report.per_fold_accuracy.len(), 10);
        assert_eq!(report.confusion.total(), 60);

        let again = cross_validate_vectors(&data, 10, &hp).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn cv_rejects_unbalanced_data() {
        let mut data = separable_vectors(60);
        data.truncate(59);
        let hp = Hyperparams::default();
        assert!(matches!(
            cross_validate_vectors(&data, 10, &hp),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn permuted_labels_give_chance_level() {
        // Random features, labels carry no signal: median CV accuracy over
        // 10 seeded repetitions must sit in [0.40, 0.60].
        let mut medians = Vec::new();
        for repetition in 0..10u64 {
            let mut rng = rng_from(1000 + repetition);
            let data: Vec<FeatureVector> = (0..100)
                .map(|i| FeatureVector {
                    dimension: 8,
                    entries: (0..8u32)
                        .map(|j| (j, rng.random_range(-1.0..1.0)))
                        .collect(),
                    label: if i % 2 == 0 { Translated } else { Original },
                })
                .collect();
            let hp = Hyperparams { seed: repetition, ..Default::default() };
            let report = cross_validate_vectors(&data, 10, &hp).unwrap();
            medians.push(report.mean);
        }
        medians.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = (medians[4] + medians[5]) / 2.0;
        assert!((0.40..=0.60).contains(&median), "median accuracy {median}");
    }
}
