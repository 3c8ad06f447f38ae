//! SGD training of linear models over sparse vectors.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::chunking::DirectionLabel;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::seed::rng_from;

use super::{Hyperparams, ModelKind};

/// A trained linear decision function `w . x + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Hash of the feature manifest the training data was produced with,
    /// when known; guards against scoring vectors from another spec.
    pub spec_hash: String,
    pub hyperparams: Hyperparams,
}

impl LinearModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Raw margin `w . x + b`.
    pub fn decision(&self, x: &FeatureVector) -> Result<f64> {
        if x.dimension != self.weights.len() {
            return Err(Error::Data(format!(
                "vector dimension {} does not match model dimension {}",
                x.dimension,
                self.weights.len()
            )));
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// Predicted label: translated iff the margin is strictly positive;
    /// an exact tie resolves to original.
    pub fn predict(&self, x: &FeatureVector) -> Result<DirectionLabel> {
        Ok(if self.decision(x)? > 0.0 {
            DirectionLabel::Translated
        } else {
            DirectionLabel::Original
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("model serialize");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&json).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }
}

fn validate_dataset(data: &[FeatureVector]) -> Result<usize> {
    let Some(first) = data.first() else {
        return Err(Error::Config("training dataset is empty".into()));
    };
    let dimension = first.dimension;
    for (i, x) in data.iter().enumerate() {
        if x.dimension != dimension {
            return Err(Error::Data(format!(
                "sample {i} has dimension {} but the dataset has {dimension}",
                x.dimension
            )));
        }
    }
    let translated = data.iter().filter(|x| x.label == DirectionLabel::Translated).count();
    if translated == 0 || translated == data.len() {
        return Err(Error::Config(
            "training dataset must contain both classes".into(),
        ));
    }
    Ok(dimension)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Unpenalized mean training loss (log-loss or hinge) of a model on data.
fn mean_loss(weights: &[f64], bias: f64, data: &[FeatureVector], kind: ModelKind) -> f64 {
    let mut total = 0.0;
    for x in data {
        let margin = x.dot(weights) + bias;
        total += match kind {
            ModelKind::Logistic => {
                let y = f64::from(x.label.as_index());
                // log(1 + exp(-s)) with the stable split on the sign of s,
                // where s = margin if y=1 else -margin.
                let s = if y > 0.5 { margin } else { -margin };
                if s > 0.0 {
                    (-s).exp().ln_1p()
                } else {
                    -s + s.exp().ln_1p()
                }
            }
            ModelKind::LinearSvm => {
                let y = if x.label == DirectionLabel::Translated { 1.0 } else { -1.0 };
                (1.0 - y * margin).max(0.0)
            }
        };
    }
    total / data.len() as f64
}

fn run_sgd(
    data: &[FeatureVector],
    hp: &Hyperparams,
    mut after_epoch: impl FnMut(&[f64], f64),
) -> Result<LinearModel> {
    hp.validate()?;
    let dimension = validate_dataset(data)?;

    let mut weights = vec![0.0f64; dimension];
    let mut bias = 0.0f64;
    let mut rng = rng_from(hp.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let eta0 = hp.learning_rate_eta0;
    let lambda = hp.l2_lambda;
    let mut t = 0u64;

    for _ in 0..hp.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let x = &data[idx];
            let eta = eta0 / (1.0 + eta0 * lambda * t as f64);
            // L2 shrink applies to the weights only, never the bias.
            if lambda > 0.0 {
                let shrink = 1.0 - eta * lambda;
                for w in weights.iter_mut() {
                    *w *= shrink;
                }
            }
            match hp.model_kind {
                ModelKind::Logistic => {
                    let margin = x.dot(&weights) + bias;
                    let y = f64::from(x.label.as_index());
                    let gradient = sigmoid(margin) - y;
                    for &(i, v) in &x.entries {
                        weights[i as usize] -= eta * gradient * v;
                    }
                    bias -= eta * gradient;
                }
                ModelKind::LinearSvm => {
                    let y = if x.label == DirectionLabel::Translated { 1.0 } else { -1.0 };
                    let margin = y * (x.dot(&weights) + bias);
                    if margin < 1.0 {
                        for &(i, v) in &x.entries {
                            weights[i as usize] += eta * y * v;
                        }
                        bias += eta * y;
                    }
                }
            }
            t += 1;
        }
        after_epoch(&weights, bias);
    }

    Ok(LinearModel {
        weights,
        bias,
        spec_hash: String::new(),
        hyperparams: hp.clone(),
    })
}

/// Train a linear model with SGD. Deterministic in (dataset order, hp).
pub fn train(data: &[FeatureVector], hp: &Hyperparams) -> Result<LinearModel> {
    run_sgd(data, hp, |_, _| {})
}

/// Like [`train`], additionally recording the unpenalized mean training
/// loss after every epoch.
pub fn train_with_loss_trace(
    data: &[FeatureVector],
    hp: &Hyperparams,
) -> Result<(LinearModel, Vec<f64>)> {
    let mut trace = Vec::with_capacity(hp.epochs);
    let kind = hp.model_kind;
    let model = run_sgd(data, hp, |weights, bias| {
        trace.push(mean_loss(weights, bias, data, kind));
    })?;
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunking::DirectionLabel::{Original, Translated};

    /// Linearly separable 2-D set: class is the sign of x0.
    fn separable(n: usize) -> Vec<FeatureVector> {
        (0..n)
            .map(|i| {
                let positive = i % 2 == 0;
                let x0 = if positive { 1.0 + (i % 5) as f64 * 0.1 } else { -1.0 - (i % 5) as f64 * 0.1 };
                FeatureVector {
                    dimension: 2,
                    entries: vec![(0, x0), (1, (i % 3) as f64 * 0.01)],
                    label: if positive { Translated } else { Original },
                }
            })
            .collect()
    }

    #[test]
    fn separable_data_is_fit_perfectly() {
        for kind in [ModelKind::Logistic, ModelKind::LinearSvm] {
            let data = separable(40);
            let hp = Hyperparams { model_kind: kind, seed: 3, ..Default::default() };
            let model = train(&data, &hp).unwrap();
            let predictions: Vec<_> =
                data.iter().map(|x| model.predict(x).unwrap()).collect();
            let golds: Vec<_> = data.iter().map(|x| x.label).collect();
            assert_eq!(super::super::accuracy(&predictions, &golds).unwrap(), 1.0, "{kind}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable(30);
        let hp = Hyperparams { seed: 11, ..Default::default() };
        let a = train(&data, &hp).unwrap();
        let b = train(&data, &hp).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn zero_model_predicts_original_on_tie() {
        let model = LinearModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            spec_hash: String::new(),
            hyperparams: Hyperparams::default(),
        };
        let x = FeatureVector { dimension: 2, entries: vec![(0, 5.0)], label: Original };
        assert_eq!(model.predict(&x).unwrap(), Original);
    }

    #[test]
    fn positive_margin_predicts_translated() {
        let model = LinearModel {
            weights: vec![1.0],
            bias: 0.0,
            spec_hash: String::new(),
            hyperparams: Hyperparams::default(),
        };
        let x = FeatureVector { dimension: 1, entries: vec![(0, 2.0)], label: Original };
        assert_eq!(model.predict(&x).unwrap(), Translated);
    }

    #[test]
    fn predict_agrees_with_dense_dot_product() {
        let mut rng_state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        let dim = 25;
        let model = LinearModel {
            weights: (0..dim).map(|_| next() * 2.0 - 1.0).collect(),
            bias: next() - 0.5,
            spec_hash: String::new(),
            hyperparams: Hyperparams::default(),
        };
        for _ in 0..200 {
            let mut entries: Vec<(u32, f64)> = Vec::new();
            for i in 0..dim as u32 {
                if next() < 0.3 {
                    entries.push((i, next() * 4.0 - 2.0));
                }
            }
            let x = FeatureVector { dimension: dim, entries, label: Original };
            let mut dense = vec![0.0; dim];
            for &(i, v) in &x.entries {
                dense[i as usize] = v;
            }
            let brute: f64 =
                dense.iter().zip(&model.weights).map(|(a, b)| a * b).sum::<f64>() + model.bias;
            let predicted = model.predict(&x).unwrap();
            let expected = if brute > 0.0 { Translated } else { Original };
            assert_eq!(predicted, expected);
            assert!((model.decision(&x).unwrap() - brute).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_weights_preserves_decisions() {
        let data = separable(20);
        let hp = Hyperparams::default();
        let model = train(&data, &hp).unwrap();
        let scaled = LinearModel {
            weights: model.weights.iter().map(|w| w * 7.5).collect(),
            bias: model.bias * 7.5,
            spec_hash: String::new(),
            hyperparams: hp,
        };
        for x in &data {
            assert_eq!(model.predict(x).unwrap(), scaled.predict(x).unwrap());
        }
    }

    #[test]
    fn loss_is_non_increasing_for_small_eta0() {
        let data = separable(40);
        let hp = Hyperparams {
            learning_rate_eta0: 0.01,
            epochs: 15,
            seed: 5,
            ..Default::default()
        };
        let (_, trace) = train_with_loss_trace(&data, &hp).unwrap();
        assert_eq!(trace.len(), 15);
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "loss increased: {trace:?}");
        }
    }

    #[test]
    fn degenerate_datasets_are_rejected() {
        assert!(matches!(train(&[], &Hyperparams::default()), Err(Error::Config(_))));

        let single_class: Vec<FeatureVector> = (0..4)
            .map(|_| FeatureVector { dimension: 1, entries: vec![(0, 1.0)], label: Translated })
            .collect();
        assert!(matches!(train(&single_class, &Hyperparams::default()), Err(Error::Config(_))));

        let mixed_dims = vec![
            FeatureVector { dimension: 1, entries: vec![(0, 1.0)], label: Translated },
            FeatureVector { dimension: 2, entries: vec![(0, 1.0)], label: Original },
        ];
        assert!(matches!(train(&mixed_dims, &Hyperparams::default()), Err(Error::Data(_))));
    }

    #[test]
    fn dimension_mismatch_on_predict_is_data_error() {
        let model = LinearModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            spec_hash: String::new(),
            hyperparams: Hyperparams::default(),
        };
        let x = FeatureVector { dimension: 2, entries: vec![], label: Original };
        assert!(matches!(model.predict(&x), Err(Error::Data(_))));
    }
}
