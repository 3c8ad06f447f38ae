//! Linear classifiers trained with SGD, and their evaluation harness.
//!
//! Both logistic regression and a linear SVM (Pegasos-style hinge
//! subgradient steps) minimize their loss plus an L2 penalty
//! `(lambda/2)*||w||^2` under the learning-rate schedule
//! `eta_t = eta0 / (1 + eta0 * lambda * t)`. The bias is not regularized.
//! Sample order is reshuffled every epoch from a seeded stream, so training
//! is deterministic in (dataset order, hyperparameters).

mod cv;
mod sgd;

pub use cv::{
    cross_validate_chunks, cross_validate_vectors, stratified_folds, Confusion, CvReport,
    FoldFeaturizer,
};
pub use sgd::{train, train_with_loss_trace, LinearModel};

use serde::{Deserialize, Serialize};

use crate::chunking::DirectionLabel;
use crate::error::{Error, Result};

/// Which linear model to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Logistic,
    LinearSvm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::LinearSvm => "svm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ModelKind::Logistic),
            "svm" | "linear_svm" => Ok(ModelKind::LinearSvm),
            other => Err(Error::Config(format!(
                "unknown model kind {other:?} (expected logistic or svm)"
            ))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparams {
    pub model_kind: ModelKind,
    pub l2_lambda: f64,
    pub epochs: usize,
    pub learning_rate_eta0: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            model_kind: ModelKind::Logistic,
            l2_lambda: 1e-4,
            epochs: 20,
            learning_rate_eta0: 0.1,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.l2_lambda < 0.0 || !self.l2_lambda.is_finite() {
            return Err(Error::Config(format!(
                "l2_lambda must be non-negative, got {}",
                self.l2_lambda
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.learning_rate_eta0 <= 0.0 || !self.learning_rate_eta0.is_finite() {
            return Err(Error::Config(format!(
                "eta0 must be positive, got {}",
                self.learning_rate_eta0
            )));
        }
        Ok(())
    }
}

/// Fraction of exact matches between predictions and gold labels.
pub fn accuracy(predictions: &[DirectionLabel], golds: &[DirectionLabel]) -> Result<f64> {
    if predictions.len() != golds.len() || predictions.is_empty() {
        return Err(Error::Data(format!(
            "accuracy needs equal non-empty label lists, got {} and {}",
            predictions.len(),
            golds.len()
        )));
    }
    let correct = predictions.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(correct as f64 / predictions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_basics() {
        use DirectionLabel::{Original as O, Translated as T};
        assert_eq!(accuracy(&[T, O, T], &[T, O, T]).unwrap(), 1.0);
        // Alternating correct/incorrect over ten samples.
        let preds = [T, O, T, O, T, O, T, O, T, O];
        let golds = [T, T, T, T, T, T, T, T, T, T];
        assert_eq!(accuracy(&preds, &golds).unwrap(), 0.5);
        assert!(accuracy(&[T], &[]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }
}
