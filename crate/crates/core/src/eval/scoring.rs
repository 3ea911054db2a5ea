use std::collections::HashMap;

use serde::Serialize;

use super::EvalError;

pub fn accuracy<S: AsRef<str>>(predictions: &[S], truths: &[S]) -> Result<f64, EvalError> {
    if predictions.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let correct = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p.as_ref() == t.as_ref())
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// Rows are true labels, columns are predictions, both in `labels` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new<S: AsRef<str>>(
        predictions: &[S],
        truths: &[S],
        labels: &[String],
    ) -> Result<Self, EvalError> {
        if predictions.len() != truths.len() {
            return Err(EvalError::LengthMismatch {
                predictions: predictions.len(),
                truths: truths.len(),
            });
        }
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| EvalError::UnknownLabel(l.to_owned()))
        };
        let mut counts = vec![vec![0u64; labels.len()]; labels.len()];
        for (p, t) in predictions.iter().zip(truths) {
            counts[lookup(t.as_ref())?][lookup(p.as_ref())?] += 1;
        }
        Ok(ConfusionMatrix {
            labels: labels.to_vec(),
            counts,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `count(truth, prediction)` by label position.
    pub fn count(&self, truth: usize, prediction: usize) -> u64 {
        self.counts[truth][prediction]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// `trace / total`, or `None` for an empty matrix.
    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.trace() as f64 / total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Per-label precision, recall and F-beta. Every 0/0 is taken as 0.
pub fn precision_recall_fbeta(cm: &ConfusionMatrix, beta: f64) -> Vec<LabelScores> {
    let n = cm.labels.len();
    let b2 = beta * beta;
    (0..n)
        .map(|l| {
            let tp = cm.counts[l][l] as f64;
            let predicted: u64 = (0..n).map(|t| cm.counts[t][l]).sum();
            let actual: u64 = cm.counts[l].iter().sum();
            let precision = ratio(tp, predicted as f64);
            let recall = ratio(tp, actual as f64);
            let f_beta = ratio((1.0 + b2) * precision * recall, b2 * precision + recall);
            LabelScores {
                label: cm.labels[l].clone(),
                precision,
                recall,
                f_beta,
            }
        })
        .collect()
}
