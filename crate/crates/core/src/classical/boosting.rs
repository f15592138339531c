//! Gradient boosting with logistic loss and Newton leaf values.

use serde::{Deserialize, Serialize};

use super::tree::{grow_regression_tree, RegressionTree, SortedColumns};
use super::{check_dims, Classifier, Proba};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostingConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        BoostingConfig {
            n_rounds: 100,
            learning_rate: 0.1,
            max_depth: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbModel {
    /// Log-odds of class 1 in the training labels.
    pub(crate) prior_log_odds: f64,
    pub(crate) learning_rate: f64,
    pub(crate) max_depth: usize,
    pub(crate) trees: Vec<RegressionTree>,
    pub(crate) n_features: usize,
    pub(crate) train_loss: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn log_loss(y: &[f64], p: &[f64]) -> f64 {
    let eps = 1e-300;
    let total: f64 = y
        .iter()
        .zip(p)
        .map(|(&t, &q)| -(t * q.max(eps).ln() + (1.0 - t) * (1.0 - q).max(eps).ln()))
        .sum();
    total / y.len() as f64
}

pub fn train_gradient_boosting(
    x: &FeatureMatrix,
    y: &[usize],
    config: &BoostingConfig,
) -> Result<GbModel> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidInput(format!(
            "label index {bad} out of range"
        )));
    }
    let n1 = y.iter().filter(|&&l| l == 1).count();
    let n0 = y.len() - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass);
    }
    if !(config.learning_rate > 0.0) || config.max_depth == 0 {
        return Err(Error::Config(
            "boosting needs a positive learning rate and max depth".into(),
        ));
    }
    x.check_finite()?;

    let target: Vec<f64> = y.iter().map(|&l| l as f64).collect();
    let prior_log_odds = (n1 as f64 / n0 as f64).ln();
    let sorted = SortedColumns::new(x);
    let mut score = vec![prior_log_odds; y.len()];
    let mut prob: Vec<f64> = score.iter().map(|&f| sigmoid(f)).collect();
    let mut train_loss = vec![log_loss(&target, &prob)];
    let mut trees = Vec::with_capacity(config.n_rounds);

    for _ in 0..config.n_rounds {
        let residual: Vec<f64> = target.iter().zip(&prob).map(|(t, p)| t - p).collect();
        let tree = grow_regression_tree(x, &sorted, &residual, config.max_depth, |members| {
            let num: f64 = members.iter().map(|&s| residual[s]).sum();
            let den: f64 = members.iter().map(|&s| prob[s] * (1.0 - prob[s])).sum();
            if den.abs() < 1e-150 {
                0.0
            } else {
                num / den
            }
        });
        for (i, f) in score.iter_mut().enumerate() {
            *f += config.learning_rate * tree.leaf_for(x.row(i));
        }
        prob = score.iter().map(|&f| sigmoid(f)).collect();
        train_loss.push(log_loss(&target, &prob));
        trees.push(tree);
    }

    Ok(GbModel {
        prior_log_odds,
        learning_rate: config.learning_rate,
        max_depth: config.max_depth,
        trees,
        n_features: x.cols(),
        train_loss,
    })
}

impl GbModel {
    pub fn n_rounds(&self) -> usize {
        self.trees.len()
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn prior_log_odds(&self) -> f64 {
        self.prior_log_odds
    }

    /// Mean training log-loss before the first round and after each round.
    pub fn training_loss(&self) -> &[f64] {
        &self.train_loss
    }

    pub fn raw_score(&self, row: &[f64]) -> f64 {
        self.trees.iter().fold(self.prior_log_odds, |f, t| {
            f + self.learning_rate * t.leaf_for(row)
        })
    }

    /// Model truncated to its first `rounds` trees.
    pub fn truncated(&self, rounds: usize) -> GbModel {
        GbModel {
            trees: self.trees[..rounds.min(self.trees.len())].to_vec(),
            train_loss: self.train_loss[..=rounds.min(self.trees.len())].to_vec(),
            ..self.clone()
        }
    }
}

impl Classifier for GbModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>> {
        check_dims(self.n_features, x)?;
        Ok(x.iter_rows()
            .map(|r| {
                let p1 = sigmoid(self.raw_score(r));
                [1.0 - p1, p1]
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (FeatureMatrix, Vec<usize>) {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                vec![
                    (i as f64 * 0.7).sin(),
                    (i as f64 * 1.3).cos(),
                    i as f64 / 30.0,
                ]
            })
            .collect();
        let y = (0..30).map(|i| usize::from((i * 7) % 5 < 2)).collect();
        (FeatureMatrix::from_rows(rows).unwrap(), y)
    }

    #[test]
    fn zero_rounds_predicts_prior() {
        let (x, y) = data();
        let cfg = BoostingConfig {
            n_rounds: 0,
            ..BoostingConfig::default()
        };
        let m = train_gradient_boosting(&x, &y, &cfg).unwrap();
        let prior = y.iter().filter(|&&l| l == 1).count() as f64 / y.len() as f64;
        for p in m.predict_proba(&x).unwrap() {
            assert!((p[1] - prior).abs() <= 2.0 * f64::EPSILON);
        }
    }

    #[test]
    fn balanced_prior_is_zero() {
        let x = FeatureMatrix::from_rows((0..800).map(|i| vec![i as f64]).collect()).unwrap();
        let y: Vec<usize> = (0..800).map(|i| i % 2).collect();
        let cfg = BoostingConfig {
            n_rounds: 1,
            ..BoostingConfig::default()
        };
        let m = train_gradient_boosting(&x, &y, &cfg).unwrap();
        assert_eq!(m.prior_log_odds(), 0.0);
    }

    #[test]
    fn loss_never_increases() {
        let (x, y) = data();
        let m = train_gradient_boosting(&x, &y, &BoostingConfig::default()).unwrap();
        assert_eq!(m.n_rounds(), 100);
        assert_eq!(m.training_loss().len(), 101);
        for w in m.training_loss().windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
        }
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn single_class_rejected() {
        let (x, _) = data();
        assert!(matches!(
            train_gradient_boosting(&x, &[0; 30], &BoostingConfig::default()),
            Err(Error::SingleClass)
        ));
    }
}
