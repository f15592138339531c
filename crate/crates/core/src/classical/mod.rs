//! Classical classifiers over fused feature matrices: kernel SVM with grid
//! search, random forest, gradient boosting and a soft-voting ensemble.

mod boosting;
mod cv;
mod forest;
mod kernel;
mod smo;
mod svm;
mod tree;

pub use boosting::{train_gradient_boosting, BoostingConfig, GbModel};
pub use cv::{
    cross_validate, stratified_folds, svm_grid_search, CvEntry, CvResult, Scoring, SvmGrid,
};
pub use forest::{sqrt_features, train_random_forest, ForestModel};
pub use kernel::{Gamma, Kernel, SvmParams, COEF0, POLY_DEGREE};
pub use svm::{train_svm, Platt, SvmModel};
pub use tree::{ClassCounts, ClassTree, Node, RegressionTree, Tree};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Probabilities of `[AI, HUMAN]`.
pub type Proba = [f64; 2];

/// Index of the largest entry; ties go to the lower index.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_dims(expected: usize, x: &FeatureMatrix) -> Result<()> {
    if x.cols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.cols(),
        });
    }
    Ok(())
}

/// Uniform prediction surface over every trained model.
pub trait Classifier: Send + Sync {
    fn n_features(&self) -> usize;

    /// One probability pair per row, each summing to one.
    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>>;

    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        Ok(self.predict_proba(x)?.iter().map(|p| argmax(p)).collect())
    }
}

/// Unweighted mean of the members' probabilities.
pub fn soft_vote(
    members: &[&dyn Classifier],
    x: &FeatureMatrix,
) -> Result<(Vec<Proba>, Vec<usize>)> {
    if members.len() < 2 {
        return Err(Error::InvalidInput(
            "soft voting needs at least two members".into(),
        ));
    }
    let d = members[0].n_features();
    if let Some(m) = members.iter().find(|m| m.n_features() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: m.n_features(),
        });
    }
    let mut sum = vec![[0.0; 2]; x.rows()];
    for m in members {
        for (s, p) in sum.iter_mut().zip(m.predict_proba(x)?) {
            s[0] += p[0];
            s[1] += p[1];
        }
    }
    let k = members.len() as f64;
    let probs: Vec<Proba> = sum.into_iter().map(|s| [s[0] / k, s[1] / k]).collect();
    let labels = probs.iter().map(|p| argmax(p)).collect();
    Ok((probs, labels))
}

/// Random forest and gradient boosting combined by soft voting.
#[derive(Clone, Debug, PartialEq)]
pub struct VotingModel {
    pub forest: ForestModel,
    pub boosting: GbModel,
}

impl Classifier for VotingModel {
    fn n_features(&self) -> usize {
        self.forest.n_features()
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>> {
        soft_vote(&[&self.forest, &self.boosting], x).map(|(p, _)| p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Svm(SvmModel),
    Forest(ForestModel),
    Boosting(GbModel),
    Voting(VotingModel),
}

impl TrainedModel {
    fn inner(&self) -> &dyn Classifier {
        match self {
            TrainedModel::Svm(m) => m,
            TrainedModel::Forest(m) => m,
            TrainedModel::Boosting(m) => m,
            TrainedModel::Voting(m) => m,
        }
    }
}

impl Classifier for TrainedModel {
    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>> {
        self.inner().predict_proba(x)
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        self.inner().predict(x)
    }
}
