use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{grow_class_tree, ClassTree};
use super::{argmax, check_dims, Classifier, Proba};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct ForestModel {
    pub(crate) trees: Vec<ClassTree>,
    pub(crate) n_features: usize,
    pub(crate) seed: u64,
}

/// `floor(sqrt(d))`, at least one.
pub fn sqrt_features(d: usize) -> usize {
    ((d as f64).sqrt().floor() as usize).max(1)
}

/// Bagged Gini trees. Tree `t` draws its bootstrap sample and feature
/// subsets from a stream seeded with `seed + t`, so parallel and serial
/// training agree.
pub fn train_random_forest(
    x: &FeatureMatrix,
    y: &[usize],
    n_trees: usize,
    seed: u64,
) -> Result<ForestModel> {
    if x.rows() == 0 {
        return Err(Error::InvalidInput(
            "cannot train a forest on zero rows".into(),
        ));
    }
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
    if n_trees == 0 {
        return Err(Error::Config("a forest needs at least one tree".into()));
    }
    x.check_finite()?;
    let n = x.rows();
    let max_features = sqrt_features(x.cols());
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grow_class_tree(x, y, sample, max_features, &mut rng)
        })
        .collect();
    Ok(ForestModel {
        trees,
        n_features: x.cols(),
        seed,
    })
}

impl ForestModel {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[ClassTree] {
        &self.trees
    }

    /// Number of trees voting for each class.
    pub fn votes(&self, row: &[f64]) -> [usize; 2] {
        let mut v = [0; 2];
        for t in &self.trees {
            let c = t.leaf_for(row);
            v[argmax(&[c[0] as f64, c[1] as f64])] += 1;
        }
        v
    }
}

impl Classifier for ForestModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    /// Fraction of trees voting for each class.
    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>> {
        check_dims(self.n_features, x)?;
        let n = self.trees.len() as f64;
        Ok(x.iter_rows()
            .map(|r| {
                let v = self.votes(r);
                [v[0] as f64 / n, v[1] as f64 / n]
            })
            .collect())
    }
}
