use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Gamma, Gram, Kernel, SvmParams};
use super::svm::{fit_from_gram, signed_targets, solve_on_gram, SvmModel};
use super::Classifier;
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::features::FeatureMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scoring {
    #[default]
    MacroF1,
    Accuracy,
}

impl Scoring {
    pub fn score(self, y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
        let r = evaluate(y_true, y_pred)?;
        Ok(match self {
            Scoring::MacroF1 => r.macro_f1,
            Scoring::Accuracy => r.accuracy,
        })
    }
}

/// Validation index sets of a seeded stratified k-fold split.
///
/// Each class is shuffled and dealt round-robin across the folds, so fold
/// sizes differ by at most one per class. Returned indices are sorted.
pub fn stratified_folds(y: &[usize], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in y.iter().enumerate() {
        by_class
            .get_mut(l)
            .ok_or_else(|| Error::InvalidInput(format!("label index {l} out of range")))?
            .push(i);
    }
    let smallest = by_class.iter().map(Vec::len).min().unwrap_or(0);
    if folds > smallest {
        return Err(Error::TooManyFolds { folds, smallest });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            out[next].push(i);
            next = (next + 1) % folds;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

fn complement(n: usize, held_out: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in held_out {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

/// Per-fold validation scores of `trainer`.
pub fn cross_validate<M, F>(
    trainer: F,
    x: &FeatureMatrix,
    y: &[usize],
    folds: usize,
    seed: u64,
    scoring: Scoring,
) -> Result<Vec<f64>>
where
    M: Classifier,
    F: Fn(&FeatureMatrix, &[usize]) -> Result<M>,
{
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: y.len(),
        });
    }
    stratified_folds(y, folds, seed)?
        .iter()
        .map(|val| {
            let train = complement(y.len(), val);
            let y_train: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let model = trainer(&x.select_rows(&train), &y_train)?;
            let pred = model.predict(&x.select_rows(val))?;
            let y_val: Vec<usize> = val.iter().map(|&i| y[i]).collect();
            scoring.score(&y_val, &pred)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmGrid {
    pub kernels: Vec<Kernel>,
    pub c_values: Vec<f64>,
    pub gammas: Vec<Gamma>,
}

impl Default for SvmGrid {
    fn default() -> Self {
        SvmGrid {
            kernels: Kernel::ALL.to_vec(),
            c_values: vec![0.1, 1.0, 10.0, 100.0],
            gammas: vec![Gamma::Scale, Gamma::Auto],
        }
    }
}

impl SvmGrid {
    /// Combinations with C varying slowest and kernel fastest.
    pub fn combinations(&self) -> Vec<SvmParams> {
        let mut out = Vec::new();
        for &c in &self.c_values {
            for &gamma in &self.gammas {
                for &kernel in &self.kernels {
                    out.push(SvmParams { kernel, c, gamma });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvEntry {
    pub params: SvmParams,
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub entries: Vec<CvEntry>,
    /// Index into `entries`; first maximum in enumeration order.
    pub best: usize,
}

impl CvResult {
    pub fn best_params(&self) -> SvmParams {
        self.entries[self.best].params
    }

    /// Tab-separated table, one row per combination.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("kernel\tC\tgamma\tmean_score\tfold_scores\tselected\n");
        for (i, e) in self.entries.iter().enumerate() {
            let folds: Vec<String> = e.fold_scores.iter().map(f64::to_string).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.params.kernel,
                e.params.c,
                e.params.gamma,
                e.mean_score,
                folds.join(","),
                if i == self.best { "yes" } else { "" }
            ));
        }
        out
    }
}

/// Exhaustive stratified k-fold search over `grid`, then a refit of the
/// best combination on all rows. The inner-product matrix is computed once
/// and shared by every fold and combination.
pub fn svm_grid_search(
    x: &FeatureMatrix,
    y: &[usize],
    grid: &SvmGrid,
    folds: usize,
    seed: u64,
    scoring: Scoring,
) -> Result<(CvResult, SvmModel)> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: y.len(),
        });
    }
    let targets = signed_targets(y)?;
    let fold_sets = stratified_folds(y, folds, seed)?;
    x.check_finite()?;
    let combos = grid.combinations();
    if combos.is_empty() {
        return Err(Error::Config("empty SVM grid".into()));
    }
    if let Some(p) = combos.iter().find(|p| !(p.c > 0.0)) {
        return Err(Error::Config(format!("C must be positive, got {}", p.c)));
    }
    let gram = Gram::compute(x);

    let train_sets: Vec<Vec<usize>> = fold_sets
        .iter()
        .map(|val| complement(y.len(), val))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..combos.len())
        .flat_map(|c| (0..folds).map(move |f| (c, f)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, f)| {
            let p = combos[c];
            let train = &train_sets[f];
            let val = &fold_sets[f];
            let t: Vec<f64> = train.iter().map(|&i| targets[i]).collect();
            let gamma = p.gamma.resolve_rows(x, train);
            let sol = solve_on_gram(&gram, train, &t, p.kernel, gamma, p.c);
            let pred: Vec<usize> = val
                .iter()
                .map(|&v| {
                    let s: f64 = train
                        .iter()
                        .zip(&sol.alpha)
                        .filter(|(_, &a)| a > 0.0)
                        .map(|(&tr, &a)| {
                            a * targets[tr]
                                * p.kernel.eval(
                                    gamma,
                                    gram.dot(tr, v),
                                    gram.sq_norm(tr),
                                    gram.sq_norm(v),
                                )
                        })
                        .sum();
                    usize::from(s - sol.rho > 0.0)
                })
                .collect();
            let y_val: Vec<usize> = val.iter().map(|&i| y[i]).collect();
            scoring.score(&y_val, &pred)
        })
        .collect::<Result<_>>()?;

    let entries: Vec<CvEntry> = combos
        .iter()
        .enumerate()
        .map(|(c, &params)| {
            let fold_scores = scores[c * folds..(c + 1) * folds].to_vec();
            let mean_score = fold_scores.iter().sum::<f64>() / folds as f64;
            CvEntry {
                params,
                fold_scores,
                mean_score,
            }
        })
        .collect();
    let mut best = 0;
    for (i, e) in entries.iter().enumerate() {
        if e.mean_score > entries[best].mean_score {
            best = i;
        }
    }
    let all: Vec<usize> = (0..y.len()).collect();
    let model = fit_from_gram(x, &gram, &all, &targets, &entries[best].params)?;
    Ok((CvResult { entries, best }, model))
}
