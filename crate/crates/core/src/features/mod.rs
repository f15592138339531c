//! Document features: TF-IDF, averaged word embeddings, their fusion into a
//! dense matrix, and standardization.

mod scaler;
mod tfidf;
mod word2vec;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use scaler::{apply_scaler, fit_scaler, Scaler, StdKind};
pub use tfidf::{fit_tfidf, ngrams, transform_tfidf, TfidfConfig, TfidfModel};
pub use word2vec::{embed_document, train_word2vec, Word2VecConfig, Word2VecModel};

use crate::error::{Error, Result};
use crate::textprep::TokenizedDoc;

/// Sparse vector with entries sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVec {
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        SparseVec { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }
}

/// Dense row-major matrix; one row per document.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl FeatureMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FeatureMatrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(FeatureMatrix {
            data,
            rows: n,
            cols,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(FeatureMatrix { data, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics; a zero-column matrix has no data anyway
        self.data
            .chunks_exact(self.cols.max(1))
            .take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub(crate) fn rows_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        let cols = self.cols.max(1);
        self.data.chunks_exact_mut(cols)
    }

    /// Rows picked by `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            data,
            rows: indices.len(),
            cols: self.cols,
        }
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(Error::NonFinite {
                row: p / self.cols.max(1),
                col: p % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }
}

/// TF-IDF block followed by the embedding block.
pub fn fuse_features(tfidf: &SparseVec, embedding: &[f64], embed_dim: usize) -> Result<Vec<f64>> {
    if embedding.len() != embed_dim {
        return Err(Error::DimensionMismatch {
            expected: embed_dim,
            actual: embedding.len(),
        });
    }
    if let Some(&(i, _)) = tfidf.entries().last() {
        if i >= tfidf.dim() {
            return Err(Error::DimensionMismatch {
                expected: tfidf.dim(),
                actual: i + 1,
            });
        }
    }
    let mut out = tfidf.to_dense();
    out.extend_from_slice(embedding);
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub tfidf: TfidfConfig,
    pub word2vec: Word2VecConfig,
    pub std_kind: StdKind,
}

/// Fitted TF-IDF, Word2Vec and scaler, applied together.
#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePipeline {
    pub tfidf: TfidfModel,
    pub word2vec: Word2VecModel,
    pub scaler: Scaler,
}

impl FeaturePipeline {
    /// Fits every stage on `docs` and returns the scaled training matrix too.
    pub fn fit(docs: &[TokenizedDoc], config: &FeatureConfig) -> Result<(Self, FeatureMatrix)> {
        let tfidf = fit_tfidf(docs, config.tfidf)?;
        let word2vec = train_word2vec(docs, config.word2vec)?;
        let raw = fused_matrix(&tfidf, &word2vec, docs)?;
        let scaler = fit_scaler(&raw, config.std_kind)?;
        let scaled = scaler.apply(&raw)?;
        Ok((
            FeaturePipeline {
                tfidf,
                word2vec,
                scaler,
            },
            scaled,
        ))
    }

    pub fn n_features(&self) -> usize {
        self.tfidf.vocabulary_len() + self.word2vec.dim()
    }

    pub fn transform(&self, docs: &[TokenizedDoc]) -> Result<FeatureMatrix> {
        let raw = fused_matrix(&self.tfidf, &self.word2vec, docs)?;
        self.scaler.apply(&raw)
    }
}

/// Unscaled fused matrix, `|vocabulary| + dim` columns.
pub fn fused_matrix(
    tfidf: &TfidfModel,
    word2vec: &Word2VecModel,
    docs: &[TokenizedDoc],
) -> Result<FeatureMatrix> {
    let cols = tfidf.vocabulary_len() + word2vec.dim();
    let rows = docs
        .par_iter()
        .map(|d| fuse_features(&tfidf.transform(d), &word2vec.embed(d), word2vec.dim()))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(rows.len() * cols);
    for r in &rows {
        data.extend_from_slice(r);
    }
    FeatureMatrix::from_vec(rows.len(), cols, data)
}
