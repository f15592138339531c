use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::SparseVec;
use crate::error::{Error, Result};
use crate::textprep::TokenizedDoc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfidfConfig {
    pub max_features: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        TfidfConfig {
            max_features: 5000,
            ngram_min: 1,
            ngram_max: 2,
        }
    }
}

/// Fitted vocabulary and smoothed idf weights.
///
/// Column indices follow the lexicographic order of the kept terms.
#[derive(Clone, Debug, PartialEq)]
pub struct TfidfModel {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    config: TfidfConfig,
}

/// All n-grams of `tokens` for `min..=max`, words joined by a single space.
pub fn ngrams(tokens: &[String], min: usize, max: usize) -> impl Iterator<Item = String> + '_ {
    (min.max(1)..=max).flat_map(move |n| tokens.windows(n).map(|w| w.join(" ")))
}

pub fn fit_tfidf(docs: &[TokenizedDoc], config: TfidfConfig) -> Result<TfidfModel> {
    if config.ngram_min == 0 || config.ngram_min > config.ngram_max {
        return Err(Error::Config(format!(
            "invalid n-gram range ({}, {})",
            config.ngram_min, config.ngram_max
        )));
    }
    if docs.iter().all(|d| d.is_empty()) {
        return Err(Error::InvalidInput(
            "cannot fit TF-IDF: every document is empty".into(),
        ));
    }
    // term -> (corpus frequency, document frequency)
    let mut counts: HashMap<String, (usize, usize)> = HashMap::new();
    for doc in docs {
        let mut in_doc: HashMap<String, usize> = HashMap::new();
        for g in ngrams(&doc.tokens, config.ngram_min, config.ngram_max) {
            *in_doc.entry(g).or_default() += 1;
        }
        for (term, c) in in_doc {
            let e = counts.entry(term).or_default();
            e.0 += c;
            e.1 += 1;
        }
    }
    let mut ranked: Vec<(String, usize, usize)> = counts
        .into_iter()
        .map(|(t, (tf, df))| (t, tf, df))
        .collect();
    if ranked.len() > config.max_features {
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(config.max_features);
    }
    ranked.sort_by(|a, b| a.0.cmp(&b.0));

    let n = docs.len() as f64;
    let idf = ranked
        .iter()
        .map(|&(_, _, df)| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
        .collect();
    let terms: Vec<String> = ranked.into_iter().map(|(t, _, _)| t).collect();
    Ok(TfidfModel::from_parts(terms, idf, config))
}

impl TfidfModel {
    pub(crate) fn from_parts(terms: Vec<String>, idf: Vec<f64>, config: TfidfConfig) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        TfidfModel {
            terms,
            index,
            idf,
            config,
        }
    }

    pub fn vocabulary_len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf_values(&self) -> &[f64] {
        &self.idf
    }

    pub fn config(&self) -> TfidfConfig {
        self.config
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|i| self.idf[i])
    }

    /// Raw counts times idf, L2-normalized. Documents without any known term
    /// map to the zero vector.
    pub fn transform(&self, doc: &TokenizedDoc) -> SparseVec {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for g in ngrams(&doc.tokens, self.config.ngram_min, self.config.ngram_max) {
            if let Some(&col) = self.index.get(&g) {
                *counts.entry(col).or_default() += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(col, c)| (col, c * self.idf[col]))
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        let norm = entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut entries {
                e.1 /= norm;
            }
        }
        SparseVec::new(self.terms.len(), entries)
    }
}

pub fn transform_tfidf(model: &TfidfModel, doc: &TokenizedDoc) -> SparseVec {
    model.transform(doc)
}
