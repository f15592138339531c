//! Skip-gram word embeddings trained with negative sampling.
//!
//! Training is single-threaded and driven by one seeded ChaCha stream, so a
//! given corpus and config always yield the same matrix.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::TokenizedDoc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Word2VecConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negative: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for Word2VecConfig {
    fn default() -> Self {
        Word2VecConfig {
            dim: 100,
            window: 5,
            epochs: 10,
            negative: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Word2VecModel {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `tokens.len() x dim`.
    vectors: Vec<f64>,
    config: Word2VecConfig,
}

/// Cumulative unigram^0.75 table for drawing negatives.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[usize]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn train_word2vec(docs: &[TokenizedDoc], config: Word2VecConfig) -> Result<Word2VecModel> {
    if config.dim == 0 || config.window == 0 {
        return Err(Error::Config(
            "word2vec dim and window must be positive".into(),
        ));
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for t in docs.iter().flat_map(|d| &d.tokens) {
        *freq.entry(t.as_str()).or_default() += 1;
    }
    if freq.is_empty() {
        return Err(Error::InvalidInput(
            "cannot train word2vec: corpus has no tokens".into(),
        ));
    }
    let mut vocab: Vec<(&str, usize)> = freq.into_iter().collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let index: HashMap<String, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.to_string(), i))
        .collect();
    let counts: Vec<usize> = vocab.iter().map(|v| v.1).collect();
    let tokens: Vec<String> = vocab.iter().map(|v| v.0.to_string()).collect();

    let dim = config.dim;
    let v = tokens.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut input: Vec<f64> = (0..v * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0; v * dim];
    let noise = NoiseTable::new(&counts);

    let sentences: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.tokens.iter().map(|t| index[t]).collect())
        .collect();
    let words_per_epoch: usize = sentences.iter().map(Vec::len).sum();
    let total = (words_per_epoch * config.epochs).max(1) as f64;
    let mut processed = 0usize;
    let mut grad = vec![0.0; dim];

    for _ in 0..config.epochs {
        for sent in &sentences {
            for (pos, &center) in sent.iter().enumerate() {
                let lr = (config.learning_rate
                    - (config.learning_rate - config.min_learning_rate) * processed as f64 / total)
                    .max(config.min_learning_rate);
                processed += 1;
                let span = config.window - rng.gen_range(0..config.window);
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(sent.len() - 1);
                for (ctx_pos, &context) in sent.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let ctx_row = context * dim..(context + 1) * dim;
                    for k in 0..=config.negative {
                        let (target, label) = if k == 0 {
                            (center, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == center {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let out_row = target * dim..(target + 1) * dim;
                        let dot: f64 = input[ctx_row.clone()]
                            .iter()
                            .zip(&output[out_row.clone()])
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(dot)) * lr;
                        for ((acc, o), i) in grad
                            .iter_mut()
                            .zip(&mut output[out_row])
                            .zip(&input[ctx_row.clone()])
                        {
                            *acc += g * *o;
                            *o += g * i;
                        }
                    }
                    for (i, g) in input[ctx_row].iter_mut().zip(&grad) {
                        *i += g;
                    }
                }
            }
        }
    }

    Ok(Word2VecModel {
        tokens,
        index,
        vectors: input,
        config,
    })
}

impl Word2VecModel {
    pub(crate) fn from_parts(
        tokens: Vec<String>,
        vectors: Vec<f64>,
        config: Word2VecConfig,
    ) -> Result<Self> {
        if vectors.len() != tokens.len() * config.dim {
            return Err(Error::DimensionMismatch {
                expected: tokens.len() * config.dim,
                actual: vectors.len(),
            });
        }
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Word2VecModel {
            tokens,
            index,
            vectors,
            config,
        })
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn vocabulary_len(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn config(&self) -> Word2VecConfig {
        self.config
    }

    pub fn matrix(&self) -> &[f64] {
        &self.vectors
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        let dim = self.config.dim;
        self.index
            .get(token)
            .map(|&i| &self.vectors[i * dim..(i + 1) * dim])
    }

    /// Mean of the in-vocabulary token vectors; zero when there are none.
    pub fn embed(&self, doc: &TokenizedDoc) -> Vec<f64> {
        let mut sum = vec![0.0; self.config.dim];
        let mut n = 0usize;
        for v in doc.tokens.iter().filter_map(|t| self.vector(t)) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
        if n > 0 {
            let n = n as f64;
            sum.iter_mut().for_each(|s| *s /= n);
        }
        sum
    }
}

pub fn embed_document(model: &Word2VecModel, doc: &TokenizedDoc) -> Vec<f64> {
    model.embed(doc)
}
