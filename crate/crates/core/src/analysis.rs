//! Corpus statistics, word frequencies and misclassification reports.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Label, LabeledCorpus, Review};
use crate::error::{Error, Result};
use crate::eval::PredictionRecord;
use crate::textprep::{clean_text_with, split_sentences, tokenize, CleanOptions};

/// Which tokens the statistics count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tokenization {
    /// Cleaned text split on whitespace, as fed to the models.
    #[default]
    Pipeline,
    /// Raw text split on whitespace.
    Whitespace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StatsOptions {
    pub tokenization: Tokenization,
    pub clean: CleanOptions,
}

impl StatsOptions {
    pub fn tokens(&self, raw: &str) -> Vec<String> {
        match self.tokenization {
            Tokenization::Pipeline => tokenize(&clean_text_with(raw, &self.clean)),
            Tokenization::Whitespace => raw.split_whitespace().map(str::to_string).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassStats {
    pub reviews: usize,
    pub avg_word_count: f64,
    pub avg_sentences_per_review: f64,
    /// Mean per-review distinct/total token ratio over reviews with at
    /// least one token; 0 when there are none.
    pub lexical_diversity: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorpusStats {
    pub ai: ClassStats,
    pub human: ClassStats,
}

impl CorpusStats {
    pub fn get(&self, label: Label) -> &ClassStats {
        match label {
            Label::Ai => &self.ai,
            Label::Human => &self.human,
        }
    }

    /// `AI.avg_word_count=...` style lines, three metrics per class.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for label in Label::ALL {
            let s = self.get(label);
            out.push_str(&format!("{label}.avg_word_count={}\n", s.avg_word_count));
            out.push_str(&format!(
                "{label}.avg_sentences_per_review={}\n",
                s.avg_sentences_per_review
            ));
            out.push_str(&format!(
                "{label}.lexical_diversity={}\n",
                s.lexical_diversity
            ));
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<26}{:>12}{:>12}\n",
            "metric",
            Label::Ai.as_str(),
            Label::Human.as_str()
        );
        let rows: [(&str, fn(&ClassStats) -> f64); 3] = [
            ("avg_word_count", |s| s.avg_word_count),
            ("avg_sentences_per_review", |s| s.avg_sentences_per_review),
            ("lexical_diversity", |s| s.lexical_diversity),
        ];
        for (name, f) in rows {
            out.push_str(&format!(
                "{name:<26}{:>12.3}{:>12.3}\n",
                f(&self.ai),
                f(&self.human)
            ));
        }
        out
    }
}

struct ReviewStats {
    words: usize,
    sentences: usize,
    diversity: Option<f64>,
}

fn review_stats(review: &Review, opts: &StatsOptions) -> ReviewStats {
    let tokens = opts.tokens(&review.text);
    let distinct: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    ReviewStats {
        words: tokens.len(),
        sentences: split_sentences(&review.text).len(),
        diversity: (!tokens.is_empty()).then(|| distinct.len() as f64 / tokens.len() as f64),
    }
}

fn labeled(corpus: &LabeledCorpus) -> Result<Vec<Label>> {
    corpus
        .reviews
        .iter()
        .map(|r| r.label.ok_or_else(|| Error::Unlabeled(r.id.clone())))
        .collect()
}

pub fn corpus_statistics(corpus: &LabeledCorpus) -> Result<CorpusStats> {
    corpus_statistics_with(corpus, &StatsOptions::default())
}

/// Word counts and diversity use `opts` tokens; sentence counts use the raw text.
pub fn corpus_statistics_with(corpus: &LabeledCorpus, opts: &StatsOptions) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput(
            "corpus statistics need at least one review".into(),
        ));
    }
    let labels = labeled(corpus)?;
    let per_review: Vec<ReviewStats> = corpus
        .reviews
        .par_iter()
        .map(|r| review_stats(r, opts))
        .collect();

    let summarize = |label: Label| {
        let members: Vec<&ReviewStats> = per_review
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == label)
            .map(|(s, _)| s)
            .collect();
        let n = members.len();
        if n == 0 {
            return ClassStats::default();
        }
        let div: Vec<f64> = members.iter().filter_map(|s| s.diversity).collect();
        ClassStats {
            reviews: n,
            avg_word_count: members.iter().map(|s| s.words).sum::<usize>() as f64 / n as f64,
            avg_sentences_per_review: members.iter().map(|s| s.sentences).sum::<usize>() as f64
                / n as f64,
            lexical_diversity: if div.is_empty() {
                0.0
            } else {
                div.iter().sum::<f64>() / div.len() as f64
            },
        }
    };
    Ok(CorpusStats {
        ai: summarize(Label::Ai),
        human: summarize(Label::Human),
    })
}

/// Token counts, descending by count with ties in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordFrequencyTable {
    pub entries: Vec<(String, usize)>,
}

impl WordFrequencyTable {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("token\tcount\n");
        for (t, c) in &self.entries {
            out.push_str(&format!("{t}\t{c}\n"));
        }
        out
    }
}

/// Full frequency table of the tokens in reviews labeled `label`.
pub fn word_frequencies(
    corpus: &LabeledCorpus,
    label: Label,
    opts: &StatsOptions,
) -> WordFrequencyTable {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for r in corpus.reviews.iter().filter(|r| r.label == Some(label)) {
        for t in opts.tokens(&r.text) {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut entries: Vec<(String, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    WordFrequencyTable { entries }
}

pub fn top_words(corpus: &LabeledCorpus, label: Label, n: usize) -> WordFrequencyTable {
    let mut table = word_frequencies(corpus, label, &StatsOptions::default());
    table.entries.truncate(n);
    table
}

/// Prediction records reordered to follow the gold corpus.
pub fn align_predictions<'a>(
    gold: &LabeledCorpus,
    records: &'a [PredictionRecord],
    source_name: &str,
) -> Result<Vec<&'a PredictionRecord>> {
    let mut by_id: HashMap<&str, &PredictionRecord> = HashMap::with_capacity(records.len());
    for r in records {
        if by_id.insert(r.id.as_str(), r).is_some() {
            return Err(Error::InvalidInput(format!(
                "id `{}` appears more than once in {source_name}",
                r.id
            )));
        }
    }
    let known: HashSet<&str> = gold.reviews.iter().map(|r| r.id.as_str()).collect();
    if let Some(r) = records.iter().find(|r| !known.contains(r.id.as_str())) {
        return Err(Error::UnexpectedId {
            id: r.id.clone(),
            source_name: source_name.to_string(),
        });
    }
    gold.reviews
        .iter()
        .map(|g| {
            by_id
                .get(g.id.as_str())
                .copied()
                .ok_or_else(|| Error::MissingId {
                    id: g.id.clone(),
                    source_name: source_name.to_string(),
                })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisclassificationRow {
    pub id: String,
    pub text: String,
    pub gold: Label,
    /// One entry per model, in the table's model order.
    pub correct: Vec<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MisclassificationTable {
    pub models: Vec<String>,
    pub rows: Vec<MisclassificationRow>,
}

impl MisclassificationTable {
    pub fn to_tsv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .from_writer(Vec::new());
        let mut header = vec!["id", "gold"];
        header.extend(self.models.iter().map(String::as_str));
        header.push("text");
        let _ = w.write_record(&header);
        for r in &self.rows {
            let mut rec = vec![r.id.as_str(), r.gold.as_str()];
            rec.extend(
                r.correct
                    .iter()
                    .map(|&c| if c { "correct" } else { "incorrect" }),
            );
            rec.push(&r.text);
            let _ = w.write_record(&rec);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

/// Reviews that at least two of the models got wrong, in gold order.
pub fn cross_model_misclassifications(
    gold: &LabeledCorpus,
    models: &[(String, Vec<PredictionRecord>)],
) -> Result<MisclassificationTable> {
    let labels = labeled(gold)?;
    let aligned: Vec<Vec<&PredictionRecord>> = models
        .iter()
        .map(|(name, recs)| align_predictions(gold, recs, name))
        .collect::<Result<_>>()?;
    let rows = gold
        .reviews
        .iter()
        .enumerate()
        .filter_map(|(i, review)| {
            let correct: Vec<bool> = aligned
                .iter()
                .map(|m| m[i].predicted == labels[i])
                .collect();
            (correct.iter().filter(|&&c| !c).count() >= 2).then(|| MisclassificationRow {
                id: review.id.clone(),
                text: review.text.clone(),
                gold: labels[i],
                correct,
            })
        })
        .collect();
    Ok(MisclassificationTable {
        models: models.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorEntry {
    pub id: String,
    pub text: String,
    pub p_ai: f64,
}

/// Misclassified reviews with AI as the positive class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorListing {
    /// Human-written reviews predicted AI.
    pub false_positives: Vec<ErrorEntry>,
    /// AI-generated reviews predicted HUMAN.
    pub false_negatives: Vec<ErrorEntry>,
}

impl ErrorListing {
    pub fn to_tsv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .from_writer(Vec::new());
        let _ = w.write_record(["kind", "id", "p_ai", "text"]);
        for (kind, list) in [("FP", &self.false_positives), ("FN", &self.false_negatives)] {
            for e in list {
                let _ = w.write_record([kind, &e.id, &e.p_ai.to_string(), &e.text]);
            }
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

pub fn error_listing(gold: &LabeledCorpus, records: &[PredictionRecord]) -> Result<ErrorListing> {
    let labels = labeled(gold)?;
    let aligned = align_predictions(gold, records, "predictions")?;
    let mut out = ErrorListing::default();
    for ((review, &label), rec) in gold.reviews.iter().zip(&labels).zip(aligned) {
        let entry = || ErrorEntry {
            id: review.id.clone(),
            text: review.text.clone(),
            p_ai: rec.p_ai,
        };
        match (label, rec.predicted) {
            (Label::Human, Label::Ai) => out.false_positives.push(entry()),
            (Label::Ai, Label::Human) => out.false_negatives.push(entry()),
            _ => {}
        }
    }
    Ok(out)
}
