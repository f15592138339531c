//! Labeled review datasets: loading, label encoding, and splitting.
//!
//! Input files are delimiter-separated UTF-8 text with a header row. Column
//! names are matched case-insensitively, so `ID,DATA,LABEL` works as well as
//! the default `id,text,label`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gold class of a review.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Ai,
    Human,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Ai, Label::Human];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ai => "AI",
            Label::Human => "HUMAN",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "AI" => Ok(Label::Ai),
            "HUMAN" => Ok(Label::Human),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Tamil,
    Malayalam,
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tamil" | "ta" => Ok(Language::Tamil),
            "malayalam" | "ml" => Ok(Language::Malayalam),
            other => Err(format!("unknown language `{other}`")),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Tamil => "tamil",
            Language::Malayalam => "malayalam",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
    Unlabeled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Review {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
}

impl Review {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        Review {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// Reviews in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub reviews: Vec<Review>,
    pub language: Language,
    pub split: Split,
}

impl LabeledCorpus {
    /// Builds a corpus from in-memory reviews, enforcing id uniqueness.
    pub fn from_reviews(reviews: Vec<Review>, language: Language, split: Split) -> Result<Self> {
        let mut seen = HashSet::with_capacity(reviews.len());
        for (i, r) in reviews.iter().enumerate() {
            if r.id.is_empty() {
                return Err(Error::InvalidInput(format!("review {i} has an empty id")));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(LabeledCorpus {
            reviews,
            language,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.reviews.iter().all(|r| r.label.is_some())
    }

    fn subset(&self, indices: &[usize], split: Split) -> LabeledCorpus {
        LabeledCorpus {
            reviews: indices.iter().map(|&i| self.reviews[i].clone()).collect(),
            language: self.language,
            split,
        }
    }
}

/// Column layout of an input file.
///
/// An empty `id_column` means the file has no id column; ids are then the
/// 1-based data row numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    pub id_column: String,
    pub text_column: String,
    pub label_column: String,
    pub delimiter: char,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            id_column: "id".into(),
            text_column: "text".into(),
            label_column: "label".into(),
            delimiter: ',',
        }
    }
}

impl Schema {
    /// Picks tab when the file extension is `.tsv`, otherwise keeps the
    /// configured delimiter.
    pub fn for_path(&self, path: &Path) -> Schema {
        let mut s = self.clone();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
        {
            s.delimiter = '\t';
        }
        s
    }
}

fn find_column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| {
        h.trim()
            .trim_start_matches('\u{feff}')
            .eq_ignore_ascii_case(name)
    })
}

/// Reads a review file.
///
/// When the label column is absent the corpus is returned with
/// [`Split::Unlabeled`] regardless of `split`. Empty label cells are read as
/// unlabeled reviews.
pub fn load_reviews(
    path: &Path,
    schema: &Schema,
    language: Language,
    split: Split,
) -> Result<LabeledCorpus> {
    let delimiter = u8::try_from(schema.delimiter)
        .map_err(|_| Error::Config(format!("delimiter {:?} is not ASCII", schema.delimiter)))?;
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let missing = |column: &str| Error::MissingColumn {
        path: path.to_path_buf(),
        column: column.to_string(),
    };
    let id_col = if schema.id_column.is_empty() {
        None
    } else {
        Some(find_column(&headers, &schema.id_column).ok_or_else(|| missing(&schema.id_column))?)
    };
    let text_col =
        find_column(&headers, &schema.text_column).ok_or_else(|| missing(&schema.text_column))?;
    let label_col = find_column(&headers, &schema.label_column);

    let mut reviews = Vec::new();
    let mut seen = HashSet::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        // line number as shown in an editor; falls back to header + data row
        let row = record.position().map(|p| p.line()).unwrap_or(n as u64 + 2);
        let id = match id_col {
            Some(c) => record.get(c).unwrap_or("").trim().to_string(),
            None => (n + 1).to_string(),
        };
        if id.is_empty() {
            return Err(Error::EmptyField {
                path: path.to_path_buf(),
                row,
                field: "id",
            });
        }
        let text = record.get(text_col).unwrap_or("").to_string();
        if text.trim().is_empty() {
            return Err(Error::EmptyField {
                path: path.to_path_buf(),
                row,
                field: "text",
            });
        }
        let label = match label_col.and_then(|c| record.get(c)).map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(s.parse::<Label>().map_err(|label| Error::UnknownLabel {
                path: path.to_path_buf(),
                row,
                label,
            })?),
        };
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                row,
                id,
            });
        }
        reviews.push(Review { id, text, label });
    }
    let split = if label_col.is_none() {
        Split::Unlabeled
    } else {
        split
    };
    Ok(LabeledCorpus {
        reviews,
        language,
        split,
    })
}

/// Writes a corpus as a tab-separated `id, text, label` file.
pub fn write_reviews(path: &Path, corpus: &LabeledCorpus) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let mut write = |fields: [&str; 3]| {
        w.write_record(fields).map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    };
    write(["id", "text", "label"])?;
    for r in &corpus.reviews {
        write([&r.id, &r.text, r.label.map_or("", Label::as_str)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Bijective class-name to index mapping, lexicographic by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    names: Vec<String>,
}

impl Default for LabelMap {
    fn default() -> Self {
        let mut names: Vec<String> = Label::ALL.iter().map(|l| l.as_str().to_string()).collect();
        names.sort();
        LabelMap { names }
    }
}

impl LabelMap {
    pub fn from_names(mut names: Vec<String>) -> Result<Self> {
        names.sort();
        names.dedup();
        let expected = LabelMap::default();
        if names != expected.names {
            return Err(Error::Format(format!("unsupported class set {names:?}")));
        }
        Ok(LabelMap { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn encode(&self, label: Label) -> usize {
        self.names
            .iter()
            .position(|n| n == label.as_str())
            .expect("label map covers both classes")
    }

    pub fn decode(&self, index: usize) -> Option<Label> {
        self.names.get(index).and_then(|n| n.parse().ok())
    }
}

/// Maps every label to its class index (AI = 0, HUMAN = 1).
pub fn encode_labels(corpus: &LabeledCorpus) -> Result<(Vec<usize>, LabelMap)> {
    let map = LabelMap::default();
    let y = corpus
        .reviews
        .iter()
        .map(|r| {
            r.label
                .map(|l| map.encode(l))
                .ok_or_else(|| Error::Unlabeled(r.id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((y, map))
}

/// Unstratified seeded shuffle-split. The validation part holds
/// `round_half_up(n * fraction)` reviews; both parts keep file order.
pub fn split_train_validation(
    corpus: &LabeledCorpus,
    validation_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(0.0..1.0).contains(&validation_fraction) {
        return Err(Error::InvalidInput(format!(
            "validation fraction {validation_fraction} must lie in [0, 1)"
        )));
    }
    if corpus.is_empty() {
        return Err(Error::InvalidInput("cannot split an empty corpus".into()));
    }
    let n = corpus.len();
    let n_val = (n as f64 * validation_fraction + 0.5).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut val: Vec<usize> = order[..n_val].to_vec();
    let mut train: Vec<usize> = order[n_val..].to_vec();
    val.sort_unstable();
    train.sort_unstable();
    Ok((
        corpus.subset(&train, corpus.split),
        corpus.subset(&val, corpus.split),
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub ai: usize,
    pub human: usize,
}

impl ClassCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Ai => self.ai,
            Label::Human => self.human,
        }
    }

    pub fn total(&self) -> usize {
        self.ai + self.human
    }
}

/// Counts labeled reviews per class; unlabeled reviews are not counted.
pub fn class_distribution(corpus: &LabeledCorpus) -> ClassCounts {
    corpus
        .reviews
        .iter()
        .fold(ClassCounts::default(), |mut c, r| {
            match r.label {
                Some(Label::Ai) => c.ai += 1,
                Some(Label::Human) => c.human += 1,
                None => {}
            }
            c
        })
}
