//! Review text cleaning, word tokenization and sentence splitting.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::corpus::LabeledCorpus;

/// Switches for [`clean_text_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanOptions {
    /// Also strip non-ASCII digits and numeral signs (Tamil/Malayalam
    /// numerals, fractions). ASCII digits are always removed.
    pub strip_native_numerals: bool,
    /// Lower-case Latin letters. Tamil and Malayalam have no case.
    pub lowercase_latin: bool,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions {
            strip_native_numerals: true,
            lowercase_latin: true,
        }
    }
}

/// Cleaned review text: no markup, punctuation, symbols or digits, single
/// spaces between words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CleanText(String);

impl CleanText {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CleanText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub source_id: String,
    pub tokens: Vec<String>,
}

impl TokenizedDoc {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenizedDoc {
            source_id: source_id.into(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Replaces every `<...>` span with a space. A `<` without a closing `>` is
/// left alone (it is a symbol and gets removed later anyway).
fn strip_markup(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}') && c.is_alphabetic()
}

fn is_removed(c: char, opts: &CleanOptions) -> bool {
    if c.is_ascii_digit() {
        return true;
    }
    use GeneralCategory::*;
    match get_general_category(c) {
        ConnectorPunctuation | DashPunctuation | OpenPunctuation | ClosePunctuation
        | InitialPunctuation | FinalPunctuation | OtherPunctuation | MathSymbol
        | CurrencySymbol | ModifierSymbol | OtherSymbol => true,
        DecimalNumber | OtherNumber | LetterNumber => opts.strip_native_numerals,
        _ => false,
    }
}

pub fn clean_text(raw: &str) -> CleanText {
    clean_text_with(raw, &CleanOptions::default())
}

/// Markup first, then punctuation/symbols/digits, then case and whitespace.
pub fn clean_text_with(raw: &str, opts: &CleanOptions) -> CleanText {
    let unmarked = strip_markup(raw);
    let mut kept = String::with_capacity(unmarked.len());
    for c in unmarked.chars() {
        if is_removed(c, opts) {
            continue;
        }
        if opts.lowercase_latin && is_latin_letter(c) {
            kept.extend(c.to_lowercase());
        } else {
            kept.push(c);
        }
    }
    CleanText(kept.split_whitespace().collect::<Vec<_>>().join(" "))
}

pub fn tokenize(text: &CleanText) -> Vec<String> {
    text.0.split_whitespace().map(str::to_owned).collect()
}

fn is_sentence_break(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '\n' | '\u{0964}' | '\u{0965}')
}

/// Splits raw text at `.`, `!`, `?`, newline, danda and double danda.
/// Segments that are empty after trimming are dropped.
pub fn split_sentences(raw: &str) -> Vec<&str> {
    raw.split(is_sentence_break)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn preprocess_corpus(corpus: &LabeledCorpus) -> Vec<TokenizedDoc> {
    preprocess_corpus_with(corpus, &CleanOptions::default())
}

pub fn preprocess_corpus_with(corpus: &LabeledCorpus, opts: &CleanOptions) -> Vec<TokenizedDoc> {
    corpus
        .reviews
        .iter()
        .map(|r| TokenizedDoc::new(r.id.clone(), tokenize(&clean_text_with(&r.text, opts))))
        .collect()
}
