#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHARED: &[&str] = &["பொருள்", "தரம்", "விலை", "நல்ல", "வாங்கினேன்", "டெலிவரி"];
const FORMAL: &[&str] = &[
    "மிகவும்",
    "சிறந்த",
    "பயனுள்ள",
    "அனுபவம்",
    "பரிந்துரைக்கிறேன்",
    "வடிவமைப்பு",
    "நம்பகமான",
    "திருப்திகரமான",
    "உயர்தர",
    "செயல்திறன்",
];
const CASUAL: &[&str] = &[
    "சூப்பர்",
    "ok",
    "worth",
    "waste",
    "பரவாயில்லை",
    "செம",
    "nice",
    "மோசம்",
    "bro",
    "👍",
];

/// Labeled review rows: longer formal texts for AI, short casual ones for
/// HUMAN, with a little vocabulary overlap between the classes.
pub fn synthetic_rows(n: usize, seed: u64) -> Vec<(String, String, &'static str)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let ai = i % 2 == 0;
            let (own, len) = if ai {
                (FORMAL, rng.gen_range(6..12))
            } else {
                (CASUAL, rng.gen_range(2..6))
            };
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        *SHARED.choose(&mut rng).unwrap()
                    } else {
                        *own.choose(&mut rng).unwrap()
                    }
                })
                .collect();
            let mut text = words.join(" ");
            if ai {
                text.push('.');
            } else if rng.gen_bool(0.5) {
                text.push_str("!!");
            }
            (format!("r{i:04}"), text, if ai { "AI" } else { "HUMAN" })
        })
        .collect()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn write_csv(path: &Path, rows: &[(String, String, &str)], with_labels: bool) {
    let mut out = String::from(if with_labels {
        "id,text,label\n"
    } else {
        "id,text\n"
    });
    for (id, text, label) in rows {
        if with_labels {
            let _ = writeln!(out, "{id},{},{label}", quote(text));
        } else {
            let _ = writeln!(out, "{id},{}", quote(text));
        }
    }
    std::fs::write(path, out).unwrap();
}

pub fn write_synthetic(path: &Path, n: usize, seed: u64) {
    write_csv(path, &synthetic_rows(n, seed), true);
}
