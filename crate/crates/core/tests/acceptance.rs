//! Acceptance suite. Prints one PASS / FAIL / SKIP line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Criteria 5 and 6 need the public shared-task data. Point
//! `REVDETECT_DATA_DIR` at a directory holding `tamil_train`, `tamil_test`,
//! `malayalam_train` and `malayalam_test` (`.csv` or `.tsv`). Column names
//! default to `id`, `text`, `label` and can be changed with
//! `REVDETECT_ID_COLUMN`, `REVDETECT_TEXT_COLUMN` and `REVDETECT_LABEL_COLUMN`.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revdetect::analysis::StatsOptions;
use revdetect::bundle::{ModelBundle, FORMAT_MAJOR};
use revdetect::classical::{
    train_gradient_boosting, train_svm, BoostingConfig, Classifier, Gamma, Kernel, SvmParams,
};
use revdetect::commands;
use revdetect::config::{ModelKind, PipelineConfig};
use revdetect::corpus::{load_reviews, Language, Schema, Split};
use revdetect::eval::{evaluate, read_predictions};
use revdetect::features::{fit_scaler, fit_tfidf, FeatureMatrix, StdKind, TfidfConfig};
use revdetect::textprep::TokenizedDoc;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn from_check(c: Check) -> Outcome {
    match c {
        Ok(m) => Outcome::Pass(m),
        Err(m) => Outcome::Fail(m),
    }
}

// ---------------------------------------------------------------- criterion 1

fn oracle_grams(tokens: &[String]) -> Vec<String> {
    let mut g = tokens.to_vec();
    for w in tokens.windows(2) {
        g.push(format!("{} {}", w[0], w[1]));
    }
    g
}

/// Brute-force vocabulary, idf and normalized rows.
fn tfidf_oracle(
    docs: &[Vec<String>],
    max_features: usize,
) -> Option<(Vec<String>, Vec<f64>, Vec<Vec<f64>>)> {
    let grams: Vec<Vec<String>> = docs.iter().map(|d| oracle_grams(d)).collect();
    let mut total: BTreeMap<&str, usize> = BTreeMap::new();
    for g in grams.iter().flatten() {
        *total.entry(g.as_str()).or_default() += 1;
    }
    if total.is_empty() {
        return None;
    }
    let mut ranked: Vec<(&str, usize)> = total.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut vocab: Vec<String> = ranked
        .iter()
        .take(max_features)
        .map(|(t, _)| t.to_string())
        .collect();
    vocab.sort();
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| {
            let df = grams.iter().filter(|g| g.contains(t)).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();
    let rows = grams
        .iter()
        .map(|g| {
            let mut row: Vec<f64> = vocab
                .iter()
                .zip(&idf)
                .map(|(t, w)| g.iter().filter(|x| *x == t).count() as f64 * w)
                .collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
            row
        })
        .collect();
    Some((vocab, idf, rows))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let alphabet = ["a", "b", "c", "d", "த", "ம", "ழ"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked_cells = 0usize;
    for case in 0..200 {
        let docs: Vec<Vec<String>> = (0..rng.gen_range(1..=10))
            .map(|_| {
                (0..rng.gen_range(0..=8))
                    .map(|_| alphabet[rng.gen_range(0..alphabet.len())].to_string())
                    .collect()
            })
            .collect();
        let max_features = if case % 2 == 0 {
            5000
        } else {
            rng.gen_range(1..12)
        };
        let tokenized: Vec<TokenizedDoc> = docs
            .iter()
            .enumerate()
            .map(|(i, d)| TokenizedDoc::new(i.to_string(), d.clone()))
            .collect();
        let cfg = TfidfConfig {
            max_features,
            ..TfidfConfig::default()
        };
        let fitted = fit_tfidf(&tokenized, cfg);
        let Some((vocab, idf, rows)) = tfidf_oracle(&docs, max_features) else {
            ensure!(fitted.is_err(), "case {case}: empty vocabulary accepted");
            continue;
        };
        let model = fitted.map_err(|e| format!("case {case}: {e}"))?;
        ensure!(
            model.terms() == vocab.as_slice(),
            "case {case}: vocabulary {:?} != {:?}",
            model.terms(),
            vocab
        );
        for (a, b) in model.idf_values().iter().zip(&idf) {
            ensure!((a - b).abs() <= 1e-9, "case {case}: idf {a} != {b}");
        }
        for (doc, want) in tokenized.iter().zip(&rows) {
            let got = model.transform(doc).to_dense();
            ensure!(got.len() == want.len(), "case {case}: width");
            for (a, b) in got.iter().zip(want) {
                ensure!((a - b).abs() <= 1e-9, "case {case}: weight {a} != {b}");
                checked_cells += 1;
            }
        }

        let n = rng.gen_range(2..12);
        let d = rng.gen_range(1..6);
        let data: Vec<f64> = (0..n * d)
            .map(|i| {
                if i % d == 0 && case % 5 == 0 {
                    3.5
                } else {
                    rng.gen_range(-50.0..50.0)
                }
            })
            .collect();
        let x = FeatureMatrix::from_vec(n, d, data).map_err(|e| e.to_string())?;
        let scaler = fit_scaler(&x, StdKind::Population).map_err(|e| e.to_string())?;
        let z = scaler.apply(&x).map_err(|e| e.to_string())?;
        for j in 0..d {
            let col: Vec<f64> = (0..n).map(|i| z.get(i, j)).collect();
            let mean = col.iter().sum::<f64>() / n as f64;
            ensure!(mean.abs() <= 1e-9, "case {case}: column {j} mean {mean}");
            if !scaler.is_constant(j) {
                let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
                ensure!(
                    (std - 1.0).abs() <= 1e-9,
                    "case {case}: column {j} std {std}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "200 corpora, {checked_cells} tf-idf cells, {elapsed:.2?}"
    ))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..100 {
        let n = rng.gen_range(1..60);
        let t: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let p: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let r = evaluate(&t, &p).map_err(|e| e.to_string())?;
        let mut f1s = [0.0; 2];
        let mut precs = [0.0; 2];
        let mut recs = [0.0; 2];
        for c in 0..2 {
            let tp = t
                .iter()
                .zip(&p)
                .filter(|(a, b)| **a == c && **b == c)
                .count() as f64;
            let pred = p.iter().filter(|b| **b == c).count() as f64;
            let sup = t.iter().filter(|a| **a == c).count() as f64;
            let prec = if pred == 0.0 { 0.0 } else { tp / pred };
            let rec = if sup == 0.0 { 0.0 } else { tp / sup };
            let f1 = if prec + rec == 0.0 {
                0.0
            } else {
                2.0 * prec * rec / (prec + rec)
            };
            for (truth, row) in r.confusion.0.iter().enumerate() {
                let want = t
                    .iter()
                    .zip(&p)
                    .filter(|(a, b)| **a == truth && **b == c)
                    .count();
                ensure!(row[c] == want, "case {case}: confusion[{truth}][{c}]");
            }
            ensure!(
                r.per_class[c].precision == prec,
                "case {case}: precision of {c}"
            );
            ensure!(r.per_class[c].recall == rec, "case {case}: recall of {c}");
            ensure!(r.per_class[c].f1 == f1, "case {case}: f1 of {c}");
            ensure!(
                r.per_class[c].support == sup as usize,
                "case {case}: support of {c}"
            );
            (f1s[c], precs[c], recs[c]) = (f1, prec, rec);
        }
        let acc = t.iter().zip(&p).filter(|(a, b)| a == b).count() as f64 / n as f64;
        ensure!(r.accuracy == acc, "case {case}: accuracy");
        ensure!(
            r.macro_f1 == (f1s[0] + f1s[1]) / 2.0,
            "case {case}: macro f1"
        );
        ensure!(
            r.macro_precision == (precs[0] + precs[1]) / 2.0,
            "case {case}: macro precision"
        );
        ensure!(
            r.macro_recall == (recs[0] + recs[1]) / 2.0,
            "case {case}: macro recall"
        );
    }
    let hand = evaluate(&[0, 0, 1, 1], &[0, 1, 1, 1]).map_err(|e| e.to_string())?;
    ensure!(
        (hand.macro_f1 - 0.73333).abs() <= 1e-5 + 1e-9,
        "hand case macro-F1 {}",
        hand.macro_f1
    );
    ensure!(
        (hand.macro_f1 - 11.0 / 15.0).abs() <= 1e-12,
        "hand case macro-F1 {}",
        hand.macro_f1
    );
    Ok(format!(
        "100 random pairs exact; hand case macro-F1 = {:.5}",
        hand.macro_f1
    ))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let linear = SvmParams {
        kernel: Kernel::Linear,
        c: 1.0,
        gamma: Gamma::Scale,
    };
    for case in 0..10 {
        let d = rng.gen_range(2..6);
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut rows = Vec::new();
        let mut y = Vec::new();
        while rows.len() < 60 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let s: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            if s.abs() > 0.5 {
                y.push(usize::from(s > 0.0));
                rows.push(x);
            }
        }
        if y.iter().all(|&l| l == y[0]) {
            continue;
        }
        let x = FeatureMatrix::from_rows(rows).map_err(|e| e.to_string())?;
        let m = train_svm(&x, &y, &linear).map_err(|e| e.to_string())?;
        ensure!(
            m.predict(&x).map_err(|e| e.to_string())? == y,
            "linear case {case}: training error"
        );
    }

    let xor = FeatureMatrix::from_rows(vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    ])
    .map_err(|e| e.to_string())?;
    let xor_y = [0, 0, 1, 1];
    let rbf = SvmParams {
        kernel: Kernel::Rbf,
        c: 10.0,
        gamma: Gamma::Scale,
    };
    let m = train_svm(&xor, &xor_y, &rbf).map_err(|e| e.to_string())?;
    ensure!(
        m.predict(&xor).map_err(|e| e.to_string())? == xor_y,
        "xor: training error"
    );

    let mut worst_sum = 0.0f64;
    for case in 0..50 {
        let n = rng.gen_range(10..40);
        let d = rng.gen_range(1..5);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let mut y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        y[0] = 0;
        y[1] = 1;
        let kernel = Kernel::ALL[case % 4];
        let c = [0.1, 1.0, 10.0, 100.0][(case / 4) % 4];
        let x = FeatureMatrix::from_rows(rows.clone()).map_err(|e| e.to_string())?;
        let m = train_svm(
            &x,
            &y,
            &SvmParams {
                kernel,
                c,
                gamma: Gamma::Scale,
            },
        )
        .map_err(|e| e.to_string())?;
        let sv = m.support_vectors();
        let mut sum = 0.0;
        for (k, &coef) in m.dual_coefficients().iter().enumerate() {
            let row = sv.row(k);
            let i = rows
                .iter()
                .position(|r| r.as_slice() == row)
                .ok_or_else(|| format!("case {case}: support vector not in training data"))?;
            let yi = if y[i] == 1 { 1.0 } else { -1.0 };
            let alpha = coef * yi;
            ensure!(
                (0.0..=c * (1.0 + 1e-12)).contains(&alpha),
                "case {case}: alpha {alpha} outside [0, {c}]"
            );
            sum += coef;
        }
        worst_sum = worst_sum.max(sum.abs());
        ensure!(
            sum.abs() <= 1e-6,
            "case {case}: |sum alpha y| = {}",
            sum.abs()
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("linear + xor fit exactly; 50 duals feasible (max |sum alpha y| {worst_sum:.1e}); {elapsed:.2?}"))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_prior = 0.0f64;
    for case in 0..20 {
        let n = rng.gen_range(20..80);
        let d = rng.gen_range(1..8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut y: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_bool(0.4))).collect();
        y[0] = 0;
        y[1] = 1;
        let x = FeatureMatrix::from_rows(rows).map_err(|e| e.to_string())?;
        let m = train_gradient_boosting(&x, &y, &BoostingConfig::default())
            .map_err(|e| e.to_string())?;
        let loss = m.training_loss();
        ensure!(loss.len() == 101, "case {case}: {} loss values", loss.len());
        for (r, w) in loss.windows(2).enumerate() {
            worst_rise = worst_rise.max(w[1] - w[0]);
            ensure!(
                w[1] <= w[0] + 1e-9,
                "case {case}: loss rose at round {}: {} -> {}",
                r + 1,
                w[0],
                w[1]
            );
        }
        let n1 = y.iter().filter(|&&l| l == 1).count();
        let prior = n1 as f64 / n as f64;
        ensure!(
            m.prior_log_odds() == (n1 as f64 / (n - n1) as f64).ln(),
            "case {case}: initial score is not the prior log-odds"
        );
        let p0 = m
            .truncated(0)
            .predict_proba(&x)
            .map_err(|e| e.to_string())?;
        for p in p0 {
            let diff = (p[1] - prior).abs();
            worst_prior = worst_prior.max(diff);
            ensure!(
                diff <= 4.0 * f64::EPSILON,
                "case {case}: round-0 probability {} vs prior {prior}",
                p[1]
            );
        }
    }
    Ok(format!(
        "20 datasets; max loss change {worst_rise:.1e}; round-0 probability within {worst_prior:.1e} of the prior"
    ))
}

// ------------------------------------------------------------ criteria 5 and 6

struct Dataset {
    dir: PathBuf,
    schema: Schema,
}

fn dataset() -> Option<Dataset> {
    let dir = PathBuf::from(std::env::var_os("REVDETECT_DATA_DIR")?);
    let mut schema = Schema::default();
    if let Ok(v) = std::env::var("REVDETECT_ID_COLUMN") {
        schema.id_column = v;
    }
    if let Ok(v) = std::env::var("REVDETECT_TEXT_COLUMN") {
        schema.text_column = v;
    }
    if let Ok(v) = std::env::var("REVDETECT_LABEL_COLUMN") {
        schema.label_column = v;
    }
    let d = Dataset { dir, schema };
    [
        "tamil_train",
        "tamil_test",
        "malayalam_train",
        "malayalam_test",
    ]
    .iter()
    .all(|n| d.file(n).is_some())
    .then_some(d)
}

impl Dataset {
    fn file(&self, stem: &str) -> Option<PathBuf> {
        ["csv", "tsv"]
            .iter()
            .map(|e| self.dir.join(format!("{stem}.{e}")))
            .find(|p| p.is_file())
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn criterion_5(data: &Dataset) -> Check {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |language: Language, model: ModelKind| -> Result<(f64, f64), String> {
        let lang = language.to_string();
        let config = PipelineConfig {
            language,
            model,
            train: data.file(&format!("{lang}_train")),
            output_dir: tmp.path().join(format!("{lang}_{model}")),
            schema: data.schema.clone(),
            ..PipelineConfig::default()
        };
        let summary = commands::cmd_train(&config).map_err(|e| e.to_string())?;
        let val = summary.validation.map(|r| r.macro_f1).unwrap_or(f64::NAN);
        let test = data
            .file(&format!("{lang}_test"))
            .ok_or("missing test file")?;
        let preds = config.output_dir.join("test_predictions.tsv");
        commands::cmd_predict(&summary.bundle_path, &test, &data.schema, &preds)
            .map_err(|e| e.to_string())?;
        let report =
            commands::cmd_evaluate(&preds, &test, &data.schema, language, &config.output_dir)
                .map_err(|e| e.to_string())?;
        Ok((val, report.macro_f1))
    };
    let (svm_val, svm_test) = run(Language::Tamil, ModelKind::SvmGrid)?;
    let (_, ens_ta) = run(Language::Tamil, ModelKind::Ensemble)?;
    let (_, ens_ml) = run(Language::Malayalam, ModelKind::Ensemble)?;
    let elapsed = start.elapsed();
    let summary = format!(
        "svm-grid ta val {svm_val:.3} test {svm_test:.3}; ensemble ta test {ens_ta:.3}, ml test {ens_ml:.3}; {elapsed:.0?}"
    );
    ensure!(
        within(svm_val, 0.85, 0.08),
        "svm-grid Tamil validation outside 0.85 ± 0.08: {summary}"
    );
    ensure!(
        within(svm_test, 0.77, 0.08),
        "svm-grid Tamil test outside 0.77 ± 0.08: {summary}"
    );
    ensure!(
        within(ens_ta, 0.90, 0.08),
        "ensemble Tamil test outside 0.90 ± 0.08: {summary}"
    );
    ensure!(
        within(ens_ml, 0.59, 0.10),
        "ensemble Malayalam test outside 0.59 ± 0.10: {summary}"
    );
    ensure!(
        elapsed < Duration::from_secs(15 * 60),
        "runtime over 15 min: {summary}"
    );
    Ok(summary)
}

fn criterion_6(data: &Dataset) -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let stats = |stem: &str, language: Language| {
        let path = data.file(stem).ok_or("missing file")?;
        commands::cmd_analyze(
            &path,
            &data.schema,
            language,
            &StatsOptions::default(),
            50,
            &tmp.path().join(stem),
        )
        .map_err(|e| e.to_string())
    };
    let ta = stats("tamil_test", Language::Tamil)?;
    let ml = stats("malayalam_test", Language::Malayalam)?;
    let summary = format!(
        "ta AI {:.2} / HUMAN {:.2} words; ml AI {:.2} / HUMAN {:.2} words; ml diversity AI {:.3} / HUMAN {:.3}",
        ta.ai.avg_word_count,
        ta.human.avg_word_count,
        ml.ai.avg_word_count,
        ml.human.avg_word_count,
        ml.ai.lexical_diversity,
        ml.human.lexical_diversity
    );
    ensure!(
        ta.ai.avg_word_count > ta.human.avg_word_count,
        "Tamil ordering: {summary}"
    );
    ensure!(
        ml.ai.avg_word_count < ml.human.avg_word_count,
        "Malayalam ordering: {summary}"
    );
    ensure!(
        ml.ai.lexical_diversity > ml.human.lexical_diversity,
        "Malayalam diversity ordering: {summary}"
    );
    for (got, want) in [
        (ta.ai.avg_word_count, 23.146),
        (ta.human.avg_word_count, 4.115),
        (ml.ai.avg_word_count, 12.05),
        (ml.human.avg_word_count, 22.57),
    ] {
        ensure!(
            (got - want).abs() <= 0.15 * want,
            "{got:.3} not within 15% of {want}: {summary}"
        );
    }
    Ok(summary)
}

// ---------------------------------------------------------- criteria 7 and 8

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_revdetect"))
}

fn run_ok(cmd: &mut Command) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "command failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn train(corpus: &Path, out: &Path, model: &str) -> Result<(), String> {
    run_ok(
        bin()
            .arg("train")
            .arg("--train")
            .arg(corpus)
            .arg("--model")
            .arg(model)
            .arg("--output-dir")
            .arg(out),
    )
}

fn predict(bundle: &Path, input: &Path, output: &Path) -> Result<(), String> {
    run_ok(
        bin()
            .arg("predict")
            .arg("--bundle")
            .arg(bundle)
            .arg("--input")
            .arg(input)
            .arg("--output")
            .arg(output),
    )
}

fn read(p: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn criterion_7() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = tmp.path().join("train.csv");
    let test = tmp.path().join("test.csv");
    common::write_synthetic(&corpus, 200, 7);
    common::write_synthetic(&test, 40, 8);
    let mut compared = 0;
    for model in ["svm-grid", "ensemble"] {
        let (a, b) = (
            tmp.path().join(format!("{model}_a")),
            tmp.path().join(format!("{model}_b")),
        );
        train(&corpus, &a, model)?;
        train(&corpus, &b, model)?;
        for f in [
            commands::BUNDLE_FILE,
            commands::VALIDATION_PREDICTIONS_FILE,
            commands::VALIDATION_KV_FILE,
        ] {
            ensure!(
                read(&a.join(f))? == read(&b.join(f))?,
                "{model}: {f} differs between runs"
            );
            compared += 1;
        }
        predict(&a.join(commands::BUNDLE_FILE), &test, &a.join("test.tsv"))?;
        predict(&b.join(commands::BUNDLE_FILE), &test, &b.join("test.tsv"))?;
        ensure!(
            read(&a.join("test.tsv"))? == read(&b.join("test.tsv"))?,
            "{model}: test predictions differ"
        );
        compared += 1;
    }
    Ok(format!(
        "{compared} artifact pairs byte-identical across repeated runs"
    ))
}

fn exit_code_for(bundle: &Path, input: &Path, out: &Path) -> Result<(Option<i32>, String), String> {
    let o = bin()
        .arg("predict")
        .arg("--bundle")
        .arg(bundle)
        .arg("--input")
        .arg(input)
        .arg("--output")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        o.status.code(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    ))
}

fn criterion_8() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = tmp.path().join("train.csv");
    let test = tmp.path().join("test.csv");
    common::write_synthetic(&corpus, 160, 11);
    common::write_synthetic(&test, 50, 12);
    let out = tmp.path().join("run");
    train(&corpus, &out, "ensemble")?;
    let bundle_path = out.join(commands::BUNDLE_FILE);

    let original = ModelBundle::load(&bundle_path).map_err(|e| e.to_string())?;
    let resaved = tmp.path().join("resaved.rvd");
    original.save(&resaved).map_err(|e| e.to_string())?;
    let reloaded = ModelBundle::load(&resaved).map_err(|e| e.to_string())?;
    let gold = load_reviews(&test, &Schema::default(), Language::Tamil, Split::Test)
        .map_err(|e| e.to_string())?;
    let p1 = original.predict(&gold).map_err(|e| e.to_string())?;
    let p2 = reloaded.predict(&gold).map_err(|e| e.to_string())?;
    ensure!(p1.len() == 50, "expected 50 predictions, got {}", p1.len());
    for (a, b) in p1.iter().zip(&p2) {
        ensure!(
            a.p_ai.to_bits() == b.p_ai.to_bits() && a.predicted == b.predicted,
            "prediction for {} changed",
            a.id
        );
    }
    predict(&bundle_path, &test, &tmp.path().join("p1.tsv"))?;
    predict(&resaved, &test, &tmp.path().join("p2.tsv"))?;
    ensure!(
        read(&tmp.path().join("p1.tsv"))? == read(&tmp.path().join("p2.tsv"))?,
        "prediction files differ"
    );
    let from_file = read_predictions(&tmp.path().join("p1.tsv")).map_err(|e| e.to_string())?;
    ensure!(from_file == p1, "written predictions do not round-trip");

    let bytes = read(&bundle_path)?;
    let mut cases: HashMap<&str, (Vec<u8>, &str)> = HashMap::new();
    let mut flipped = bytes.clone();
    flipped[bytes.len() / 2] ^= 0x01;
    cases.insert("corrupted", (flipped, "checksum"));
    cases.insert(
        "truncated",
        (bytes[..bytes.len() - 100].to_vec(), "checksum"),
    );
    let mut newer = bytes.clone();
    newer[8..10].copy_from_slice(&(FORMAT_MAJOR + 1).to_le_bytes());
    cases.insert("newer major version", (newer, "version"));
    let mut magic = bytes.clone();
    magic[..4].copy_from_slice(b"JUNK");
    cases.insert("wrong magic", (magic, "magic"));
    let mut names: Vec<&str> = cases.keys().copied().collect();
    names.sort();
    for name in &names {
        let (data, needle) = &cases[name];
        let path = tmp.path().join("bad.rvd");
        std::fs::write(&path, data).map_err(|e| e.to_string())?;
        let (code, stderr) = exit_code_for(&path, &test, &tmp.path().join("bad.tsv"))?;
        ensure!(
            code == Some(2),
            "{name} bundle: exit code {code:?}, stderr {stderr}"
        );
        ensure!(
            stderr.contains(needle),
            "{name} bundle: message lacks `{needle}`: {stderr}"
        );
    }
    let usage = bin()
        .arg("predict")
        .arg("--no-such-flag")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        usage.status.code() == Some(1),
        "usage error exit code {:?}",
        usage.status.code()
    );
    Ok(format!(
        "bit-identical after save/load; refused {} with exit code 2",
        names.join(", ")
    ))
}

// ------------------------------------------------------------------- driver

fn main() {
    let data = dataset();
    let criteria: Vec<(u32, &str, Box<dyn FnOnce() -> Outcome>)> = vec![
        (1, "feature oracles", Box::new(|| from_check(criterion_1()))),
        (2, "metric oracle", Box::new(|| from_check(criterion_2()))),
        (3, "SVM correctness", Box::new(|| from_check(criterion_3()))),
        (
            4,
            "gradient boosting",
            Box::new(|| from_check(criterion_4())),
        ),
        (
            5,
            "end-to-end reproduction",
            Box::new(|| match &data {
                Some(d) => from_check(criterion_5(d)),
                None => Outcome::Skip("dataset unavailable (set REVDETECT_DATA_DIR)".into()),
            }),
        ),
        (
            6,
            "corpus statistics",
            Box::new(|| match &data {
                Some(d) => from_check(criterion_6(d)),
                None => Outcome::Skip("dataset unavailable (set REVDETECT_DATA_DIR)".into()),
            }),
        ),
        (7, "determinism", Box::new(|| from_check(criterion_7()))),
        (8, "persistence", Box::new(|| from_check(criterion_8()))),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        match outcome {
            Outcome::Pass(m) => println!("criterion {n} ({name}): PASS - {m}"),
            Outcome::Skip(m) => println!("criterion {n} ({name}): SKIP - {m}"),
            Outcome::Fail(m) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL - {m}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
