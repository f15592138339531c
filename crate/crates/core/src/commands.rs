//! The operations behind each CLI subcommand. Each returns its in-memory
//! result as well as writing files, so they can be driven from tests.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    align_predictions, corpus_statistics_with, cross_model_misclassifications, error_listing,
    word_frequencies, CorpusStats, ErrorListing, MisclassificationTable, StatsOptions,
};
use crate::bundle::ModelBundle;
use crate::classical::{
    svm_grid_search, train_gradient_boosting, train_random_forest, train_svm, CvResult,
    TrainedModel, VotingModel,
};
use crate::config::{ModelKind, PipelineConfig};
use crate::corpus::{
    encode_labels, load_reviews, split_train_validation, write_reviews, Label, LabeledCorpus,
    Language, Schema, Split,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, read_predictions, write_predictions, EvalReport, PredictionRecord};
use crate::features::{FeatureMatrix, FeaturePipeline};
use crate::textprep::preprocess_corpus_with;

pub const BUNDLE_FILE: &str = "bundle.rvd";
pub const VALIDATION_SLICE_FILE: &str = "validation.tsv";
pub const VALIDATION_PREDICTIONS_FILE: &str = "validation_predictions.tsv";
pub const VALIDATION_REPORT_FILE: &str = "validation_report.txt";
pub const VALIDATION_KV_FILE: &str = "validation_report.kv";
pub const GRID_FILE: &str = "grid_search.tsv";
pub const CONFIG_FILE: &str = "config.toml";

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Trains the configured classifier on an already scaled matrix.
pub fn train_model(
    config: &PipelineConfig,
    x: &FeatureMatrix,
    y: &[usize],
) -> Result<(TrainedModel, Option<CvResult>)> {
    Ok(match config.model {
        ModelKind::Svm => (TrainedModel::Svm(train_svm(x, y, &config.svm)?), None),
        ModelKind::SvmGrid => {
            let (cv, model) = svm_grid_search(
                x,
                y,
                &config.grid,
                config.folds,
                config.seed,
                config.scoring,
            )?;
            (TrainedModel::Svm(model), Some(cv))
        }
        ModelKind::Rf => (
            TrainedModel::Forest(train_random_forest(
                x,
                y,
                config.forest.n_trees,
                config.seed,
            )?),
            None,
        ),
        ModelKind::Gb => (
            TrainedModel::Boosting(train_gradient_boosting(x, y, &config.boosting)?),
            None,
        ),
        ModelKind::Ensemble => (
            TrainedModel::Voting(VotingModel {
                forest: train_random_forest(x, y, config.forest.n_trees, config.seed)?,
                boosting: train_gradient_boosting(x, y, &config.boosting)?,
            }),
            None,
        ),
    })
}

/// Fits features and the classifier on `corpus`.
pub fn fit_bundle(
    config: &PipelineConfig,
    corpus: &LabeledCorpus,
) -> Result<(ModelBundle, Option<CvResult>)> {
    let (y, labels) = encode_labels(corpus)?;
    let docs = preprocess_corpus_with(corpus, &config.clean);
    let (features, x) = FeaturePipeline::fit(&docs, &config.feature_config())?;
    let (model, cv) = train_model(config, &x, &y)?;
    let bundle = ModelBundle {
        language: config.language,
        kind: config.model,
        clean: config.clean,
        labels,
        features,
        model,
    };
    Ok((bundle, cv))
}

#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub bundle_path: PathBuf,
    pub train_size: usize,
    pub validation_size: usize,
    pub validation: Option<EvalReport>,
    pub grid: Option<CvResult>,
}

/// Splits the train file, fits on the training part only, and writes the
/// bundle plus validation artifacts into `config.output_dir`.
pub fn cmd_train(config: &PipelineConfig) -> Result<TrainSummary> {
    config.validate()?;
    let path = config
        .train
        .as_deref()
        .ok_or_else(|| Error::Config("no training file given".into()))?;
    let corpus = load_reviews(
        path,
        &config.schema.for_path(path),
        config.language,
        Split::Train,
    )?;
    let (train, validation) =
        split_train_validation(&corpus, config.validation_fraction, config.seed)?;
    let (bundle, grid) = fit_bundle(config, &train)?;

    let out = &config.output_dir;
    ensure_dir(out)?;
    let bundle_path = out.join(BUNDLE_FILE);
    bundle.save(&bundle_path)?;
    write_file(&out.join(CONFIG_FILE), &config.to_toml())?;
    if let Some(cv) = &grid {
        write_file(&out.join(GRID_FILE), &cv.to_tsv())?;
    }

    let report = if validation.is_empty() {
        None
    } else {
        write_reviews(&out.join(VALIDATION_SLICE_FILE), &validation)?;
        let records = bundle.predict(&validation)?;
        write_predictions(&out.join(VALIDATION_PREDICTIONS_FILE), &records)?;
        let report = evaluate_records(&validation, &records, "validation predictions")?;
        write_file(&out.join(VALIDATION_REPORT_FILE), &report.render())?;
        write_file(&out.join(VALIDATION_KV_FILE), &report.to_key_values())?;
        Some(report)
    };
    Ok(TrainSummary {
        bundle_path,
        train_size: train.len(),
        validation_size: validation.len(),
        validation: report,
        grid,
    })
}

/// Predicts every row of `input` and writes the interchange file.
pub fn cmd_predict(
    bundle_path: &Path,
    input: &Path,
    schema: &Schema,
    output: &Path,
) -> Result<Vec<PredictionRecord>> {
    let bundle = ModelBundle::load(bundle_path)?;
    let corpus = load_reviews(input, &schema.for_path(input), bundle.language, Split::Test)?;
    let records = bundle.predict(&corpus)?;
    write_predictions(output, &records)?;
    Ok(records)
}

fn evaluate_records(
    gold: &LabeledCorpus,
    records: &[PredictionRecord],
    source_name: &str,
) -> Result<EvalReport> {
    let (y_true, map) = encode_labels(gold)?;
    let aligned = align_predictions(gold, records, source_name)?;
    let y_pred: Vec<usize> = aligned.iter().map(|r| map.encode(r.predicted)).collect();
    evaluate(&y_true, &y_pred)
}

/// Scores a predictions file from any producer against a gold corpus.
/// Writes `report.txt` and `report.kv` into `output_dir`.
pub fn cmd_evaluate(
    predictions: &Path,
    gold: &Path,
    schema: &Schema,
    language: Language,
    output_dir: &Path,
) -> Result<EvalReport> {
    let records = read_predictions(predictions)?;
    let gold = load_reviews(gold, &schema.for_path(gold), language, Split::Test)?;
    let report = evaluate_records(&gold, &records, &predictions.display().to_string())?;
    ensure_dir(output_dir)?;
    write_file(&output_dir.join("report.txt"), &report.render())?;
    write_file(&output_dir.join("report.kv"), &report.to_key_values())?;
    Ok(report)
}

/// Writes `stats.kv`, `stats.txt` and `top_words_<LABEL>.tsv` per class.
pub fn cmd_analyze(
    corpus: &Path,
    schema: &Schema,
    language: Language,
    options: &StatsOptions,
    top_n: usize,
    output_dir: &Path,
) -> Result<CorpusStats> {
    let corpus = load_reviews(corpus, &schema.for_path(corpus), language, Split::Test)?;
    let stats = corpus_statistics_with(&corpus, options)?;
    ensure_dir(output_dir)?;
    write_file(&output_dir.join("stats.kv"), &stats.to_key_values())?;
    write_file(&output_dir.join("stats.txt"), &stats.render())?;
    for label in Label::ALL {
        let mut table = word_frequencies(&corpus, label, options);
        table.entries.truncate(top_n);
        write_file(
            &output_dir.join(format!("top_words_{label}.tsv")),
            &table.to_tsv(),
        )?;
    }
    Ok(stats)
}

/// Model names for prediction files: file stems, or full paths when two
/// stems collide.
pub fn model_names(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        })
        .collect();
    stems
        .iter()
        .zip(paths)
        .map(|(s, p)| {
            if stems.iter().filter(|t| *t == s).count() > 1 {
                p.display().to_string()
            } else {
                s.clone()
            }
        })
        .collect()
}

/// Reviews misclassified by at least two of the prediction files.
pub fn cmd_compare(
    gold: &Path,
    predictions: &[PathBuf],
    schema: &Schema,
    language: Language,
    output: &Path,
) -> Result<MisclassificationTable> {
    if predictions.len() < 2 {
        return Err(Error::Config(
            "compare needs at least two prediction files".into(),
        ));
    }
    let gold = load_reviews(gold, &schema.for_path(gold), language, Split::Test)?;
    let models: Vec<(String, Vec<PredictionRecord>)> = model_names(predictions)
        .into_iter()
        .zip(predictions)
        .map(|(name, p)| Ok((name, read_predictions(p)?)))
        .collect::<Result<_>>()?;
    let table = cross_model_misclassifications(&gold, &models)?;
    write_file(output, &table.to_tsv())?;
    Ok(table)
}

/// False positives and false negatives of one predictions file.
pub fn cmd_errors(
    gold: &Path,
    predictions: &Path,
    schema: &Schema,
    language: Language,
    output: &Path,
) -> Result<ErrorListing> {
    let gold = load_reviews(gold, &schema.for_path(gold), language, Split::Test)?;
    let listing = error_listing(&gold, &read_predictions(predictions)?)?;
    write_file(output, &listing.to_tsv())?;
    Ok(listing)
}
