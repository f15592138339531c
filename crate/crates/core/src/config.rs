//! Pipeline configuration, loadable from TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classical::{BoostingConfig, Scoring, SvmGrid, SvmParams};
use crate::corpus::{Language, Schema};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::textprep::CleanOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Single SVM with the `svm` parameters.
    Svm,
    /// SVM chosen by cross-validated grid search.
    SvmGrid,
    Rf,
    Gb,
    /// Soft vote of random forest and gradient boosting.
    #[default]
    Ensemble,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Svm,
        ModelKind::SvmGrid,
        ModelKind::Rf,
        ModelKind::Gb,
        ModelKind::Ensemble,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::SvmGrid => "svm-grid",
            ModelKind::Rf => "rf",
            ModelKind::Gb => "gb",
            ModelKind::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                format!("unknown model `{s}` (expected svm, svm-grid, rf, gb or ensemble)")
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { n_trees: 100 }
    }
}

/// Everything `train` needs. `seed` drives the validation split, the
/// Word2Vec stream, the CV folds and the forest; it replaces
/// `features.word2vec.seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub language: Language,
    pub train: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub model: ModelKind,
    pub seed: u64,
    pub validation_fraction: f64,
    pub schema: Schema,
    pub clean: CleanOptions,
    pub features: FeatureConfig,
    pub svm: SvmParams,
    pub grid: SvmGrid,
    pub folds: usize,
    pub scoring: Scoring,
    pub forest: ForestConfig,
    pub boosting: BoostingConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            language: Language::Tamil,
            train: None,
            output_dir: PathBuf::from("out"),
            model: ModelKind::default(),
            seed: 42,
            validation_fraction: 0.2,
            schema: Schema::default(),
            clean: CleanOptions::default(),
            features: FeatureConfig::default(),
            svm: SvmParams::default(),
            grid: SvmGrid::default(),
            folds: 5,
            scoring: Scoring::default(),
            forest: ForestConfig::default(),
            boosting: BoostingConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Feature settings with the pipeline seed applied.
    pub fn feature_config(&self) -> FeatureConfig {
        let mut f = self.features;
        f.word2vec.seed = self.seed;
        f
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad(format!(
                "validation_fraction must be in [0, 1), got {}",
                self.validation_fraction
            ));
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        let f = &self.features;
        if f.tfidf.max_features == 0
            || f.tfidf.ngram_min == 0
            || f.tfidf.ngram_min > f.tfidf.ngram_max
        {
            return bad("tfidf needs max_features > 0 and 1 <= ngram_min <= ngram_max".into());
        }
        if f.word2vec.dim == 0 || f.word2vec.window == 0 {
            return bad("word2vec dim and window must be positive".into());
        }
        if !(self.svm.c > 0.0) {
            return bad(format!("svm.c must be positive, got {}", self.svm.c));
        }
        if self.forest.n_trees == 0 {
            return bad("forest.n_trees must be positive".into());
        }
        if !(self.boosting.learning_rate > 0.0) || self.boosting.max_depth == 0 {
            return bad("boosting needs learning_rate > 0 and max_depth > 0".into());
        }
        Ok(())
    }
}
