use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use revdetect::analysis::{StatsOptions, Tokenization};
use revdetect::classical::Kernel;
use revdetect::commands;
use revdetect::config::{ModelKind, PipelineConfig};
use revdetect::corpus::{Language, Schema};
use revdetect::{Error, Result};

/// Detect AI-generated Tamil and Malayalam product reviews.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
/// 3 internal error.
#[derive(Parser)]
#[command(name = "revdetect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SchemaArgs {
    /// Id column name; pass an empty string when the file has none.
    #[arg(long)]
    id_column: Option<String>,
    #[arg(long)]
    text_column: Option<String>,
    #[arg(long)]
    label_column: Option<String>,
    /// Field delimiter; `.tsv` files always use tab.
    #[arg(long)]
    delimiter: Option<char>,
}

impl SchemaArgs {
    fn apply(&self, base: &mut Schema) {
        if let Some(v) = &self.id_column {
            base.id_column = v.clone();
        }
        if let Some(v) = &self.text_column {
            base.text_column = v.clone();
        }
        if let Some(v) = &self.label_column {
            base.label_column = v.clone();
        }
        if let Some(v) = self.delimiter {
            base.delimiter = v;
        }
    }

    fn schema(&self) -> Schema {
        let mut s = Schema::default();
        self.apply(&mut s);
        s
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit features and a classifier; write the bundle and validation report.
    Train(TrainArgs),
    /// Predict a review file with a saved bundle.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Score a predictions file against gold labels.
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value = "tamil")]
        language: Language,
        #[arg(long)]
        output_dir: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Per-class corpus statistics and most frequent words.
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "tamil")]
        language: Language,
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 50)]
        top: usize,
        /// Count raw whitespace tokens instead of cleaned ones.
        #[arg(long)]
        whitespace_tokens: bool,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Reviews misclassified by at least two prediction files.
    Compare {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long = "predictions", num_args = 2.., required = true)]
        predictions: Vec<PathBuf>,
        #[arg(long, default_value = "tamil")]
        language: Language,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// False positives and false negatives of one predictions file.
    Errors {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, default_value = "tamil")]
        language: Language,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// TOML config; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    language: Option<Language>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    validation_fraction: Option<f64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    max_features: Option<usize>,
    #[arg(long)]
    embedding_dim: Option<usize>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    kernel: Option<Kernel>,
    #[arg(long)]
    c: Option<f64>,
    #[command(flatten)]
    schema: SchemaArgs,
}

impl TrainArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($flag:ident => $($field:tt)+) => {
                if let Some(v) = self.$flag.clone() {
                    c.$($field)+ = v;
                }
            };
        }
        if self.train.is_some() {
            c.train = self.train.clone();
        }
        set!(language => language);
        set!(model => model);
        set!(output_dir => output_dir);
        set!(seed => seed);
        set!(validation_fraction => validation_fraction);
        set!(folds => folds);
        set!(max_features => features.tfidf.max_features);
        set!(embedding_dim => features.word2vec.dim);
        set!(trees => forest.n_trees);
        set!(rounds => boosting.n_rounds);
        set!(learning_rate => boosting.learning_rate);
        set!(kernel => svm.kernel);
        set!(c => svm.c);
        self.schema.apply(&mut c.schema);
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let config = args.config()?;
            let s = commands::cmd_train(&config)?;
            println!(
                "trained {} on {} reviews ({} held out); bundle written to {}",
                config.model,
                s.train_size,
                s.validation_size,
                s.bundle_path.display()
            );
            if let Some(cv) = &s.grid {
                let best = &cv.entries[cv.best];
                println!(
                    "grid search best: {} (mean {:.4})",
                    best.params, best.mean_score
                );
            }
            if let Some(r) = &s.validation {
                print!("{}", r.render());
            }
        }
        Command::Predict {
            bundle,
            input,
            output,
            schema,
        } => {
            let n = commands::cmd_predict(&bundle, &input, &schema.schema(), &output)?.len();
            println!("wrote {n} predictions to {}", output.display());
        }
        Command::Evaluate {
            predictions,
            gold,
            language,
            output_dir,
            schema,
        } => {
            let r = commands::cmd_evaluate(
                &predictions,
                &gold,
                &schema.schema(),
                language,
                &output_dir,
            )?;
            print!("{}", r.render());
        }
        Command::Analyze {
            corpus,
            language,
            output_dir,
            top,
            whitespace_tokens,
            schema,
        } => {
            let opts = StatsOptions {
                tokenization: if whitespace_tokens {
                    Tokenization::Whitespace
                } else {
                    Tokenization::Pipeline
                },
                ..StatsOptions::default()
            };
            let s = commands::cmd_analyze(
                &corpus,
                &schema.schema(),
                language,
                &opts,
                top,
                &output_dir,
            )?;
            print!("{}", s.render());
        }
        Command::Compare {
            gold,
            predictions,
            language,
            output,
            schema,
        } => {
            let t =
                commands::cmd_compare(&gold, &predictions, &schema.schema(), language, &output)?;
            println!(
                "{} reviews misclassified by two or more models",
                t.rows.len()
            );
        }
        Command::Errors {
            gold,
            predictions,
            language,
            output,
            schema,
        } => {
            let e = commands::cmd_errors(&gold, &predictions, &schema.schema(), language, &output)?;
            println!(
                "{} false positives, {} false negatives",
                e.false_positives.len(),
                e.false_negatives.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code().clamp(1, 3) as u8
}
