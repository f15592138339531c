//! Confusion matrix, per-class and macro precision/recall/F1, accuracy, and
//! the text formats reports and predictions are exchanged in.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::Label;
use crate::error::{Error, Result};

pub const N_CLASSES: usize = 2;

/// Counts indexed `[true class][predicted class]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionMatrix(pub [[usize; N_CLASSES]; N_CLASSES]);

impl ConfusionMatrix {
    pub fn cell(&self, truth: usize, predicted: usize) -> usize {
        self.0[truth][predicted]
    }

    pub fn total(&self) -> usize {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..N_CLASSES).map(|i| self.0[i][i]).sum()
    }
}

fn check_pair(y_true: &[usize], y_pred: &[usize]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    if let Some(&bad) = y_true.iter().chain(y_pred).find(|&&l| l >= N_CLASSES) {
        return Err(Error::InvalidInput(format!(
            "label index {bad} out of range"
        )));
    }
    Ok(())
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize]) -> Result<ConfusionMatrix> {
    check_pair(y_true, y_pred)?;
    let mut m = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        m.0[t][p] += 1;
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    /// Indexed by class index (AI = 0, HUMAN = 1).
    pub per_class: [ClassScores; N_CLASSES],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        let total = confusion.total();
        if total == 0 {
            return Err(Error::InvalidInput("cannot evaluate zero samples".into()));
        }
        let m = &confusion.0;
        let per_class: [ClassScores; N_CLASSES] = std::array::from_fn(|c| {
            let tp = m[c][c];
            let predicted: usize = (0..N_CLASSES).map(|t| m[t][c]).sum();
            let support: usize = m[c].iter().sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                precision,
                recall,
                f1,
                support,
            }
        });
        let mean =
            |f: fn(&ClassScores) -> f64| per_class.iter().map(f).sum::<f64>() / N_CLASSES as f64;
        Ok(EvalReport {
            confusion,
            macro_precision: mean(|c| c.precision),
            macro_recall: mean(|c| c.recall),
            macro_f1: mean(|c| c.f1),
            accuracy: ratio(confusion.trace(), total),
            per_class,
        })
    }

    /// Human-readable table, two decimals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>9} {:>9} {:>9}",
            "", "precision", "recall", "f1-score", "support"
        );
        for (c, s) in self.per_class.iter().enumerate() {
            let name = Label::ALL[c].as_str();
            let _ = writeln!(
                out,
                "{:<12} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                name, s.precision, s.recall, s.f1, s.support
            );
        }
        let total = self.confusion.total();
        let _ = writeln!(
            out,
            "{:<12} {:>9.2} {:>9.2} {:>9.2} {:>9}",
            "macro avg", self.macro_precision, self.macro_recall, self.macro_f1, total
        );
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>9} {:>9.2} {:>9}",
            "accuracy", "", "", self.accuracy, total
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "confusion (rows = gold, columns = predicted)");
        let _ = writeln!(out, "{:<12} {:>9} {:>9}", "", "AI", "HUMAN");
        for (t, row) in self.confusion.0.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<12} {:>9} {:>9}",
                Label::ALL[t].as_str(),
                row[0],
                row[1]
            );
        }
        out
    }

    /// Flat `key=value` lines at full precision.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (c, s) in self.per_class.iter().enumerate() {
            let name = Label::ALL[c].as_str();
            let _ = writeln!(out, "{name}.precision={}", s.precision);
            let _ = writeln!(out, "{name}.recall={}", s.recall);
            let _ = writeln!(out, "{name}.f1={}", s.f1);
            let _ = writeln!(out, "{name}.support={}", s.support);
        }
        let _ = writeln!(out, "macro.precision={}", self.macro_precision);
        let _ = writeln!(out, "macro.recall={}", self.macro_recall);
        let _ = writeln!(out, "macro.f1={}", self.macro_f1);
        let _ = writeln!(out, "accuracy={}", self.accuracy);
        for t in 0..N_CLASSES {
            for p in 0..N_CLASSES {
                let _ = writeln!(
                    out,
                    "confusion.{}.{}={}",
                    Label::ALL[t].as_str(),
                    Label::ALL[p].as_str(),
                    self.confusion.0[t][p]
                );
            }
        }
        out
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let kv = parse_key_values(text)?;
        let get = |key: &str| -> Result<&str> {
            kv.get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::Format(format!("report is missing `{key}`")))
        };
        let float = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| Error::Format(format!("`{key}` is not a number")))
        };
        let int = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| Error::Format(format!("`{key}` is not a count")))
        };
        let mut confusion = ConfusionMatrix::default();
        for t in 0..N_CLASSES {
            for p in 0..N_CLASSES {
                confusion.0[t][p] = int(&format!(
                    "confusion.{}.{}",
                    Label::ALL[t].as_str(),
                    Label::ALL[p].as_str()
                ))?;
            }
        }
        let mut per_class = [ClassScores::default(); N_CLASSES];
        for (c, s) in per_class.iter_mut().enumerate() {
            let name = Label::ALL[c].as_str();
            *s = ClassScores {
                precision: float(&format!("{name}.precision"))?,
                recall: float(&format!("{name}.recall"))?,
                f1: float(&format!("{name}.f1"))?,
                support: int(&format!("{name}.support"))?,
            };
        }
        Ok(EvalReport {
            confusion,
            per_class,
            macro_precision: float("macro.precision")?,
            macro_recall: float("macro.recall")?,
            macro_f1: float("macro.f1")?,
            accuracy: float("accuracy")?,
        })
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn evaluate(y_true: &[usize], y_pred: &[usize]) -> Result<EvalReport> {
    if y_true.is_empty() {
        return Err(Error::InvalidInput("cannot evaluate zero samples".into()));
    }
    EvalReport::from_confusion(confusion_matrix(y_true, y_pred)?)
}

pub fn render_report(report: &EvalReport) -> String {
    report.render()
}

/// One row of the tab-separated predictions interchange file.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRecord {
    pub id: String,
    pub gold: Option<Label>,
    pub predicted: Label,
    /// Probability of class AI.
    pub p_ai: f64,
}

pub const PREDICTION_HEADER: [&str; 4] = ["id", "gold", "predicted", "p_ai"];

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    std::fs::write(path, predictions_to_string(records)).map_err(|e| Error::io(path, e))
}

/// Header plus one line per record. `p_ai` is written with Rust's
/// shortest round-trip float formatting.
pub fn predictions_to_string(records: &[PredictionRecord]) -> String {
    let mut out = PREDICTION_HEADER.join("\t");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.id,
            r.gold.map_or("", Label::as_str),
            r.predicted,
            r.p_ai
        );
    }
    out
}

/// Reads a predictions file. The `gold` column may be absent or empty.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = |row: usize, msg: String| Error::Csv {
        path: path.to_path_buf(),
        message: format!("row {row}: {msg}"),
    };
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| format(1, "missing header".into()))?
        .split('\t')
        .map(str::trim)
        .collect();
    let col = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let missing = |c: &str| Error::MissingColumn {
        path: path.to_path_buf(),
        column: c.into(),
    };
    let id_col = col("id").ok_or_else(|| missing("id"))?;
    let pred_col = col("predicted").ok_or_else(|| missing("predicted"))?;
    let p_col = col("p_ai").ok_or_else(|| missing("p_ai"))?;
    let gold_col = col("gold");

    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = n + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let field = |c: usize| fields.get(c).map(|s| s.trim()).unwrap_or("");
        let label = |s: &str| {
            s.parse::<Label>()
                .map_err(|l| format(row, format!("unknown label `{l}`")))
        };
        let id = field(id_col).to_string();
        if id.is_empty() {
            return Err(format(row, "empty id".into()));
        }
        let gold = match gold_col.map(field) {
            None | Some("") => None,
            Some(s) => Some(label(s)?),
        };
        let predicted = label(field(pred_col))?;
        let p_ai: f64 = field(p_col)
            .parse()
            .map_err(|_| format(row, format!("p_ai `{}` is not a number", field(p_col))))?;
        if !(0.0..=1.0).contains(&p_ai) {
            return Err(format(row, format!("p_ai {p_ai} outside [0, 1]")));
        }
        records.push(PredictionRecord {
            id,
            gold,
            predicted,
            p_ai,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_examples() {
        assert_eq!(
            confusion_matrix(&[0, 1, 0], &[0, 1, 0]).unwrap(),
            ConfusionMatrix([[2, 0], [0, 1]])
        );
        assert_eq!(
            confusion_matrix(&[0, 0], &[1, 1]).unwrap(),
            ConfusionMatrix([[0, 2], [0, 0]])
        );
        assert!(confusion_matrix(&[0, 1], &[0]).is_err());
        assert!(confusion_matrix(&[0, 2], &[0, 1]).is_err());
    }

    #[test]
    fn six_humans_called_ai() {
        // 48 AI all correct, 52 HUMAN of which 6 predicted AI
        let y_true: Vec<usize> = [vec![0; 48], vec![1; 52]].concat();
        let mut y_pred = y_true.clone();
        y_pred[48..54].iter_mut().for_each(|p| *p = 0);
        let m = confusion_matrix(&y_true, &y_pred).unwrap();
        assert_eq!(m.cell(1, 0), 6);
        assert_eq!(m.cell(0, 1), 0);
    }

    #[test]
    fn hand_computed_report() {
        let r = evaluate(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        assert_eq!(r.per_class[0].precision, 1.0);
        assert_eq!(r.per_class[0].recall, 0.5);
        assert!((r.per_class[0].f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.per_class[1].precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.per_class[1].recall, 1.0);
        assert!((r.per_class[1].f1 - 0.8).abs() < 1e-15);
        assert!((r.macro_f1 - 0.733_333_333_333_333_3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_predictors() {
        let perfect = evaluate(&[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!((perfect.macro_f1, perfect.accuracy), (1.0, 1.0));

        let y_true: Vec<usize> = [vec![0; 100], vec![1; 100]].concat();
        let r = evaluate(&y_true, &[0; 200]).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert!((r.macro_f1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.per_class[1].precision, 0.0);

        assert!(evaluate(&[], &[]).is_err());
    }

    #[test]
    fn rendering() {
        let mut r = evaluate(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        r.macro_f1 = 0.8534;
        let text = r.render();
        assert!(text
            .lines()
            .any(|l| l.starts_with("macro avg") && l.contains("0.85")));
        let class_rows = text
            .lines()
            .filter(|l| l.starts_with("AI ") || l.starts_with("HUMAN "))
            .count();
        // two class rows in the metrics table, two in the confusion table
        assert_eq!(class_rows, 4);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("macro avg")).count(),
            1
        );
        let kv = r.to_key_values();
        assert!(kv.contains("macro.f1=0.8534\n"));
        assert_eq!(EvalReport::from_key_values(&kv).unwrap(), r);
    }

    #[test]
    fn predictions_file_roundtrip() {
        let records = vec![
            PredictionRecord {
                id: "a".into(),
                gold: Some(Label::Ai),
                predicted: Label::Human,
                p_ai: 0.125,
            },
            PredictionRecord {
                id: "b".into(),
                gold: None,
                predicted: Label::Ai,
                p_ai: 0.9,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        write_predictions(&path, &records).unwrap();
        assert_eq!(read_predictions(&path).unwrap(), records);

        std::fs::write(&path, "id\tpredicted\tp_ai\nx\tAI\t1\n").unwrap();
        assert_eq!(read_predictions(&path).unwrap()[0].gold, None);
        std::fs::write(&path, "id\tpredicted\tp_ai\nx\tAI\t1.5\n").unwrap();
        assert!(read_predictions(&path).is_err());
        std::fs::write(&path, "id\tpredicted\nx\tAI\n").unwrap();
        assert!(matches!(
            read_predictions(&path),
            Err(Error::MissingColumn { .. })
        ));
    }

    fn oracle(y_true: &[usize], y_pred: &[usize]) -> (Vec<f64>, f64) {
        let mut f1s = Vec::new();
        for c in 0..2 {
            let tp = y_true
                .iter()
                .zip(y_pred)
                .filter(|&(&t, &p)| t == c && p == c)
                .count() as f64;
            let fp = y_true
                .iter()
                .zip(y_pred)
                .filter(|&(&t, &p)| t != c && p == c)
                .count() as f64;
            let fn_ = y_true
                .iter()
                .zip(y_pred)
                .filter(|&(&t, &p)| t == c && p != c)
                .count() as f64;
            let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            f1s.push(if p + r > 0.0 {
                2.0 * p * r / (p + r)
            } else {
                0.0
            });
        }
        let acc =
            y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count() as f64 / y_true.len() as f64;
        (f1s, acc)
    }

    fn pairs() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (1usize..=20).prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..2, n),
                proptest::collection::vec(0usize..2, n),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_counting_oracle((t, p) in pairs()) {
            let r = evaluate(&t, &p).unwrap();
            let (f1s, acc) = oracle(&t, &p);
            prop_assert_eq!(r.per_class[0].f1, f1s[0]);
            prop_assert_eq!(r.per_class[1].f1, f1s[1]);
            prop_assert_eq!(r.accuracy, acc);
            // accuracy is the support-weighted mean of recalls
            let n = t.len() as f64;
            let weighted: f64 = r.per_class.iter().map(|c| c.recall * c.support as f64 / n).sum();
            prop_assert!((weighted - r.accuracy).abs() < 1e-12);
        }

        #[test]
        fn macro_f1_symmetries((t, p) in pairs(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let base = evaluate(&t, &p).unwrap();
            let mut idx: Vec<usize> = (0..t.len()).collect();
            idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let t2: Vec<_> = idx.iter().map(|&i| t[i]).collect();
            let p2: Vec<_> = idx.iter().map(|&i| p[i]).collect();
            prop_assert_eq!(evaluate(&t2, &p2).unwrap().macro_f1, base.macro_f1);
            let flip = |v: &[usize]| v.iter().map(|&x| 1 - x).collect::<Vec<_>>();
            let swapped = evaluate(&flip(&t), &flip(&p)).unwrap();
            prop_assert!((swapped.macro_f1 - base.macro_f1).abs() < 1e-15);
            prop_assert!((swapped.macro_precision - base.macro_precision).abs() < 1e-15);
        }
    }
}
