//! Self-contained model bundles.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "RVDTBNDL" | major u16 | minor u16
//! section*: tag [u8; 4] | length u64 | payload
//! SHA-256 of everything above (32 bytes)
//! ```
//!
//! Floats are stored as their IEEE-754 bits, so a loaded bundle predicts
//! bit-identically to the one that was saved.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::classical::{
    Classifier, ForestModel, Gamma, GbModel, Kernel, Node, Platt, SvmModel, SvmParams,
    TrainedModel, Tree, VotingModel,
};
use crate::config::ModelKind;
use crate::corpus::{Label, LabelMap, LabeledCorpus, Language};
use crate::error::{Error, Result};
use crate::eval::PredictionRecord;
use crate::features::{
    FeatureMatrix, FeaturePipeline, Scaler, TfidfConfig, TfidfModel, Word2VecConfig, Word2VecModel,
};
use crate::textprep::{preprocess_corpus_with, CleanOptions};

pub const MAGIC: &[u8; 8] = b"RVDTBNDL";
pub const FORMAT_MAJOR: u16 = 1;
pub const FORMAT_MINOR: u16 = 0;

const CHECKSUM_LEN: usize = 32;
const HEADER_LEN: usize = MAGIC.len() + 4;

/// Everything needed to predict on raw reviews.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub language: Language,
    pub kind: ModelKind,
    pub clean: CleanOptions,
    pub labels: LabelMap,
    pub features: FeaturePipeline,
    pub model: TrainedModel,
}

impl ModelBundle {
    /// One record per review, in input order. Gold labels are copied through
    /// when present.
    pub fn predict(&self, corpus: &LabeledCorpus) -> Result<Vec<PredictionRecord>> {
        let docs = preprocess_corpus_with(corpus, &self.clean);
        let x = if docs.is_empty() {
            FeatureMatrix::zeros(0, self.features.n_features())
        } else {
            self.features.transform(&docs)?
        };
        let proba = self.model.predict_proba(&x)?;
        let pred = self.model.predict(&x)?;
        let ai = self.labels.encode(Label::Ai);
        corpus
            .reviews
            .iter()
            .zip(proba.iter().zip(pred))
            .map(|(r, (p, k))| {
                let predicted = self
                    .labels
                    .decode(k)
                    .ok_or_else(|| Error::Format(format!("class index {k} has no label")))?;
                Ok(PredictionRecord {
                    id: r.id.clone(),
                    gold: r.label,
                    predicted,
                    p_ai: p[ai],
                })
            })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_MAJOR.to_le_bytes());
        out.extend_from_slice(&FORMAT_MINOR.to_le_bytes());
        section(&mut out, b"META", |w| {
            w.str(&self.language.to_string());
            w.str(self.kind.as_str());
            w.bool(self.clean.strip_native_numerals);
            w.bool(self.clean.lowercase_latin);
            w.strs(self.labels.names());
        });
        section(&mut out, b"TFID", |w| {
            let c = self.features.tfidf.config();
            w.usize(c.max_features);
            w.usize(c.ngram_min);
            w.usize(c.ngram_max);
            w.strs(self.features.tfidf.terms());
            w.f64s(self.features.tfidf.idf_values());
        });
        section(&mut out, b"W2VC", |w| {
            let c = self.features.word2vec.config();
            w.usize(c.dim);
            w.usize(c.window);
            w.usize(c.epochs);
            w.usize(c.negative);
            w.f64(c.learning_rate);
            w.f64(c.min_learning_rate);
            w.u64(c.seed);
            w.strs(self.features.word2vec.tokens());
            w.f64s(self.features.word2vec.matrix());
        });
        section(&mut out, b"SCAL", |w| {
            w.f64s(self.features.scaler.mean());
            w.f64s(self.features.scaler.std());
        });
        section(&mut out, b"MODL", |w| write_model(w, &self.model));
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Format(
                "not a revdetect model bundle (bad magic)".into(),
            ));
        }
        if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
            return Err(Error::Format("truncated bundle".into()));
        }
        let major = u16::from_le_bytes([bytes[8], bytes[9]]);
        let minor = u16::from_le_bytes([bytes[10], bytes[11]]);
        if major != FORMAT_MAJOR {
            return Err(Error::Version {
                found: format!("{major}.{minor}"),
                expected: format!("{FORMAT_MAJOR}.x"),
            });
        }
        let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        if Sha256::digest(body).as_slice() != checksum {
            return Err(Error::Checksum);
        }

        let mut r = Reader::new(&body[HEADER_LEN..]);
        let mut meta = r.section(b"META")?;
        let language: Language = meta.str()?.parse().map_err(Error::Format)?;
        let kind: ModelKind = meta.str()?.parse().map_err(Error::Format)?;
        let clean = CleanOptions {
            strip_native_numerals: meta.bool()?,
            lowercase_latin: meta.bool()?,
        };
        let labels = LabelMap::from_names(meta.strs()?)
            .map_err(|e| Error::Format(format!("label map: {e}")))?;
        if labels != LabelMap::default() {
            return Err(Error::Format(format!(
                "unexpected labels {:?}",
                labels.names()
            )));
        }
        meta.finish()?;

        let mut t = r.section(b"TFID")?;
        let tcfg = TfidfConfig {
            max_features: t.usize()?,
            ngram_min: t.usize()?,
            ngram_max: t.usize()?,
        };
        let terms = t.strs()?;
        let idf = t.f64s()?;
        t.finish()?;
        if terms.len() != idf.len() {
            return Err(Error::Format(
                "tf-idf terms and weights differ in length".into(),
            ));
        }
        let tfidf = TfidfModel::from_parts(terms, idf, tcfg);

        let mut w = r.section(b"W2VC")?;
        let wcfg = Word2VecConfig {
            dim: w.usize()?,
            window: w.usize()?,
            epochs: w.usize()?,
            negative: w.usize()?,
            learning_rate: w.f64()?,
            min_learning_rate: w.f64()?,
            seed: w.u64()?,
        };
        let tokens = w.strs()?;
        let vectors = w.f64s()?;
        w.finish()?;
        let word2vec = Word2VecModel::from_parts(tokens, vectors, wcfg)
            .map_err(|e| Error::Format(format!("embeddings: {e}")))?;

        let mut s = r.section(b"SCAL")?;
        let mean = s.f64s()?;
        let std = s.f64s()?;
        s.finish()?;
        let scaler =
            Scaler::from_parts(mean, std).map_err(|e| Error::Format(format!("scaler: {e}")))?;

        let features = FeaturePipeline {
            tfidf,
            word2vec,
            scaler,
        };
        let d = features.n_features();
        if features.scaler.n_features() != d {
            return Err(Error::Format(format!(
                "scaler covers {} features, pipeline produces {d}",
                features.scaler.n_features()
            )));
        }

        let mut m = r.section(b"MODL")?;
        let model = read_model(&mut m)?;
        m.finish()?;
        if model.n_features() != d {
            return Err(Error::Format(format!(
                "classifier expects {} features, pipeline produces {d}",
                model.n_features()
            )));
        }
        r.finish()?;

        Ok(ModelBundle {
            language,
            kind,
            clean,
            labels,
            features,
            model,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

pub fn save_bundle(bundle: &ModelBundle, path: &Path) -> Result<()> {
    bundle.save(path)
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle> {
    ModelBundle::load(path)
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn bool(&mut self, v: bool) {
        self.u8(u8::from(v));
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }

    fn strs(&mut self, v: &[String]) {
        self.usize(v.len());
        for s in v {
            self.str(s);
        }
    }

    fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        for &x in v {
            self.f64(x);
        }
    }
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], fill: impl FnOnce(&mut Writer)) {
    let mut w = Writer::default();
    fill(&mut w);
    out.extend_from_slice(tag);
    out.extend_from_slice(&(w.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&w.0);
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn truncated() -> Error {
    Error::Format("truncated bundle".into())
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(truncated)?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Format(format!("invalid boolean byte {b}"))),
        }
    }

    fn u64(&mut self) -> Result<u64> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().map_err(|_| truncated())?))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("length overflow".into()))
    }

    /// A count of items each at least `item_size` bytes, checked against
    /// the remaining input before anything is allocated.
    fn count(&mut self, item_size: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(item_size) > self.buf.len() - self.pos {
            return Err(truncated());
        }
        Ok(n)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn str(&mut self) -> Result<String> {
        let n = self.count(1)?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Format("invalid UTF-8 string".into()))
    }

    fn strs(&mut self) -> Result<Vec<String>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.str()).collect()
    }

    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    fn section(&mut self, tag: &[u8; 4]) -> Result<Reader<'a>> {
        let found = self.take(4)?;
        if found != tag {
            return Err(Error::Format(format!(
                "expected section {}, found {}",
                String::from_utf8_lossy(tag),
                String::from_utf8_lossy(found)
            )));
        }
        let n = self.usize()?;
        Ok(Reader::new(self.take(n)?))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format("trailing bytes in section".into()));
        }
        Ok(())
    }
}

const SVM: u8 = 0;
const FOREST: u8 = 1;
const BOOSTING: u8 = 2;
const VOTING: u8 = 3;

fn write_model(w: &mut Writer, model: &TrainedModel) {
    match model {
        TrainedModel::Svm(m) => {
            w.u8(SVM);
            write_svm(w, m);
        }
        TrainedModel::Forest(m) => {
            w.u8(FOREST);
            write_forest(w, m);
        }
        TrainedModel::Boosting(m) => {
            w.u8(BOOSTING);
            write_boosting(w, m);
        }
        TrainedModel::Voting(m) => {
            w.u8(VOTING);
            write_forest(w, &m.forest);
            write_boosting(w, &m.boosting);
        }
    }
}

fn read_model(r: &mut Reader) -> Result<TrainedModel> {
    Ok(match r.u8()? {
        SVM => TrainedModel::Svm(read_svm(r)?),
        FOREST => TrainedModel::Forest(read_forest(r)?),
        BOOSTING => TrainedModel::Boosting(read_boosting(r)?),
        VOTING => {
            let forest = read_forest(r)?;
            let boosting = read_boosting(r)?;
            if forest.n_features != boosting.n_features {
                return Err(Error::Format(
                    "ensemble members disagree on feature count".into(),
                ));
            }
            TrainedModel::Voting(VotingModel { forest, boosting })
        }
        t => return Err(Error::Format(format!("unknown classifier tag {t}"))),
    })
}

fn write_svm(w: &mut Writer, m: &SvmModel) {
    let kernel = Kernel::ALL
        .iter()
        .position(|&k| k == m.params.kernel)
        .unwrap_or(0);
    w.u8(kernel as u8);
    w.f64(m.params.c);
    match m.params.gamma {
        Gamma::Scale => w.u8(0),
        Gamma::Auto => w.u8(1),
        Gamma::Value(g) => {
            w.u8(2);
            w.f64(g);
        }
    }
    w.f64(m.gamma);
    w.usize(m.support_vectors.rows());
    w.usize(m.support_vectors.cols());
    w.f64s(m.support_vectors.as_slice());
    w.f64s(&m.dual_coef);
    w.f64(m.bias);
    w.f64(m.platt.a);
    w.f64(m.platt.b);
}

fn read_svm(r: &mut Reader) -> Result<SvmModel> {
    let kernel = *Kernel::ALL
        .get(r.u8()? as usize)
        .ok_or_else(|| Error::Format("unknown kernel".into()))?;
    let c = r.f64()?;
    let gamma_mode = match r.u8()? {
        0 => Gamma::Scale,
        1 => Gamma::Auto,
        2 => Gamma::Value(r.f64()?),
        t => return Err(Error::Format(format!("unknown gamma tag {t}"))),
    };
    let gamma = r.f64()?;
    let rows = r.usize()?;
    let cols = r.usize()?;
    let data = r.f64s()?;
    let support_vectors = FeatureMatrix::from_vec(rows, cols, data)
        .map_err(|e| Error::Format(format!("support vectors: {e}")))?;
    let dual_coef = r.f64s()?;
    if dual_coef.len() != rows {
        return Err(Error::Format("support vector count mismatch".into()));
    }
    Ok(SvmModel {
        params: SvmParams {
            kernel,
            c,
            gamma: gamma_mode,
        },
        gamma,
        support_vectors,
        dual_coef,
        bias: r.f64()?,
        platt: Platt {
            a: r.f64()?,
            b: r.f64()?,
        },
    })
}

fn write_tree<L>(w: &mut Writer, tree: &Tree<L>, leaf: impl Fn(&mut Writer, &L)) {
    w.usize(tree.nodes.len());
    for n in &tree.nodes {
        match n {
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                w.u8(0);
                w.usize(*feature);
                w.f64(*threshold);
                w.usize(*left);
                w.usize(*right);
            }
            Node::Leaf(l) => {
                w.u8(1);
                leaf(w, l);
            }
        }
    }
}

/// Children must come after their parent, which rules out cycles.
fn read_tree<L>(
    r: &mut Reader,
    n_features: usize,
    leaf: impl Fn(&mut Reader) -> Result<L>,
) -> Result<Tree<L>> {
    let n = r.count(1)?;
    if n == 0 {
        return Err(Error::Format("empty tree".into()));
    }
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        nodes.push(match r.u8()? {
            0 => {
                let feature = r.usize()?;
                let threshold = r.f64()?;
                let left = r.usize()?;
                let right = r.usize()?;
                if feature >= n_features || left <= i || right <= i || left >= n || right >= n {
                    return Err(Error::Format(format!("malformed tree node {i}")));
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                }
            }
            1 => Node::Leaf(leaf(r)?),
            t => return Err(Error::Format(format!("unknown node tag {t}"))),
        });
    }
    Ok(Tree { nodes })
}

fn write_forest(w: &mut Writer, m: &ForestModel) {
    w.usize(m.n_features);
    w.u64(m.seed);
    w.usize(m.trees.len());
    for t in &m.trees {
        write_tree(w, t, |w, c| {
            w.u64(u64::from(c[0]));
            w.u64(u64::from(c[1]));
        });
    }
}

fn read_forest(r: &mut Reader) -> Result<ForestModel> {
    let n_features = r.usize()?;
    let seed = r.u64()?;
    let n = r.count(1)?;
    if n == 0 {
        return Err(Error::Format("forest without trees".into()));
    }
    let count = |r: &mut Reader| {
        u32::try_from(r.u64()?).map_err(|_| Error::Format("leaf count overflow".into()))
    };
    let trees = (0..n)
        .map(|_| read_tree(r, n_features, |r| Ok([count(r)?, count(r)?])))
        .collect::<Result<_>>()?;
    Ok(ForestModel {
        trees,
        n_features,
        seed,
    })
}

fn write_boosting(w: &mut Writer, m: &GbModel) {
    w.usize(m.n_features);
    w.f64(m.prior_log_odds);
    w.f64(m.learning_rate);
    w.usize(m.max_depth);
    w.f64s(&m.train_loss);
    w.usize(m.trees.len());
    for t in &m.trees {
        write_tree(w, t, |w, v| w.f64(*v));
    }
}

fn read_boosting(r: &mut Reader) -> Result<GbModel> {
    let n_features = r.usize()?;
    let prior_log_odds = r.f64()?;
    let learning_rate = r.f64()?;
    let max_depth = r.usize()?;
    let train_loss = r.f64s()?;
    let n = r.count(1)?;
    let trees = (0..n)
        .map(|_| read_tree(r, n_features, |r| r.f64()))
        .collect::<Result<_>>()?;
    Ok(GbModel {
        prior_log_odds,
        learning_rate,
        max_depth,
        trees,
        n_features,
        train_loss,
    })
}
