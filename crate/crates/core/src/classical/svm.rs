use super::kernel::{dot, Gram, Kernel, SvmParams};
use super::smo::{self, RowCache};
use super::{check_dims, Classifier, Proba};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Logistic calibration `P(class 1 | f) = 1 / (1 + exp(a f + b))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Platt {
    pub a: f64,
    pub b: f64,
}

impl Platt {
    pub fn probability(&self, decision: f64) -> f64 {
        let z = decision * self.a + self.b;
        // evaluated in the form that cannot overflow
        if z >= 0.0 {
            (-z).exp() / (1.0 + (-z).exp())
        } else {
            1.0 / (1.0 + z.exp())
        }
    }
}

/// Trained binary SVM. Class index 1 is the +1 side of the decision function.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub(crate) params: SvmParams,
    pub(crate) gamma: f64,
    pub(crate) support_vectors: FeatureMatrix,
    /// `alpha_i * y_i` per support vector.
    pub(crate) dual_coef: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) platt: Platt,
}

pub(crate) fn signed_targets(y: &[usize]) -> Result<Vec<f64>> {
    let t: Vec<f64> = y
        .iter()
        .map(|&l| match l {
            0 => Ok(-1.0),
            1 => Ok(1.0),
            other => Err(Error::InvalidInput(format!(
                "label index {other} out of range"
            ))),
        })
        .collect::<Result<_>>()?;
    if !(t.contains(&1.0) && t.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    Ok(t)
}

/// Solves the dual on the rows `subset` of a precomputed Gram matrix.
pub(crate) fn solve_on_gram(
    gram: &Gram,
    subset: &[usize],
    targets: &[f64],
    kernel: Kernel,
    gamma: f64,
    c: f64,
) -> smo::DualSolution {
    let kf = |i: usize, j: usize| {
        let (a, b) = (subset[i], subset[j]);
        kernel.eval(gamma, gram.dot(a, b), gram.sq_norm(a), gram.sq_norm(b))
    };
    let mut cache = RowCache::new(subset.len(), kf);
    smo::solve(&mut cache, targets, c, smo::TOLERANCE)
}

pub fn train_svm(x: &FeatureMatrix, y: &[usize], params: &SvmParams) -> Result<SvmModel> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: y.len(),
        });
    }
    let targets = signed_targets(y)?;
    x.check_finite()?;
    let gram = Gram::compute(x);
    let all: Vec<usize> = (0..x.rows()).collect();
    fit_from_gram(x, &gram, &all, &targets, params)
}

/// Trains on `subset` of `x` and calibrates on that subset's decision values.
pub(crate) fn fit_from_gram(
    x: &FeatureMatrix,
    gram: &Gram,
    subset: &[usize],
    targets: &[f64],
    params: &SvmParams,
) -> Result<SvmModel> {
    if !(params.c > 0.0) {
        return Err(Error::Config(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    let gamma = params.gamma.resolve_rows(x, subset);
    let sol = solve_on_gram(gram, subset, targets, params.kernel, gamma, params.c);

    let sv: Vec<usize> = (0..subset.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let dual_coef: Vec<f64> = sv.iter().map(|&i| sol.alpha[i] * targets[i]).collect();
    let sv_rows: Vec<usize> = sv.iter().map(|&i| subset[i]).collect();
    let bias = -sol.rho;

    let decisions: Vec<f64> = subset
        .iter()
        .map(|&a| {
            let s: f64 = sv_rows
                .iter()
                .zip(&dual_coef)
                .map(|(&b, &coef)| {
                    coef * params.kernel.eval(
                        gamma,
                        gram.dot(b, a),
                        gram.sq_norm(b),
                        gram.sq_norm(a),
                    )
                })
                .sum();
            s + bias
        })
        .collect();
    let platt = fit_platt(&decisions, targets);

    Ok(SvmModel {
        params: *params,
        gamma,
        support_vectors: x.select_rows(&sv_rows),
        dual_coef,
        bias,
        platt,
    })
}

impl SvmModel {
    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coef
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn platt(&self) -> Platt {
        self.platt
    }

    pub fn n_support(&self) -> usize {
        self.dual_coef.len()
    }

    pub fn support_vectors(&self) -> &FeatureMatrix {
        &self.support_vectors
    }

    fn decision_row(&self, row: &[f64]) -> f64 {
        let sq = dot(row, row);
        let s: f64 = self
            .support_vectors
            .iter_rows()
            .zip(&self.dual_coef)
            .map(|(sv, &coef)| {
                coef * self
                    .params
                    .kernel
                    .eval(self.gamma, dot(sv, row), dot(sv, sv), sq)
            })
            .sum();
        s + self.bias
    }

    /// Signed distance-like score; positive means class 1.
    pub fn decision_function(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        check_dims(self.n_features(), x)?;
        Ok(x.iter_rows().map(|r| self.decision_row(r)).collect())
    }
}

impl Classifier for SvmModel {
    fn n_features(&self) -> usize {
        self.support_vectors.cols()
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<Proba>> {
        Ok(self
            .decision_function(x)?
            .into_iter()
            .map(|f| {
                let p1 = self.platt.probability(f);
                [1.0 - p1, p1]
            })
            .collect())
    }

    /// Labels come from the sign of the decision function (zero goes to
    /// class 0), not from the calibrated probabilities.
    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        Ok(self
            .decision_function(x)?
            .into_iter()
            .map(|f| usize::from(f > 0.0))
            .collect())
    }
}

/// Platt scaling fitted by Newton's method with backtracking, using the
/// regularized targets of Lin, Lin and Weng.
pub(crate) fn fit_platt(decisions: &[f64], targets: &[f64]) -> Platt {
    let prior1 = targets.iter().filter(|&&t| t > 0.0).count() as f64;
    let prior0 = targets.len() as f64 - prior1;
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = targets
        .iter()
        .map(|&y| if y > 0.0 { hi } else { lo })
        .collect();

    const MAX_ITER: usize = 100;
    const MIN_STEP: f64 = 1e-10;
    const SIGMA: f64 = 1e-12;
    const EPS: f64 = 1e-5;

    let objective = |a: f64, b: f64| -> f64 {
        decisions
            .iter()
            .zip(&t)
            .map(|(&f, &ti)| {
                let z = f * a + b;
                if z >= 0.0 {
                    ti * z + (1.0 + (-z).exp()).ln()
                } else {
                    (ti - 1.0) * z + (1.0 + z.exp()).ln()
                }
            })
            .sum()
    };

    let mut a = 0.0;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();
    let mut fval = objective(a, b);
    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (SIGMA, SIGMA, 0.0, 0.0, 0.0);
        for (&f, &ti) in decisions.iter().zip(&t) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = ti - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < EPS && g2.abs() < EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        let mut moved = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                moved = true;
                break;
            }
            step /= 2.0;
        }
        if !moved {
            break;
        }
    }
    Platt { a, b }
}
