//! SMO solver for the soft-margin SVM dual
//!
//! ```text
//! min  1/2 a'Qa - e'a    s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! The first index of each working pair is the maximal KKT violator; the
//! second maximizes the second-order objective decrease among violators.
//! Kernel rows are computed on demand and cached.

pub(crate) const TOLERANCE: f64 = 1e-3;
const TAU: f64 = 1e-12;

pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
}

/// Lazily filled kernel matrix over the training subset.
pub(crate) struct RowCache<F: Fn(usize, usize) -> f64> {
    kernel: F,
    n: usize,
    rows: Vec<Option<Box<[f64]>>>,
    diag: Vec<f64>,
}

impl<F: Fn(usize, usize) -> f64> RowCache<F> {
    pub(crate) fn new(n: usize, kernel: F) -> Self {
        let diag = (0..n).map(|i| kernel(i, i)).collect();
        RowCache {
            kernel,
            n,
            rows: vec![None; n],
            diag,
        }
    }

    fn ensure(&mut self, i: usize) {
        if self.rows[i].is_none() {
            let row: Box<[f64]> = (0..self.n).map(|j| (self.kernel)(i, j)).collect();
            self.rows[i] = Some(row);
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        self.rows[i].as_deref().expect("row computed before use")
    }
}

/// `y` holds +1/-1 targets.
pub(crate) fn solve<F: Fn(usize, usize) -> f64>(
    cache: &mut RowCache<F>,
    y: &[f64],
    c: f64,
    tolerance: f64,
) -> DualSolution {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    // gradient of the dual objective, Q a - e
    let mut grad = vec![-1.0; n];
    let max_iter = 10_000_000usize.max(100 * n);
    let mut iterations = 0;

    let up = |a: f64, yt: f64| if yt > 0.0 { a < c } else { a > 0.0 };
    let low = |a: f64, yt: f64| if yt > 0.0 { a > 0.0 } else { a < c };

    while iterations < max_iter {
        // maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v >= gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let Some(i) = i_sel else { break };
        cache.ensure(i);

        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        {
            let k_i = cache.row(i);
            for t in 0..n {
                if !low(alpha[t], y[t]) {
                    continue;
                }
                let v = y[t] * grad[t];
                if v >= gmax2 {
                    gmax2 = v;
                }
                let grad_diff = gmax + v;
                if grad_diff > 0.0 {
                    let quad = cache.diag[i] + cache.diag[t] - 2.0 * k_i[t];
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        if gmax + gmax2 < tolerance {
            break;
        }
        let Some(j) = j_sel else { break };
        iterations += 1;
        cache.ensure(j);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let k_ij = cache.row(i)[j];
        let quad = cache.diag[i] + cache.diag[j] - 2.0 * k_ij;
        let quad = if quad > 0.0 { quad } else { TAU };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_i = (alpha[i] - old_i) * y[i];
        let d_j = (alpha[j] - old_j) * y[j];
        let (k_i, k_j) = (cache.row(i), cache.row(j));
        for t in 0..n {
            grad[t] += y[t] * (k_i[t] * d_i + k_j[t] * d_j);
        }
    }

    DualSolution {
        rho: compute_rho(&alpha, &grad, y, c),
        alpha,
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}
