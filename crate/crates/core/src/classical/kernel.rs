use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;

pub const POLY_DEGREE: i32 = 3;
pub const COEF0: f64 = 0.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf,
    Poly,
    Sigmoid,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Linear, Kernel::Rbf, Kernel::Poly, Kernel::Sigmoid];

    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Rbf => "rbf",
            Kernel::Poly => "poly",
            Kernel::Sigmoid => "sigmoid",
        }
    }

    /// Kernel value from the inner product and the two squared norms.
    #[inline]
    pub fn eval(self, gamma: f64, dot: f64, sq_a: f64, sq_b: f64) -> f64 {
        match self {
            Kernel::Linear => dot,
            Kernel::Rbf => (-gamma * (sq_a + sq_b - 2.0 * dot).max(0.0)).exp(),
            Kernel::Poly => (gamma * dot + COEF0).powi(POLY_DEGREE),
            Kernel::Sigmoid => (gamma * dot + COEF0).tanh(),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kernel `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Gamma {
    /// `1 / (n_features * var(X))`
    Scale,
    /// `1 / n_features`
    Auto,
    Value(f64),
}

impl Gamma {
    pub fn resolve(self, x: &FeatureMatrix) -> f64 {
        self.resolve_rows(x, &(0..x.rows()).collect::<Vec<_>>())
    }

    /// Resolves against the rows in `subset` only.
    pub(crate) fn resolve_rows(self, x: &FeatureMatrix, subset: &[usize]) -> f64 {
        let d = x.cols().max(1) as f64;
        match self {
            Gamma::Value(g) => g,
            Gamma::Auto => 1.0 / d,
            Gamma::Scale => {
                let count = (subset.len() * x.cols()) as f64;
                if count == 0.0 {
                    return 1.0;
                }
                let mean = subset
                    .iter()
                    .map(|&i| x.row(i).iter().sum::<f64>())
                    .sum::<f64>()
                    / count;
                let var = subset
                    .iter()
                    .map(|&i| {
                        x.row(i)
                            .iter()
                            .map(|v| (v - mean) * (v - mean))
                            .sum::<f64>()
                    })
                    .sum::<f64>()
                    / count;
                if var == 0.0 {
                    1.0
                } else {
                    1.0 / (d * var)
                }
            }
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Scale => f.write_str("scale"),
            Gamma::Auto => f.write_str("auto"),
            Gamma::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Gamma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scale" => Ok(Gamma::Scale),
            "auto" => Ok(Gamma::Auto),
            v => match v.parse::<f64>() {
                Ok(g) if g > 0.0 => Ok(Gamma::Value(g)),
                _ => Err(format!(
                    "gamma must be scale, auto or a positive number, got `{v}`"
                )),
            },
        }
    }
}

impl From<Gamma> for String {
    fn from(g: Gamma) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for Gamma {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub c: f64,
    pub gamma: Gamma,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: Kernel::Rbf,
            c: 1.0,
            gamma: Gamma::Scale,
        }
    }
}

impl fmt::Display for SvmParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kernel={} C={} gamma={}",
            self.kernel, self.c, self.gamma
        )
    }
}

/// Symmetric inner-product matrix of a set of rows, plus squared norms.
pub(crate) struct Gram {
    n: usize,
    dots: Vec<f64>,
}

impl Gram {
    pub(crate) fn compute(x: &FeatureMatrix) -> Gram {
        let n = x.rows();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = x.row(i);
                (i..n).map(|j| dot(a, x.row(j))).collect()
            })
            .collect();
        let mut dots = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                let j = i + k;
                dots[i * n + j] = v;
                dots[j * n + i] = v;
            }
        }
        Gram { n, dots }
    }

    #[inline]
    pub(crate) fn dot(&self, i: usize, j: usize) -> f64 {
        self.dots[i * self.n + j]
    }

    #[inline]
    pub(crate) fn sq_norm(&self, i: usize) -> f64 {
        self.dots[i * self.n + i]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
