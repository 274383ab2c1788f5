use serde::{Deserialize, Serialize};

#[cfg(test)]
use super::loss::weighted_bce;
use super::{check_dim, Classifier, ModelError};
use crate::datasets::Dataset;
use crate::numeric::{sigmoid, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn decision(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        check_dim(self.weights.len(), x)?;
        Ok(x
            .iter_rows()
            .map(|row| {
                row.iter()
                    .zip(&self.weights)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + self.bias
            })
            .collect())
    }
}

impl Classifier for LogisticModel {
    fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        Ok(self.decision(x)?.into_iter().map(sigmoid).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// Inverse regularisation strength; `None` means no penalty.
    pub c: Option<f64>,
    /// Weight positives by `N⁻/N⁺` computed over the whole training set.
    pub class_weighting: bool,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            c: Some(1e-2),
            class_weighting: false,
            tolerance: 1e-6,
            max_iterations: 10_000,
        }
    }
}

impl LogisticConfig {
    /// Unpenalised fit used on the 2-D toy data.
    pub fn toy() -> Self {
        Self {
            c: None,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticFit {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// The penalised objective `mean weighted BCE + λ‖w‖²/2`, `λ = 1/(C·N)`,
/// with an unpenalised bias as the last coordinate of `theta`.
struct Objective<'a> {
    x: &'a Matrix,
    labels: &'a [u8],
    positive_weight: f64,
    lambda: f64,
}

impl Objective<'_> {
    fn dim(&self) -> usize {
        self.x.cols() + 1
    }

    fn logits(&self, theta: &[f64]) -> Vec<f64> {
        let (w, b) = theta.split_at(self.x.cols());
        self.x
            .iter_rows()
            .map(|row| row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b[0])
            .collect()
    }

    #[cfg(test)]
    fn value(&self, theta: &[f64]) -> f64 {
        let probs: Vec<f64> = self.logits(theta).into_iter().map(sigmoid).collect();
        let w = &theta[..self.x.cols()];
        weighted_bce(&probs, self.labels, self.positive_weight)
            + 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.labels.len() as f64;
        let d = self.x.cols();
        let mut g = vec![0.0; d + 1];
        for ((row, z), &y) in self.x.iter_rows().zip(self.logits(theta)).zip(self.labels) {
            let s = sigmoid(z);
            let r = if y == 1 {
                self.positive_weight * (s - 1.0)
            } else {
                s
            } / n;
            for (gj, &xj) in g.iter_mut().zip(row) {
                *gj += r * xj;
            }
            g[d] += r;
        }
        for (gj, wj) in g.iter_mut().zip(&theta[..d]) {
            *gj += self.lambda * wj;
        }
        g
    }

    /// Diagonal preconditioner `c` and a Lipschitz bound `L` for the gradient
    /// in the rescaled coordinates `c^{1/2}·θ`. The Hessian is bounded by
    /// `h·[X 1]ᵀ[X 1]/N + λI` with `h = max(w⁺, 1)/4`.
    fn preconditioner(&self) -> (Vec<f64>, f64) {
        let n = self.labels.len() as f64;
        let d = self.x.cols();
        let h = 0.25 * self.positive_weight.max(1.0);
        let mut diag = vec![0.0; d + 1];
        for row in self.x.iter_rows() {
            for (c, &xj) in diag.iter_mut().zip(row) {
                *c += h * xj * xj / n;
            }
        }
        diag[d] = h;
        for c in &mut diag[..d] {
            *c += self.lambda;
        }
        for c in &mut diag {
            *c = c.max(1e-12);
        }
        let scale: Vec<f64> = diag.iter().map(|c| 1.0 / c.sqrt()).collect();

        // power iteration on the scaled bound
        let mut v = vec![1.0 / ((d + 1) as f64).sqrt(); d + 1];
        let mut eig = 0.0;
        for _ in 0..100 {
            let u: Vec<f64> = v.iter().zip(&scale).map(|(a, b)| a * b).collect();
            let mut out = vec![0.0; d + 1];
            for row in self.x.iter_rows() {
                let dot = row.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() + u[d];
                for (o, &xj) in out.iter_mut().zip(row) {
                    *o += h * dot * xj / n;
                }
                out[d] += h * dot / n;
            }
            for (o, ui) in out[..d].iter_mut().zip(&u) {
                *o += self.lambda * ui;
            }
            for (o, si) in out.iter_mut().zip(&scale) {
                *o *= si;
            }
            let norm = norm(&out);
            if norm == 0.0 {
                break;
            }
            eig = norm;
            v = out.into_iter().map(|x| x / norm).collect();
        }
        (diag, eig.max(1e-12) * 1.1)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn train_logistic(train: &Dataset, cfg: &LogisticConfig) -> Result<LogisticModel, ModelError> {
    train_logistic_report(train, cfg).map(|(m, _)| m)
}

/// Full-batch accelerated gradient descent with a diagonal preconditioner
/// and adaptive restart. Stops when
/// the gradient norm falls to `tolerance` or after `max_iterations`.
pub fn train_logistic_report(
    train: &Dataset,
    cfg: &LogisticConfig,
) -> Result<(LogisticModel, LogisticFit), ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let lambda = match cfg.c {
        None => 0.0,
        Some(c) if c > 0.0 && c.is_finite() => 1.0 / (c * train.len() as f64),
        Some(c) => {
            return Err(ModelError::InvalidConfig(format!(
                "regularisation C must be positive, got {c}"
            )))
        }
    };
    let positive_weight = if cfg.class_weighting {
        if !train.has_both_classes() {
            return Err(ModelError::SingleClass);
        }
        let pos = train.positive_count();
        (train.len() - pos) as f64 / pos as f64
    } else {
        1.0
    };
    let obj = Objective {
        x: train.features(),
        labels: train.labels(),
        positive_weight,
        lambda,
    };
    let (diag, lipschitz) = obj.preconditioner();
    let step: Vec<f64> = diag.iter().map(|c| 1.0 / (lipschitz * c)).collect();

    let dim = obj.dim();
    let mut x = vec![0.0; dim];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut fit = LogisticFit {
        iterations: 0,
        gradient_norm: f64::INFINITY,
        converged: false,
    };
    let mut best = (f64::INFINITY, x.clone());
    for it in 0..cfg.max_iterations {
        let g = obj.gradient(&y);
        let gn = norm(&g);
        if !gn.is_finite() {
            return Err(ModelError::Diverged { epoch: it });
        }
        if gn < best.0 {
            best = (gn, y.clone());
        }
        fit.iterations = it;
        if gn <= cfg.tolerance {
            fit.converged = true;
            break;
        }
        let x_next: Vec<f64> = y
            .iter()
            .zip(&g)
            .zip(&step)
            .map(|((yi, gi), si)| yi - si * gi)
            .collect();
        // restart momentum when it points uphill
        let uphill: f64 = g.iter().zip(x_next.iter().zip(&x)).map(|(gi, (a, b))| gi * (a - b)).sum();
        if uphill > 0.0 {
            t = 1.0;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        y = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + momentum * (a - b))
            .collect();
        x = x_next;
        t = t_next;
    }
    // the iterate with the smallest gradient; the last one when converged
    let (gn, theta) = best;
    fit.gradient_norm = gn;
    let d = train.n_features();
    Ok((
        LogisticModel {
            weights: theta[..d].to_vec(),
            bias: theta[d],
        },
        fit,
    ))
}
