//! One-vs-rest linear soft-margin SVM trained by dual coordinate descent.
//!
//! Each binary problem minimizes `½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b))`.
//! The bias is folded into the weight vector through a constant feature, so
//! it is regularized along with the weights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::Label;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmConfig {
    /// Regularization parameter `C`.
    pub c: f64,
    /// Maximum passes over the data per binary problem.
    pub epochs: usize,
    /// Stop once the projected-gradient spread falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 1000,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    /// Classes in ascending order.
    pub classes: Vec<Label>,
    /// One weight vector per class.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub c: f64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b)
            .collect()
    }

    /// Class with the largest decision value; lowest class on ties.
    pub fn predict(&self, x: &[f64]) -> Label {
        let scores = self.decision_values(x);
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = k;
            }
        }
        self.classes[best]
    }
}

/// Trained model and the summed primal objective of its binary problems.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmFit {
    pub model: SvmModel,
    pub objective: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Returns `(w, b)` for labels `y ∈ {−1, +1}`.
fn train_binary(x: &[Vec<f64>], y: &[f64], config: &SvmConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len();
    // augmented weight: w[..d] then bias
    let mut w = vec![0.0; d + 1];
    let mut alpha = vec![0.0; n];
    let q: Vec<f64> = x.iter().map(|xi| dot(xi, xi) + 1.0).collect();
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..config.epochs {
        order.shuffle(rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let g = y[i] * (dot(&w[..d], &x[i]) + w[d]) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= config.c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / q[i]).clamp(0.0, config.c);
                let step = (alpha[i] - old) * y[i];
                for (wj, xj) in w[..d].iter_mut().zip(&x[i]) {
                    *wj += step * xj;
                }
                w[d] += step;
            }
        }
        if pg_max - pg_min < config.tolerance {
            break;
        }
    }
    let bias = w.pop().expect("bias slot");
    (w, bias)
}

fn primal_objective(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64, c: f64) -> f64 {
    let reg = 0.5 * (dot(w, w) + b * b);
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * (dot(w, xi) + b)).max(0.0))
        .sum();
    reg + c * loss
}

/// Trains one binary classifier per class present in `labels`.
pub fn fit_svm(x: &[Vec<f64>], labels: &[Label], config: SvmConfig) -> Result<SvmFit> {
    if x.len() != labels.len() {
        return Err(Error::domain("feature rows and labels differ in count"));
    }
    if x.len() < 2 {
        return Err(Error::domain("SVM needs at least 2 samples"));
    }
    if !(config.c > 0.0) || config.epochs == 0 {
        return Err(Error::domain("SVM needs C > 0 and at least one epoch"));
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::domain("feature rows differ in length"));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::domain("SVM needs at least 2 classes"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    let mut objective = 0.0;
    for &class in &classes {
        let y: Vec<f64> = labels.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
        let (w, b) = train_binary(x, &y, &config, &mut rng);
        objective += primal_objective(x, &y, &w, b, config.c);
        weights.push(w);
        biases.push(b);
    }
    Ok(SvmFit {
        model: SvmModel {
            classes,
            weights,
            biases,
            c: config.c,
        },
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<Label>) {
        let x = vec![
            vec![5.0, 5.0],
            vec![4.0, 6.0],
            vec![6.0, 4.5],
            vec![-5.0, -5.0],
            vec![-4.0, -6.0],
            vec![-6.0, -4.5],
        ];
        (x, vec![1, 1, 1, 0, 0, 0])
    }

    #[test]
    fn separable_toy_is_fit_exactly() {
        let (x, y) = toy();
        let fit = fit_svm(&x, &y, SvmConfig::default()).unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(fit.model.predict(xi), yi);
        }
        assert!(fit.objective.is_finite() && fit.objective > 0.0);
        assert_eq!(fit.model.dim(), 2);
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = toy();
        let a = fit_svm(&x, &y, SvmConfig::default()).unwrap();
        let b = fit_svm(&x, &y, SvmConfig::default()).unwrap();
        assert_eq!(a, b);
        for gx in -5..=5 {
            for gy in -5..=5 {
                let p = [gx as f64, gy as f64];
                assert_eq!(a.model.predict(&p), b.model.predict(&p));
            }
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(fit_svm(&x, &[3, 3], SvmConfig::default()).is_err());
    }

    #[test]
    fn ties_go_to_lowest_class() {
        let m = SvmModel {
            classes: vec![2, 5, 7],
            weights: vec![vec![0.0], vec![0.0], vec![0.0]],
            biases: vec![1.0, 1.0, 1.0],
            c: 1.0,
        };
        assert_eq!(m.predict(&[3.0]), 2);
    }
}
