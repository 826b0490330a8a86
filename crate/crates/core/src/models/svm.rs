//! Linear SVM trained by primal stochastic subgradient descent.
//!
//! The bias is folded into the weight vector as a constant feature, so the
//! minimized objective is
//! `(λ/2)(‖w‖² + b²) + mean_i max(0, 1 − y_i (w·x_i + b))` with `y_i ∈ {−1, +1}`.
//! Step size at update `t` is `1/(λt)`, followed by projection onto the ball
//! of radius `1/√λ`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tfidf::SparseRow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 1e-4,
            epochs: 50,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config("svm.lambda must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
}

impl SvmModel {
    pub fn zeros(n_features: usize, lambda: f64) -> Self {
        SvmModel {
            weights: vec![0.0; n_features],
            bias: 0.0,
            lambda,
        }
    }

    pub fn decision_sparse(&self, row: &SparseRow) -> f64 {
        row.iter().map(|&(c, v)| self.weights[c] * v).sum::<f64>() + self.bias
    }

    pub fn predict_sparse(&self, row: &SparseRow) -> u8 {
        (self.decision_sparse(row) >= 0.0) as u8
    }

    /// Regularized hinge objective over a labelled set.
    pub fn objective(&self, rows: &[SparseRow], labels: &[u8]) -> f64 {
        let reg = 0.5
            * self.lambda
            * (self.weights.iter().map(|w| w * w).sum::<f64>() + self.bias * self.bias);
        let hinge: f64 = rows
            .iter()
            .zip(labels)
            .map(|(r, &l)| (1.0 - sign(l) * self.decision_sparse(r)).max(0.0))
            .sum();
        reg + hinge / rows.len().max(1) as f64
    }
}

/// `1` iff `w·x + b ≥ 0`.
pub fn svm_predict(model: &SvmModel, row: &[f64]) -> Result<u8> {
    if row.len() != model.weights.len() {
        return Err(Error::Shape(format!(
            "row of width {} for a model of {} features",
            row.len(),
            model.weights.len()
        )));
    }
    let score: f64 = model.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + model.bias;
    Ok((score >= 0.0) as u8)
}

fn sign(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_binary(labels: &[u8], n_rows: usize) -> Result<()> {
    if labels.len() != n_rows {
        return Err(Error::Shape(format!("{n_rows} rows but {} labels", labels.len())));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::InvalidInput("labels must be 0 or 1".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if labels.len() < 2 || pos == 0 || pos == labels.len() {
        return Err(Error::InvalidInput(
            "training data must contain both classes".into(),
        ));
    }
    Ok(())
}

pub fn svm_train(
    rows: &[SparseRow],
    n_features: usize,
    labels: &[u8],
    config: &SvmConfig,
    seed: u64,
) -> Result<SvmModel> {
    svm_train_traced(rows, n_features, labels, config, seed).map(|(m, _)| m)
}

/// Also returns the full-batch objective after every epoch.
pub fn svm_train_traced(
    rows: &[SparseRow],
    n_features: usize,
    labels: &[u8],
    config: &SvmConfig,
    seed: u64,
) -> Result<(SvmModel, Vec<f64>)> {
    config.validate()?;
    check_binary(labels, rows.len())?;
    if rows.iter().flatten().any(|&(c, _)| c >= n_features) {
        return Err(Error::Shape("feature index beyond n_features".into()));
    }
    let lambda = config.lambda;
    let radius = 1.0 / lambda.sqrt();
    // w = scale * v, b = scale * vb; keeps the shrink step O(1) on sparse rows.
    let mut v = vec![0.0; n_features];
    let mut vb = 0.0;
    let mut scale = 1.0;
    let mut sq_norm = 0.0; // ‖v‖² + vb²
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut objectives = Vec::with_capacity(config.epochs);
    let mut t = 0usize;

    let snapshot = |v: &[f64], vb: f64, scale: f64| SvmModel {
        weights: v.iter().map(|x| x * scale).collect(),
        bias: vb * scale,
        lambda,
    };

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let y = sign(labels[i]);
            let row = &rows[i];
            let score = scale * (row.iter().map(|&(c, x)| v[c] * x).sum::<f64>() + vb);
            let shrink = 1.0 - eta * lambda;
            if shrink <= 0.0 {
                v.iter_mut().for_each(|x| *x = 0.0);
                vb = 0.0;
                scale = 1.0;
                sq_norm = 0.0;
            } else {
                scale *= shrink;
            }
            if y * score < 1.0 {
                let step = eta * y / scale;
                for &(c, x) in row {
                    let old = v[c];
                    v[c] += step * x;
                    sq_norm += v[c] * v[c] - old * old;
                }
                let old = vb;
                vb += step;
                sq_norm += vb * vb - old * old;
            }
            let norm = scale * sq_norm.max(0.0).sqrt();
            if norm > radius {
                scale *= radius / norm;
            }
            if scale < 1e-9 {
                // fold the scale back in before it underflows
                v.iter_mut().for_each(|x| *x *= scale);
                vb *= scale;
                scale = 1.0;
                sq_norm = v.iter().map(|x| x * x).sum::<f64>() + vb * vb;
            }
        }
        objectives.push(snapshot(&v, vb, scale).objective(rows, labels));
    }
    let model = snapshot(&v, vb, scale);
    if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
        return Err(Error::NonFinite("svm weights".into()));
    }
    Ok((model, objectives))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Vec<SparseRow>, Vec<u8>) {
        (vec![vec![(0, 1.0)], vec![(1, 1.0)]], vec![1, 0])
    }

    #[test]
    fn predict_examples() {
        let zero = SvmModel::zeros(2, 1e-4);
        assert_eq!(svm_predict(&zero, &[3.0, -1.0]).unwrap(), 1);
        let m = SvmModel { weights: vec![1.0, 0.0], bias: 0.0, lambda: 1e-4 };
        assert_eq!(svm_predict(&m, &[2.0, 5.0]).unwrap(), 1);
        let m = SvmModel { weights: vec![1.0, 0.0], bias: -3.0, lambda: 1e-4 };
        assert_eq!(svm_predict(&m, &[2.0, 0.0]).unwrap(), 0);
        assert!(svm_predict(&m, &[1.0]).is_err());
    }

    #[test]
    fn zero_epochs_keeps_zero_weights() {
        let (rows, labels) = separable();
        let cfg = SvmConfig { epochs: 0, ..Default::default() };
        let m = svm_train(&rows, 2, &labels, &cfg, 1).unwrap();
        assert_eq!(m, SvmModel::zeros(2, cfg.lambda));
    }

    #[test]
    fn separable_fixture_is_learned_and_objective_does_not_rise() {
        let (rows, labels) = separable();
        let (m, obj) = svm_train_traced(&rows, 2, &labels, &SvmConfig::default(), 5).unwrap();
        for (r, &l) in rows.iter().zip(&labels) {
            assert_eq!(m.predict_sparse(r), l);
        }
        for w in obj.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "{obj:?}");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let rows = vec![vec![(0, 1.0)], vec![(1, 1.0)]];
        assert!(svm_train(&rows, 2, &[1, 1], &SvmConfig::default(), 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let rows: Vec<SparseRow> = (0..20).map(|i| vec![(i % 5, 1.0), (5 + i % 3, 0.5)]).collect();
        let labels: Vec<u8> = (0..20).map(|i| (i % 5 < 2) as u8).collect();
        let a = svm_train(&rows, 8, &labels, &SvmConfig::default(), 3).unwrap();
        let b = svm_train(&rows, 8, &labels, &SvmConfig::default(), 3).unwrap();
        assert_eq!(a, b);
    }
}
