//! One-hidden-layer perceptron over sparse rows: rectifier hidden units,
//! sigmoid output, binary cross-entropy, rmsprop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rmsprop::{RmspropConfig, RmspropState};
use super::svm::check_binary;
use crate::error::{Error, Result};
use crate::linalg::{bce_with_logit, dot, sigmoid, Matrix};
use crate::tfidf::SparseRow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub rmsprop: RmspropConfig,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 100,
            epochs: 200,
            batch_size: 32,
            rmsprop: RmspropConfig::default(),
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 {
            return Err(Error::Config("mlp.hidden and mlp.batch_size must be positive".into()));
        }
        self.rmsprop.validate()
    }
}

/// `input_weights` holds one row of `hidden` weights per input feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl MlpModel {
    pub fn zeros(n_features: usize, hidden: usize) -> Self {
        MlpModel {
            input_weights: Matrix::zeros(n_features, hidden),
            hidden_bias: vec![0.0; hidden],
            output_weights: vec![0.0; hidden],
            output_bias: 0.0,
        }
    }

    pub fn init(n_features: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input_weights = Matrix::glorot(n_features, hidden, &mut rng);
        let output_weights = Matrix::glorot(hidden, 1, &mut rng).data;
        MlpModel {
            input_weights,
            hidden_bias: vec![0.0; hidden],
            output_weights,
            output_bias: 0.0,
        }
    }

    pub fn n_features(&self) -> usize {
        self.input_weights.rows
    }

    pub fn hidden(&self) -> usize {
        self.hidden_bias.len()
    }

    fn hidden_pre(&self, row: &SparseRow) -> Vec<f64> {
        let mut z = self.hidden_bias.clone();
        for &(c, x) in row {
            for (zj, w) in z.iter_mut().zip(self.input_weights.row(c)) {
                *zj += x * w;
            }
        }
        z
    }

    pub fn logit(&self, row: &SparseRow) -> f64 {
        let a: Vec<f64> = self.hidden_pre(row).into_iter().map(|z| z.max(0.0)).collect();
        dot(&a, &self.output_weights) + self.output_bias
    }

    pub fn predict_proba(&self, row: &SparseRow) -> f64 {
        sigmoid(self.logit(row))
    }

    pub fn predict(&self, row: &SparseRow) -> u8 {
        (self.predict_proba(row) >= 0.5) as u8
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 4] {
        [
            &mut self.input_weights.data,
            &mut self.hidden_bias,
            &mut self.output_weights,
            std::slice::from_mut(&mut self.output_bias),
        ]
    }

    pub fn tensors(&self) -> [&[f64]; 4] {
        [
            &self.input_weights.data,
            &self.hidden_bias,
            &self.output_weights,
            std::slice::from_ref(&self.output_bias),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

/// Mean binary cross-entropy over the batch and its gradient (same shape as the model).
pub fn mlp_loss_and_grad(model: &MlpModel, rows: &[&SparseRow], labels: &[u8]) -> (f64, MlpModel) {
    let mut grad = MlpModel::zeros(model.n_features(), model.hidden());
    let n = rows.len().max(1) as f64;
    let mut loss = 0.0;
    for (row, &y) in rows.iter().zip(labels) {
        let z = model.hidden_pre(row);
        let a: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
        let logit = dot(&a, &model.output_weights) + model.output_bias;
        let y = f64::from(y);
        loss += bce_with_logit(logit, y);
        let d_logit = (sigmoid(logit) - y) / n;
        grad.output_bias += d_logit;
        for (g, ai) in grad.output_weights.iter_mut().zip(&a) {
            *g += d_logit * ai;
        }
        let dz: Vec<f64> = z
            .iter()
            .zip(&model.output_weights)
            .map(|(&zj, &w)| if zj > 0.0 { d_logit * w } else { 0.0 })
            .collect();
        for (g, d) in grad.hidden_bias.iter_mut().zip(&dz) {
            *g += d;
        }
        for &(c, x) in row.iter() {
            for (g, d) in grad.input_weights.row_mut(c).iter_mut().zip(&dz) {
                *g += x * d;
            }
        }
    }
    (loss / n, grad)
}

pub fn mlp_train(
    rows: &[SparseRow],
    n_features: usize,
    labels: &[u8],
    config: &MlpConfig,
    seed: u64,
) -> Result<MlpModel> {
    config.validate()?;
    check_binary(labels, rows.len())?;
    if rows.iter().flatten().any(|&(c, _)| c >= n_features) {
        return Err(Error::Shape("feature index beyond n_features".into()));
    }
    let mut model = MlpModel::init(n_features, config.hidden, seed);
    let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    let mut state = RmspropState::new(config.rmsprop, &shapes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let batch_rows: Vec<&SparseRow> = batch.iter().map(|&i| &rows[i]).collect();
            let batch_labels: Vec<u8> = batch.iter().map(|&i| labels[i]).collect();
            let (_, grad) = mlp_loss_and_grad(&model, &batch_rows, &batch_labels);
            let grads = grad.tensors();
            state.step(&mut model.tensors_mut(), &grads)?;
        }
    }
    if !model.is_finite() {
        return Err(Error::NonFinite("mlp parameters".into()));
    }
    Ok(model)
}
