//! Embedding layer, two stacked bidirectional LSTM layers and a dense
//! sigmoid head.
//!
//! Layer 1 emits `[h_fwd_t ; h_bwd_t]` at every position. Layer 2 reads that
//! sequence and is summarized by the forward state at the last position
//! concatenated with the backward state at the first position.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lstm::{backprop_direction, run_direction, CellCache, LstmParams};
use super::rmsprop::{RmspropConfig, RmspropState};
use super::svm::check_binary;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::{bce_with_logit, dot, sigmoid, Matrix};
use crate::preprocess::EncodedDoc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BiLstmConfig {
    /// Hidden units per direction.
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    /// Width of randomly initialized embeddings.
    pub embedding_dim: usize,
    /// Half-width of the uniform range for random embeddings.
    pub embedding_init_limit: f64,
    /// `None`: frozen for supplied tables, trainable for random ones.
    pub trainable_embeddings: Option<bool>,
    pub rmsprop: RmspropConfig,
}

impl Default for BiLstmConfig {
    fn default() -> Self {
        BiLstmConfig {
            hidden: 64,
            epochs: 20,
            batch_size: 32,
            embedding_dim: 300,
            embedding_init_limit: 0.05,
            trainable_embeddings: None,
            rmsprop: RmspropConfig::default(),
        }
    }
}

impl BiLstmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 || self.embedding_dim == 0 {
            return Err(Error::Config(
                "bilstm.hidden, bilstm.batch_size and bilstm.embedding_dim must be positive".into(),
            ));
        }
        self.rmsprop.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiLstmLayer {
    pub forward: LstmParams,
    pub backward: LstmParams,
}

impl BiLstmLayer {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        BiLstmLayer {
            forward: LstmParams::zeros(input, hidden),
            backward: LstmParams::zeros(input, hidden),
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.forward.hidden_size()
    }
}

struct LayerCache {
    fwd: Vec<CellCache>,
    bwd: Vec<CellCache>,
}

fn layer_run(layer: &BiLstmLayer, xs: &[Vec<f64>]) -> LayerCache {
    LayerCache {
        fwd: run_direction(&layer.forward, xs, false),
        bwd: run_direction(&layer.backward, xs, true),
    }
}

fn concat_states(cache: &LayerCache) -> Vec<Vec<f64>> {
    cache
        .fwd
        .iter()
        .zip(&cache.bwd)
        .map(|(f, b)| f.h.iter().chain(&b.h).copied().collect())
        .collect()
}

/// Full output sequence of one bidirectional layer.
pub fn bilstm_layer_forward(layer: &BiLstmLayer, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    concat_states(&layer_run(layer, xs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiLstmModel {
    pub embedding: EmbeddingTable,
    pub trainable_embeddings: bool,
    pub layer1: BiLstmLayer,
    pub layer2: BiLstmLayer,
    pub dense_weights: Vec<f64>,
    pub dense_bias: f64,
}

impl BiLstmModel {
    /// All LSTM and dense parameters zero.
    pub fn zeros(embedding: EmbeddingTable, hidden: usize, trainable: bool) -> Self {
        let dim = embedding.dim;
        BiLstmModel {
            embedding,
            trainable_embeddings: trainable,
            layer1: BiLstmLayer::zeros(dim, hidden),
            layer2: BiLstmLayer::zeros(2 * hidden, hidden),
            dense_weights: vec![0.0; 2 * hidden],
            dense_bias: 0.0,
        }
    }

    pub fn init(embedding: EmbeddingTable, hidden: usize, trainable: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = embedding.dim;
        let layer1 = BiLstmLayer {
            forward: LstmParams::init(dim, hidden, &mut rng),
            backward: LstmParams::init(dim, hidden, &mut rng),
        };
        let layer2 = BiLstmLayer {
            forward: LstmParams::init(2 * hidden, hidden, &mut rng),
            backward: LstmParams::init(2 * hidden, hidden, &mut rng),
        };
        let dense_weights = Matrix::glorot(2 * hidden, 1, &mut rng).data;
        BiLstmModel {
            embedding,
            trainable_embeddings: trainable,
            layer1,
            layer2,
            dense_weights,
            dense_bias: 0.0,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.layer1.hidden_size()
    }

    fn zeros_like(&self) -> BiLstmModel {
        let h = self.hidden_size();
        BiLstmModel::zeros(
            EmbeddingTable::zeros(self.embedding.vocab_size(), self.embedding.dim),
            h,
            self.trainable_embeddings,
        )
    }

    /// Trainable tensors in a fixed order; the embedding table comes first
    /// when it is trainable.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::with_capacity(15);
        if self.trainable_embeddings {
            out.push(&self.embedding.rows.data);
        }
        for p in [
            &self.layer1.forward,
            &self.layer1.backward,
            &self.layer2.forward,
            &self.layer2.backward,
        ] {
            out.extend(p.tensors());
        }
        out.push(&self.dense_weights);
        out.push(std::slice::from_ref(&self.dense_bias));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::with_capacity(15);
        if self.trainable_embeddings {
            out.push(&mut self.embedding.rows.data);
        }
        for p in [
            &mut self.layer1.forward,
            &mut self.layer1.backward,
            &mut self.layer2.forward,
            &mut self.layer2.backward,
        ] {
            out.extend(p.tensors_mut());
        }
        out.push(&mut self.dense_weights);
        out.push(std::slice::from_mut(&mut self.dense_bias));
        out
    }

    pub fn is_finite(&self) -> bool {
        self.embedding.rows.is_finite() && self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    fn check_doc(&self, doc: &EncodedDoc) -> Result<()> {
        if doc.indices.is_empty() {
            return Err(Error::Shape("empty encoded sequence".into()));
        }
        let v = self.embedding.vocab_size() as u32;
        if let Some(&bad) = doc.indices.iter().find(|&&i| i > v) {
            return Err(Error::Shape(format!("index {bad} outside vocabulary of {v}")));
        }
        Ok(())
    }

    fn embed(&self, doc: &EncodedDoc) -> Vec<Vec<f64>> {
        doc.indices.iter().map(|&i| self.embedding.row(i).to_vec()).collect()
    }

    /// Logit and the caches needed for backpropagation.
    fn forward_cached(&self, doc: &EncodedDoc) -> (f64, LayerCache, LayerCache, Vec<f64>) {
        let xs = self.embed(doc);
        let c1 = layer_run(&self.layer1, &xs);
        let out1 = concat_states(&c1);
        let c2 = layer_run(&self.layer2, &out1);
        let n = xs.len();
        let summary: Vec<f64> = c2.fwd[n - 1].h.iter().chain(&c2.bwd[0].h).copied().collect();
        let logit = dot(&summary, &self.dense_weights) + self.dense_bias;
        (logit, c1, c2, summary)
    }

    pub fn logit(&self, doc: &EncodedDoc) -> Result<f64> {
        self.check_doc(doc)?;
        Ok(self.forward_cached(doc).0)
    }

    pub fn predict_proba(&self, doc: &EncodedDoc) -> Result<f64> {
        self.logit(doc).map(sigmoid)
    }

    /// Mean binary cross-entropy over `docs`.
    pub fn loss(&self, docs: &[EncodedDoc], labels: &[u8]) -> Result<f64> {
        let mut total = 0.0;
        for (d, &y) in docs.iter().zip(labels) {
            total += bce_with_logit(self.logit(d)?, f64::from(y));
        }
        Ok(total / docs.len().max(1) as f64)
    }
}

/// One probability per document.
pub fn bilstm_forward(batch: &[EncodedDoc], model: &BiLstmModel) -> Result<Vec<f64>> {
    if let Some(first) = batch.first() {
        let len = first.indices.len();
        if batch.iter().any(|d| d.indices.len() != len) {
            return Err(Error::Shape("sequences in a batch must share one length".into()));
        }
    }
    batch.iter().map(|d| model.predict_proba(d)).collect()
}

/// Mean loss over the batch and its gradient, in the layout of the model.
/// The padding row of the embedding gradient is always zero.
pub fn bilstm_loss_and_grad(
    model: &BiLstmModel,
    docs: &[&EncodedDoc],
    labels: &[u8],
) -> Result<(f64, BiLstmModel)> {
    let mut grad = model.zeros_like();
    let n = docs.len().max(1) as f64;
    let h = model.hidden_size();
    let mut loss = 0.0;
    for (doc, &y) in docs.iter().zip(labels) {
        model.check_doc(doc)?;
        let (logit, c1, c2, summary) = model.forward_cached(doc);
        let y = f64::from(y);
        loss += bce_with_logit(logit, y);
        let d_logit = (sigmoid(logit) - y) / n;
        grad.dense_bias += d_logit;
        for (g, s) in grad.dense_weights.iter_mut().zip(&summary) {
            *g += d_logit * s;
        }
        let t_len = doc.indices.len();

        let mut dh2f = vec![vec![0.0; h]; t_len];
        let mut dh2b = vec![vec![0.0; h]; t_len];
        for j in 0..h {
            dh2f[t_len - 1][j] = d_logit * model.dense_weights[j];
            dh2b[0][j] = d_logit * model.dense_weights[h + j];
        }
        let mut d_out1 = vec![vec![0.0; 2 * h]; t_len];
        backprop_direction(&model.layer2.forward, &c2.fwd, &dh2f, false, &mut grad.layer2.forward, &mut d_out1);
        backprop_direction(&model.layer2.backward, &c2.bwd, &dh2b, true, &mut grad.layer2.backward, &mut d_out1);

        let dh1f: Vec<Vec<f64>> = d_out1.iter().map(|d| d[..h].to_vec()).collect();
        let dh1b: Vec<Vec<f64>> = d_out1.iter().map(|d| d[h..].to_vec()).collect();
        let mut dx = vec![vec![0.0; model.embedding.dim]; t_len];
        backprop_direction(&model.layer1.forward, &c1.fwd, &dh1f, false, &mut grad.layer1.forward, &mut dx);
        backprop_direction(&model.layer1.backward, &c1.bwd, &dh1b, true, &mut grad.layer1.backward, &mut dx);

        if model.trainable_embeddings {
            for (&idx, d) in doc.indices.iter().zip(&dx) {
                if idx == 0 {
                    continue;
                }
                for (g, v) in grad.embedding.rows.row_mut(idx as usize).iter_mut().zip(d) {
                    *g += v;
                }
            }
        }
    }
    Ok((loss / n, grad))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiLstmTrace {
    /// Full-batch training loss after each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Mini-batch rmsprop training with full backpropagation through time.
pub fn bilstm_train(
    docs: &[EncodedDoc],
    labels: &[u8],
    embedding: EmbeddingTable,
    config: &BiLstmConfig,
    seed: u64,
) -> Result<BiLstmModel> {
    bilstm_train_inner(docs, labels, embedding, config, seed, false).map(|(m, _)| m)
}

pub fn bilstm_train_traced(
    docs: &[EncodedDoc],
    labels: &[u8],
    embedding: EmbeddingTable,
    config: &BiLstmConfig,
    seed: u64,
) -> Result<(BiLstmModel, BiLstmTrace)> {
    bilstm_train_inner(docs, labels, embedding, config, seed, true)
}

fn bilstm_train_inner(
    docs: &[EncodedDoc],
    labels: &[u8],
    embedding: EmbeddingTable,
    config: &BiLstmConfig,
    seed: u64,
    trace_loss: bool,
) -> Result<(BiLstmModel, BiLstmTrace)> {
    config.validate()?;
    check_binary(labels, docs.len())?;
    if !embedding.padding_is_zero() {
        return Err(Error::InvalidInput("embedding padding row must be zero".into()));
    }
    let trainable = config.trainable_embeddings.unwrap_or(false);
    let mut model = BiLstmModel::init(embedding, config.hidden, trainable, seed);
    for d in docs {
        model.check_doc(d)?;
    }
    let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    let mut state = RmspropState::new(config.rmsprop, &shapes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb157);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut trace = BiLstmTrace::default();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let batch_docs: Vec<&EncodedDoc> = batch.iter().map(|&i| &docs[i]).collect();
            let batch_labels: Vec<u8> = batch.iter().map(|&i| labels[i]).collect();
            let (_, grad) = bilstm_loss_and_grad(&model, &batch_docs, &batch_labels)?;
            let grads = grad.tensors();
            state.step(&mut model.tensors_mut(), &grads)?;
        }
        if trace_loss {
            trace.epoch_losses.push(model.loss(docs, labels)?);
        }
    }
    if !model.is_finite() {
        return Err(Error::NonFinite("bilstm parameters".into()));
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn doc(indices: &[u32]) -> EncodedDoc {
        EncodedDoc {
            indices: indices.to_vec(),
            original_length: indices.len(),
        }
    }

    fn random_model(seed: u64) -> BiLstmModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = EmbeddingTable::random(6, 3, 0.5, &mut rng);
        BiLstmModel::init(table, 2, true, seed)
    }

    #[test]
    fn zero_dense_gives_half() {
        let mut m = random_model(1);
        m.dense_weights.fill(0.0);
        m.dense_bias = 0.0;
        let probs = bilstm_forward(&[doc(&[1, 2, 3]), doc(&[4, 0, 0])], &m).unwrap();
        assert_eq!(probs, vec![0.5, 0.5]);
    }

    #[test]
    fn all_padding_with_zero_lstm_is_sigmoid_of_bias() {
        let mut m = BiLstmModel::zeros(EmbeddingTable::zeros(4, 3), 2, false);
        m.dense_weights = vec![0.3, -0.2, 0.9, 1.1];
        m.dense_bias = 0.7;
        let p = bilstm_forward(&[doc(&[0, 0, 0, 0])], &m).unwrap()[0];
        assert_eq!(p, sigmoid(0.7));
    }

    #[test]
    fn batch_permutation_permutes_outputs() {
        let m = random_model(2);
        let docs = vec![doc(&[1, 2, 0]), doc(&[3, 3, 4]), doc(&[6, 5, 1])];
        let p = bilstm_forward(&docs, &m).unwrap();
        let rev: Vec<EncodedDoc> = docs.iter().rev().cloned().collect();
        let q = bilstm_forward(&rev, &m).unwrap();
        assert_eq!(p, q.into_iter().rev().collect::<Vec<_>>());
        assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn shape_errors() {
        let m = random_model(3);
        assert!(bilstm_forward(&[doc(&[1, 2]), doc(&[1])], &m).is_err());
        assert!(bilstm_forward(&[doc(&[99])], &m).is_err());
    }

    #[test]
    fn reversal_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let layer = BiLstmLayer {
                forward: LstmParams::init(3, 2, &mut rng),
                backward: LstmParams::init(3, 2, &mut rng),
            };
            let swapped = BiLstmLayer {
                forward: layer.backward.clone(),
                backward: layer.forward.clone(),
            };
            let xs: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let out = bilstm_layer_forward(&layer, &xs);
            let rev_xs: Vec<Vec<f64>> = xs.iter().rev().cloned().collect();
            let out_rev = bilstm_layer_forward(&swapped, &rev_xs);
            for (a, b) in out.iter().zip(out_rev.iter().rev()) {
                let swapped_b: Vec<f64> = b[2..].iter().chain(&b[..2]).copied().collect();
                assert_eq!(a, &swapped_b);
            }
        }
    }

    #[test]
    fn frozen_embeddings_stay_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let table = EmbeddingTable::random(4, 3, 0.5, &mut rng);
        let docs = vec![doc(&[1, 2, 0]), doc(&[3, 4, 1]), doc(&[2, 2, 2]), doc(&[4, 0, 0])];
        let cfg = BiLstmConfig {
            hidden: 2,
            epochs: 3,
            trainable_embeddings: Some(false),
            ..Default::default()
        };
        let m = bilstm_train(&docs, &[1, 0, 1, 0], table.clone(), &cfg, 1).unwrap();
        assert_eq!(m.embedding, table);

        let cfg = BiLstmConfig { trainable_embeddings: Some(true), ..cfg };
        let m = bilstm_train(&docs, &[1, 0, 1, 0], table.clone(), &cfg, 1).unwrap();
        assert_ne!(m.embedding, table);
        assert!(m.embedding.padding_is_zero());
    }
}
