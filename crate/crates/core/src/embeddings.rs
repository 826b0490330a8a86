//! Word embedding tables: a text vector loader and a skip-gram trainer.
//!
//! Vector files are UTF-8 text with one `word v1 ... v_dim` entry per line.
//! An optional `V dim` header line is skipped. Binary vector formats are not
//! read; convert them to text first.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, sigmoid, softplus, Matrix};
use crate::preprocess::{EncodedDoc, Vocabulary};

/// `(V + 1) x dim` table aligned to a [`Vocabulary`]; row 0 is padding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub rows: Matrix,
}

impl EmbeddingTable {
    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        EmbeddingTable {
            dim,
            rows: Matrix::zeros(vocab_size + 1, dim),
        }
    }

    /// Uniform random rows in `[-limit, limit]` with a zero padding row.
    pub fn random<R: Rng>(vocab_size: usize, dim: usize, limit: f64, rng: &mut R) -> Self {
        let mut rows = Matrix::uniform(vocab_size + 1, dim, limit, rng);
        rows.row_mut(0).fill(0.0);
        EmbeddingTable { dim, rows }
    }

    /// Number of vocabulary rows, padding excluded.
    pub fn vocab_size(&self) -> usize {
        self.rows.rows - 1
    }

    pub fn row(&self, index: u32) -> &[f64] {
        self.rows.row(index as usize)
    }

    pub fn padding_is_zero(&self) -> bool {
        self.rows.row(0).iter().all(|&v| v == 0.0)
    }

    /// Writes the text vector format with a `V dim` header.
    pub fn write_text<W: Write>(&self, vocab: &Vocabulary, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", vocab.len(), self.dim)?;
        for (i, word) in vocab.words().iter().enumerate() {
            write!(out, "{word}")?;
            for v in self.rows.row(i + 1) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LoadStats {
    pub found: usize,
    pub oov: usize,
}

impl LoadStats {
    pub fn oov_rate(&self) -> f64 {
        let total = self.found + self.oov;
        if total == 0 {
            0.0
        } else {
            self.oov as f64 / total as f64
        }
    }
}

/// Parsed vectors kept in memory, optionally restricted to a word set.
/// When a word occurs twice in a file, the first entry wins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorStore {
    pub dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl VectorStore {
    pub fn read<R: BufRead>(reader: R, dim: usize, keep: Option<&HashSet<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        let mut vectors = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let mut parts = line.split(' ').filter(|p| !p.is_empty());
            let Some(word) = parts.next() else { continue };
            let values: Vec<&str> = parts.collect();
            if line_no == 1
                && values.len() == 1
                && word.parse::<usize>().is_ok()
                && values[0].parse::<usize>().is_ok()
            {
                continue;
            }
            if values.len() != dim {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {dim} values, found {}", values.len()),
                });
            }
            if keep.is_some_and(|k| !k.contains(word)) || vectors.contains_key(word) {
                continue;
            }
            let mut row = Vec::with_capacity(dim);
            for raw in &values {
                let v: f64 = raw.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid number {raw:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("line {line_no}: value {raw}")));
                }
                row.push(v);
            }
            vectors.insert(word.to_string(), row);
        }
        Ok(VectorStore { dim, vectors })
    }

    pub fn load(path: impl AsRef<Path>, dim: usize, keep: Option<&HashSet<String>>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), dim, keep)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Table aligned to `vocab`; missing words get the zero vector.
    pub fn table(&self, vocab: &Vocabulary) -> (EmbeddingTable, LoadStats) {
        let mut table = EmbeddingTable::zeros(vocab.len(), self.dim);
        let mut found = 0;
        for (i, word) in vocab.words().iter().enumerate() {
            if let Some(v) = self.vectors.get(word) {
                table.rows.row_mut(i + 1).copy_from_slice(v);
                found += 1;
            }
        }
        (
            table,
            LoadStats {
                found,
                oov: vocab.len() - found,
            },
        )
    }
}

/// Reads vectors for the words of `vocab`; missing words keep a zero row.
pub fn read_pretrained<R: BufRead>(
    reader: R,
    vocab: &Vocabulary,
    dim: usize,
) -> Result<(EmbeddingTable, LoadStats)> {
    let keep: HashSet<String> = vocab.words().iter().cloned().collect();
    let store = VectorStore::read(reader, dim, Some(&keep))?;
    Ok(store.table(vocab))
}

pub fn load_pretrained(
    path: impl AsRef<Path>,
    vocab: &Vocabulary,
    dim: usize,
) -> Result<(EmbeddingTable, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_pretrained(BufReader::new(file), vocab, dim)
}

/// Embedded sequence: row `t` is the table row of the `t`-th index.
pub fn lookup_sequence(encoded: &EncodedDoc, table: &EmbeddingTable) -> Result<Vec<Vec<f64>>> {
    encoded
        .indices
        .iter()
        .map(|&i| {
            if i as usize > table.vocab_size() {
                Err(Error::InvalidInput(format!(
                    "index {i} outside embedding table of {} words",
                    table.vocab_size()
                )))
            } else {
                Ok(table.row(i).to_vec())
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SkipgramConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        SkipgramConfig {
            dim: 300,
            window: 5,
            epochs: 10,
            negatives: 5,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

impl SkipgramConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.dim >= 1, "dim"),
            (self.window >= 1, "window"),
            (self.epochs >= 1, "epochs"),
            (self.negatives >= 1, "negatives"),
        ];
        for (ok, name) in checks {
            if !ok {
                return Err(Error::Config(format!("skipgram.{name} must be at least 1")));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("skipgram.learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Draws word indices from the unigram distribution raised to 0.75.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    /// `counts[i]` is the corpus frequency of vocabulary index `i + 1`.
    pub fn new(counts: &[usize]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeSampler { cumulative }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    /// Returns a vocabulary index in `1..=V`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("sampler over empty vocabulary");
        let r = rng.gen::<f64>() * total;
        let pos = self.cumulative.partition_point(|&c| c <= r);
        pos.min(self.cumulative.len() - 1) as u32 + 1
    }
}

/// Loss of one (center, context) pair with sampled negatives:
/// `-ln σ(u_o·v_c) - Σ_k ln σ(-u_k·v_c)`.
pub fn sgns_pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let mut loss = softplus(-dot(context, center));
    for neg in negatives {
        loss += softplus(dot(neg, center));
    }
    loss
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradients {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradients of [`sgns_pair_loss`].
pub fn sgns_pair_gradients(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> SgnsGradients {
    let g_pos = sigmoid(dot(context, center)) - 1.0;
    let mut d_center: Vec<f64> = context.iter().map(|u| g_pos * u).collect();
    let d_context = center.iter().map(|v| g_pos * v).collect();
    let mut d_negs = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let g = sigmoid(dot(neg, center));
        for (d, u) in d_center.iter_mut().zip(neg.iter()) {
            *d += g * u;
        }
        d_negs.push(center.iter().map(|v| g * v).collect());
    }
    SgnsGradients {
        center: d_center,
        context: d_context,
        negatives: d_negs,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SkipgramTrace {
    /// Mean pair loss per epoch, measured before each pair's update.
    pub epoch_losses: Vec<f64>,
    pub pairs_per_epoch: usize,
}

/// Skip-gram with negative sampling over already-tokenized documents.
///
/// Center vectors start uniform in `[-0.5/dim, 0.5/dim]`, context vectors at
/// zero. The learning rate decays linearly from `learning_rate` to a tenth of
/// it across all pair updates. Training is sequential, so a fixed seed gives
/// a bit-identical table.
pub fn train_skipgram<S: AsRef<str>>(
    docs: &[Vec<S>],
    vocab: &Vocabulary,
    config: &SkipgramConfig,
) -> Result<EmbeddingTable> {
    train_skipgram_traced(docs, vocab, config).map(|(t, _)| t)
}

pub fn train_skipgram_traced<S: AsRef<str>>(
    docs: &[Vec<S>],
    vocab: &Vocabulary,
    config: &SkipgramConfig,
) -> Result<(EmbeddingTable, SkipgramTrace)> {
    config.validate()?;
    if docs.is_empty() || vocab.is_empty() {
        return Err(Error::InvalidInput("skip-gram training needs a non-empty corpus".into()));
    }
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let half = 0.5 / dim as f64;
    let mut center = Matrix::uniform(vocab.len() + 1, dim, half, &mut rng);
    center.row_mut(0).fill(0.0);
    let mut context = Matrix::zeros(vocab.len() + 1, dim);

    let encoded: Vec<Vec<u32>> = docs
        .iter()
        .map(|d| d.iter().filter_map(|t| vocab.get(t.as_ref())).collect())
        .collect();
    let mut counts = vec![0usize; vocab.len()];
    for doc in &encoded {
        for &i in doc {
            counts[i as usize - 1] += 1;
        }
    }
    let sampler = NegativeSampler::new(&counts);

    let window = config.window;
    let pairs_per_epoch: usize = encoded
        .iter()
        .map(|d| {
            (0..d.len())
                .map(|c| {
                    let lo = c.saturating_sub(window);
                    let hi = (c + window).min(d.len() - 1);
                    hi - lo
                })
                .sum::<usize>()
        })
        .sum();
    let total_updates = (pairs_per_epoch * config.epochs).max(1) as f64;
    let mut step = 0usize;
    let mut trace = SkipgramTrace {
        epoch_losses: Vec::with_capacity(config.epochs),
        pairs_per_epoch,
    };

    let mut neg_ids: Vec<u32> = Vec::with_capacity(config.negatives);
    let mut d_center = vec![0.0; dim];
    for _ in 0..config.epochs {
        let mut epoch_loss = 0.0;
        for doc in &encoded {
            for c in 0..doc.len() {
                let lo = c.saturating_sub(window);
                let hi = (c + window).min(doc.len() - 1);
                for o in lo..=hi {
                    if o == c {
                        continue;
                    }
                    let lr = config.learning_rate * (1.0 - 0.9 * step as f64 / total_updates);
                    step += 1;
                    let vc = doc[c] as usize;
                    let uo = doc[o] as usize;
                    neg_ids.clear();
                    for _ in 0..config.negatives {
                        let k = sampler.sample(&mut rng);
                        if k as usize != uo {
                            neg_ids.push(k);
                        }
                    }

                    d_center.fill(0.0);
                    let s = dot(context.row(uo), center.row(vc));
                    epoch_loss += softplus(-s);
                    let g = sigmoid(s) - 1.0;
                    for (d, u) in d_center.iter_mut().zip(context.row(uo)) {
                        *d += g * u;
                    }
                    let vc_row = center.row(vc).to_vec();
                    for (u, v) in context.row_mut(uo).iter_mut().zip(&vc_row) {
                        *u -= lr * g * v;
                    }
                    for &k in &neg_ids {
                        let k = k as usize;
                        let s = dot(context.row(k), &vc_row);
                        epoch_loss += softplus(s);
                        let g = sigmoid(s);
                        for (d, u) in d_center.iter_mut().zip(context.row(k)) {
                            *d += g * u;
                        }
                        for (u, v) in context.row_mut(k).iter_mut().zip(&vc_row) {
                            *u -= lr * g * v;
                        }
                    }
                    for (v, d) in center.row_mut(vc).iter_mut().zip(&d_center) {
                        *v -= lr * d;
                    }
                }
            }
        }
        trace
            .epoch_losses
            .push(if pairs_per_epoch == 0 { 0.0 } else { epoch_loss / pairs_per_epoch as f64 });
    }
    if !center.is_finite() {
        return Err(Error::NonFinite("skip-gram training diverged".into()));
    }
    Ok((EmbeddingTable { dim, rows: center }, trace))
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}
