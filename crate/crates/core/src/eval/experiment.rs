//! Cross-validated comparison over morbidities and representations.
//!
//! Each (morbidity, representation, fold) cell is an independent task over
//! immutable inputs. Seeds come from [`crate::seed::derive_seed`]:
//!
//! - fold split: `[morbidity, "split"]`, shared by every representation
//! - model training: `[morbidity, representation, "fold", fold]`
//! - domain embeddings: `[morbidity, representation, "embedding", fold]`
//!   (`"corpus"` in place of the fold under `fit_scope = corpus`)
//!
//! so results do not depend on the number of worker threads.

use std::collections::HashSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, F1Mode, FitScope, Representation};
use super::kfold::{stratified_kfold, FoldSplit};
use super::metrics::{confusion, Confusion};
use crate::corpus::{build_binary_dataset, ClinicalNote};
use crate::embeddings::{train_skipgram, EmbeddingTable, SkipgramConfig, VectorStore};
use crate::error::{Error, Result};
use crate::models::{bilstm_train, mlp_train, svm_train};
use crate::preprocess::{
    analyze, build_vocabulary, compute_max_len, encode, filter_for_tfidf, pad_truncate, EncodedDoc,
    Stopwords, Vocabulary,
};
use crate::seed::derive_seed;
use crate::tfidf::TfidfModel;

/// One line of `raw.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub morbidity: String,
    pub representation: String,
    /// `None` for a cell that could not be evaluated.
    pub fold: Option<usize>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub confusion: Option<Confusion>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_train: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

pub const STATUS_OK: &str = "ok";
pub const STATUS_NA: &str = "n/a";

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Scored { fold_f1: Vec<f64>, mean: f64 },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub morbidity: String,
    pub representation: String,
    pub outcome: CellOutcome,
}

impl CellResult {
    pub fn mean(&self) -> Option<f64> {
        match &self.outcome {
            CellOutcome::Scored { mean, .. } => Some(*mean),
            CellOutcome::NotApplicable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldTiming {
    pub morbidity: String,
    pub representation: String,
    pub fold: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub morbidities: Vec<String>,
    pub representations: Vec<String>,
    pub cells: Vec<CellResult>,
    pub folds: Vec<FoldRecord>,
    /// Wall-clock per fold; kept out of `raw.jsonl` so reruns compare byte for byte.
    pub timings: Vec<FoldTiming>,
}

impl ExperimentReport {
    pub fn cell(&self, morbidity: &str, representation: &str) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.morbidity == morbidity && c.representation == representation)
    }

    /// Unweighted mean of the scored per-morbidity means.
    pub fn average(&self, representation: &str) -> Option<f64> {
        let means: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.representation == representation)
            .filter_map(CellResult::mean)
            .collect();
        if means.is_empty() {
            None
        } else {
            Some(means.iter().sum::<f64>() / means.len() as f64)
        }
    }

    /// Rebuilds cells from `raw.jsonl` records; orders follow first appearance.
    pub fn from_records(folds: Vec<FoldRecord>) -> Result<Self> {
        let mut morbidities: Vec<String> = Vec::new();
        let mut representations: Vec<String> = Vec::new();
        for r in &folds {
            if !morbidities.contains(&r.morbidity) {
                morbidities.push(r.morbidity.clone());
            }
            if !representations.contains(&r.representation) {
                representations.push(r.representation.clone());
            }
        }
        let mut cells = Vec::new();
        for m in &morbidities {
            for rep in &representations {
                let mine: Vec<&FoldRecord> = folds
                    .iter()
                    .filter(|r| &r.morbidity == m && &r.representation == rep)
                    .collect();
                if mine.is_empty() {
                    continue;
                }
                let outcome = if let Some(na) = mine.iter().find(|r| r.status != STATUS_OK) {
                    CellOutcome::NotApplicable {
                        reason: na.reason.clone().unwrap_or_default(),
                    }
                } else {
                    let mut scored: Vec<(usize, f64)> = mine
                        .iter()
                        .map(|r| {
                            let fold = r.fold.ok_or_else(|| Error::Validation(format!("{m}/{rep}: scored record without fold")))?;
                            let f1 = r.f1.ok_or_else(|| Error::Validation(format!("{m}/{rep}: scored record without f1")))?;
                            Ok((fold, f1))
                        })
                        .collect::<Result<_>>()?;
                    scored.sort_by_key(|&(f, _)| f);
                    let fold_f1: Vec<f64> = scored.into_iter().map(|(_, f)| f).collect();
                    let mean = mean_of(&fold_f1);
                    CellOutcome::Scored { fold_f1, mean }
                };
                cells.push(CellResult {
                    morbidity: m.clone(),
                    representation: rep.clone(),
                    outcome,
                });
            }
        }
        Ok(ExperimentReport {
            morbidities,
            representations,
            cells,
            folds,
            timings: Vec::new(),
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.folds {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self> {
        let mut folds = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: FoldRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            folds.push(rec);
        }
        Self::from_records(folds)
    }
}

fn mean_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Per-record views of a morbidity dataset, computed once.
struct PreparedDataset {
    morbidity: String,
    labels: Vec<u8>,
    tokens: Vec<Vec<String>>,
    tfidf_tokens: Vec<Vec<String>>,
    split: FoldSplit,
}

/// Indices the representation is fitted on for one fold.
pub fn fit_indices(split: &FoldSplit, fold: usize, scope: FitScope) -> Vec<usize> {
    match scope {
        FitScope::Fold => split.train_indices(fold),
        FitScope::Corpus => (0..split.assignment.len()).collect(),
    }
}

fn gather<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// TF-IDF fitted for one fold.
pub fn fit_fold_tfidf(
    tfidf_tokens: &[Vec<String>],
    split: &FoldSplit,
    fold: usize,
    scope: FitScope,
) -> Result<TfidfModel> {
    TfidfModel::fit(&gather(tfidf_tokens, &fit_indices(split, fold, scope)))
}

/// Vocabulary fitted for one fold.
pub fn fit_fold_vocabulary(tokens: &[Vec<String>], split: &FoldSplit, fold: usize, scope: FitScope) -> Vocabulary {
    build_vocabulary(&gather(tokens, &fit_indices(split, fold, scope)))
}

struct Task<'a> {
    data: &'a PreparedDataset,
    representation: Representation,
    fold: usize,
}

struct TaskOutput {
    confusion: Confusion,
    n_train: usize,
    seconds: f64,
}

struct Shared<'a> {
    config: &'a ExperimentConfig,
    master_seed: u64,
    word2vec: Option<VectorStore>,
    glove: Option<VectorStore>,
}

fn run_task(task: &Task<'_>, shared: &Shared<'_>) -> Result<TaskOutput> {
    let start = Instant::now();
    let cfg = shared.config;
    let data = task.data;
    let rep = task.representation;
    let fold = task.fold;
    let fold_label = fold.to_string();
    let train = data.split.train_indices(fold);
    let test = data.split.test_indices(fold);
    let train_labels = gather(&data.labels, &train);
    let test_labels = gather(&data.labels, &test);
    let model_seed = derive_seed(
        shared.master_seed,
        &[&data.morbidity, rep.as_str(), "fold", &fold_label],
    );

    let predictions: Vec<u8> = if rep.is_tfidf() {
        let model = fit_fold_tfidf(&data.tfidf_tokens, &data.split, fold, cfg.fit_scope)?;
        let train_rows = model.transform_all(&gather(&data.tfidf_tokens, &train));
        let test_rows = model.transform_all(&gather(&data.tfidf_tokens, &test));
        let n = model.n_features();
        match rep {
            Representation::TfidfSvm => {
                let svm = svm_train(&train_rows.rows, n, &train_labels, &cfg.svm, model_seed)?;
                test_rows.rows.iter().map(|r| svm.predict_sparse(r)).collect()
            }
            _ => {
                let mlp = mlp_train(&train_rows.rows, n, &train_labels, &cfg.mlp, model_seed)?;
                test_rows.rows.iter().map(|r| mlp.predict(r)).collect()
            }
        }
    } else {
        let fit_idx = fit_indices(&data.split, fold, cfg.fit_scope);
        let fit_tokens = gather(&data.tokens, &fit_idx);
        let vocab = build_vocabulary(&fit_tokens);
        let counts: Vec<usize> = fit_tokens.iter().map(Vec::len).collect();
        let policy = compute_max_len(&counts)?;
        let encode_docs = |idx: &[usize]| -> Vec<EncodedDoc> {
            idx.iter()
                .map(|&i| pad_truncate(&encode(&data.tokens[i], &vocab), &policy))
                .collect()
        };
        let train_docs = encode_docs(&train);
        let test_docs = encode_docs(&test);
        let (table, default_trainable) = match rep {
            Representation::BilstmPretrainedW2v => {
                (shared.word2vec.as_ref().expect("loaded").table(&vocab).0, false)
            }
            Representation::BilstmGlove => (shared.glove.as_ref().expect("loaded").table(&vocab).0, false),
            Representation::BilstmDomainW2v => {
                let scope_label = match cfg.fit_scope {
                    FitScope::Fold => fold_label.as_str(),
                    FitScope::Corpus => "corpus",
                };
                let sg = SkipgramConfig {
                    seed: derive_seed(
                        shared.master_seed,
                        &[&data.morbidity, rep.as_str(), "embedding", scope_label],
                    ),
                    ..cfg.skipgram.clone()
                };
                let table = if vocab.is_empty() {
                    EmbeddingTable::zeros(0, sg.dim)
                } else {
                    train_skipgram(&fit_tokens, &vocab, &sg)?
                };
                (table, false)
            }
            Representation::BilstmRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(model_seed ^ 0xe3b);
                (
                    EmbeddingTable::random(
                        vocab.len(),
                        cfg.bilstm.embedding_dim,
                        cfg.bilstm.embedding_init_limit,
                        &mut rng,
                    ),
                    true,
                )
            }
            Representation::TfidfSvm | Representation::TfidfMlp => unreachable!(),
        };
        let bilstm_cfg = crate::models::BiLstmConfig {
            trainable_embeddings: Some(cfg.bilstm.trainable_embeddings.unwrap_or(default_trainable)),
            ..cfg.bilstm.clone()
        };
        let model = bilstm_train(&train_docs, &train_labels, table, &bilstm_cfg, model_seed)?;
        test_docs
            .iter()
            .map(|d| model.predict_proba(d).map(|p| (p >= 0.5) as u8))
            .collect::<Result<_>>()?
    };
    Ok(TaskOutput {
        confusion: confusion(&test_labels, &predictions)?,
        n_train: train.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn load_store(path: &std::path::Path, dim: usize, words: &HashSet<String>) -> Result<VectorStore> {
    VectorStore::load(path, dim, Some(words))
}

/// Runs the full protocol. `seed` is the master seed; `config.jobs` worker
/// threads execute the cells, with output identical to a sequential run.
pub fn run_experiment<S: AsRef<str>>(
    notes: &[ClinicalNote],
    morbidities: &[S],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    config.validate()?;
    let stopwords = match &config.stopwords {
        Some(p) => Stopwords::load(p)?,
        None => Stopwords::english(),
    };

    let mut prepared: Vec<std::result::Result<PreparedDataset, (String, String)>> = Vec::new();
    for m in morbidities {
        let m = m.as_ref();
        let ds = build_binary_dataset(notes, m);
        let labels = ds.labels();
        let pos = ds.positives();
        let neg = ds.negatives();
        if pos == 0 || neg == 0 {
            prepared.push(Err((
                m.to_string(),
                format!("dataset has {pos} positive and {neg} negative records"),
            )));
            continue;
        }
        let split = match stratified_kfold(&labels, config.k, derive_seed(seed, &[m, "split"])) {
            Ok(s) => s,
            Err(e) => {
                prepared.push(Err((m.to_string(), e.to_string())));
                continue;
            }
        };
        let tokens: Vec<Vec<String>> = ds.records.iter().map(|r| analyze(&r.text)).collect();
        let tfidf_tokens = tokens.iter().map(|t| filter_for_tfidf(t, &stopwords)).collect();
        prepared.push(Ok(PreparedDataset {
            morbidity: m.to_string(),
            labels,
            tokens,
            tfidf_tokens,
            split,
        }));
    }

    let needs = |r: Representation| config.representations.contains(&r);
    let corpus_words = || -> HashSet<String> {
        prepared
            .iter()
            .filter_map(|p| p.as_ref().ok())
            .flat_map(|p| p.tokens.iter().flatten().cloned())
            .collect()
    };
    let mut word2vec = None;
    let mut glove = None;
    if needs(Representation::BilstmPretrainedW2v) || needs(Representation::BilstmGlove) {
        let words = corpus_words();
        if needs(Representation::BilstmPretrainedW2v) {
            let path = config.embeddings.word2vec.as_ref().expect("validated");
            word2vec = Some(load_store(path, config.embeddings.dim, &words)?);
        }
        if needs(Representation::BilstmGlove) {
            let path = config.embeddings.glove.as_ref().expect("validated");
            glove = Some(load_store(path, config.embeddings.dim, &words)?);
        }
    }
    let shared = Shared {
        config,
        master_seed: seed,
        word2vec,
        glove,
    };

    let mut tasks = Vec::new();
    for data in prepared.iter().filter_map(|p| p.as_ref().ok()) {
        for &rep in &config.representations {
            for fold in 0..config.k {
                tasks.push(Task {
                    data,
                    representation: rep,
                    fold,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outputs: Vec<TaskOutput> =
        pool.install(|| tasks.par_iter().map(|t| run_task(t, &shared)).collect::<Result<Vec<_>>>())?;

    let mut folds = Vec::new();
    let mut timings = Vec::new();
    let mut out_iter = tasks.iter().zip(outputs);
    for p in &prepared {
        match p {
            Err((m, reason)) => {
                for rep in &config.representations {
                    folds.push(FoldRecord {
                        morbidity: m.clone(),
                        representation: rep.as_str().to_string(),
                        fold: None,
                        status: STATUS_NA.to_string(),
                        f1: None,
                        confusion: None,
                        n_train: None,
                        reason: Some(reason.clone()),
                    });
                }
            }
            Ok(_) => {
                for _ in 0..config.representations.len() * config.k {
                    let (task, out) = out_iter.next().expect("one output per task");
                    let f1 = match config.f1_mode {
                        F1Mode::Binary => out.confusion.f1(),
                        F1Mode::Weighted => out.confusion.weighted_f1(),
                    };
                    folds.push(FoldRecord {
                        morbidity: task.data.morbidity.clone(),
                        representation: task.representation.as_str().to_string(),
                        fold: Some(task.fold),
                        status: STATUS_OK.to_string(),
                        f1: Some(f1),
                        confusion: Some(out.confusion),
                        n_train: Some(out.n_train),
                        reason: None,
                    });
                    timings.push(FoldTiming {
                        morbidity: task.data.morbidity.clone(),
                        representation: task.representation.as_str().to_string(),
                        fold: task.fold,
                        seconds: out.seconds,
                    });
                }
            }
        }
    }
    let mut report = ExperimentReport::from_records(folds)?;
    report.morbidities = morbidities.iter().map(|m| m.as_ref().to_string()).collect();
    report.representations = config.representations.iter().map(|r| r.as_str().to_string()).collect();
    report.timings = timings;
    Ok(report)
}
