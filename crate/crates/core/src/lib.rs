//! Per-morbidity clinical note classification benchmark.
//!
//! The crate reproduces a comparison protocol between two TF-IDF baselines
//! (linear SVM and a one-hidden-layer perceptron) and a stacked
//! bidirectional LSTM fed with pretrained, domain-trained or random word
//! embeddings. Every learner is implemented here with hand-derived
//! gradients so that the whole pipeline is deterministic for a given seed.
//!
//! The modules follow the pipeline order:
//!
//! - [`corpus`]: JSON-Lines notes, binary dataset construction, synthetic corpora
//! - [`preprocess`]: normalization, tokenization, vocabulary, encoding, padding
//! - [`tfidf`]: document-term weighting and row normalization
//! - [`embeddings`]: text vector loader and a skip-gram negative-sampling trainer
//! - [`models`]: SVM, MLP, BiLSTM, rmsprop and persistence
//! - [`eval`]: stratified folds, F1, experiment orchestration and reports
//! - [`cli`]: the command layer used by the `morbench` binary

pub mod cli;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod models;
pub mod preprocess;
pub mod seed;
pub mod tfidf;

pub use error::{Error, Result};
