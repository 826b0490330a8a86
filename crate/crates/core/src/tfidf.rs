//! TF-IDF weighting over filtered tokens.
//!
//! For a word `w` in document `d_i` of a fitted collection of `N` documents:
//!
//! ```text
//! tfidf(w, d_i) = (c_i^w / |d_i|) * ln(N / n^w)
//! ```
//!
//! where `c_i^w` counts occurrences of `w` in `d_i`, `|d_i|` is the token count
//! of `d_i` and `n^w` is the number of fitted documents containing `w`. Rows are
//! then scaled by their maximum so every weight lies in `[0, 1]`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse row: `(column, weight)` pairs sorted by column.
pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    /// Column vocabulary, sorted lexicographically.
    words: Vec<String>,
    doc_freq: Vec<usize>,
    corpus_size: usize,
    #[serde(skip)]
    columns: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTermMatrix {
    pub n_cols: usize,
    pub rows: Vec<SparseRow>,
}

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::InvalidInput("cannot fit TF-IDF on an empty corpus".into()));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.iter().map(AsRef::as_ref).collect();
            seen.sort_unstable();
            seen.dedup();
            for w in seen {
                *df.entry(w).or_default() += 1;
            }
        }
        let (words, doc_freq): (Vec<String>, Vec<usize>) =
            df.into_iter().map(|(w, n)| (w.to_string(), n)).unzip();
        let mut model = TfidfModel {
            words,
            doc_freq,
            corpus_size: docs.len(),
            columns: HashMap::new(),
        };
        model.rebuild_index();
        Ok(model)
    }

    pub fn rebuild_index(&mut self) {
        self.columns = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
    }

    pub fn n_features(&self) -> usize {
        self.words.len()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn column(&self, word: &str) -> Option<usize> {
        self.columns.get(word).copied()
    }

    pub fn doc_freq(&self, word: &str) -> Option<usize> {
        self.column(word).map(|c| self.doc_freq[c])
    }

    pub fn idf(&self, word: &str) -> Option<f64> {
        self.doc_freq(word)
            .map(|n| (self.corpus_size as f64 / n as f64).ln())
    }

    /// Unnormalized weights of one document. Empty documents give an empty row.
    pub fn transform<S: AsRef<str>>(&self, doc: &[S]) -> SparseRow {
        if doc.is_empty() {
            return Vec::new();
        }
        let len = doc.len() as f64;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for tok in doc {
            if let Some(c) = self.column(tok.as_ref()) {
                *counts.entry(c).or_default() += 1;
            }
        }
        let n = self.corpus_size as f64;
        counts
            .into_iter()
            .map(|(col, c)| {
                let idf = (n / self.doc_freq[col] as f64).ln();
                (col, (c as f64 / len) * idf)
            })
            .collect()
    }

    /// Fit on `docs` and return the normalized matrix of the same documents.
    pub fn fit_transform<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<(Self, DocTermMatrix)> {
        let model = Self::fit(docs)?;
        let matrix = model.transform_all(docs);
        Ok((model, matrix))
    }

    /// Transforms and row-normalizes every document.
    pub fn transform_all<S: AsRef<str>>(&self, docs: &[Vec<S>]) -> DocTermMatrix {
        let rows = docs.iter().map(|d| self.transform(d)).collect();
        normalize_rows(DocTermMatrix {
            n_cols: self.n_features(),
            rows,
        })
    }
}

/// Divides each row by its maximum weight; all-zero rows are left alone.
pub fn normalize_rows(mut matrix: DocTermMatrix) -> DocTermMatrix {
    for row in &mut matrix.rows {
        normalize_row(row);
    }
    matrix
}

pub fn normalize_row(row: &mut SparseRow) {
    let max = row.iter().map(|&(_, w)| w).fold(0.0_f64, f64::max);
    if max > 0.0 {
        for (_, w) in row.iter_mut() {
            *w /= max;
        }
    }
}

impl DocTermMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn dense_row(&self, r: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for &(c, w) in &self.rows[r] {
            out[c] = w;
        }
        out
    }

    pub fn select(&self, indices: &[usize]) -> DocTermMatrix {
        DocTermMatrix {
            n_cols: self.n_cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Debug dump: header of vocabulary words, one dense row per document.
    pub fn write_csv<W: Write>(&self, model: &TfidfModel, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", model.words().join(","))?;
        for r in 0..self.n_rows() {
            let cells: Vec<String> = self.dense_row(r).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}
