use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embeddings::SkipgramConfig;
use crate::error::{Error, Result};
use crate::models::{BiLstmConfig, MlpConfig, SvmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    TfidfSvm,
    TfidfMlp,
    BilstmPretrainedW2v,
    BilstmGlove,
    BilstmDomainW2v,
    /// BiLSTM over uniformly initialized, trainable embeddings.
    BilstmRandom,
}

impl Representation {
    pub const ALL: [Representation; 6] = [
        Representation::TfidfSvm,
        Representation::TfidfMlp,
        Representation::BilstmPretrainedW2v,
        Representation::BilstmGlove,
        Representation::BilstmDomainW2v,
        Representation::BilstmRandom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::TfidfSvm => "tfidf_svm",
            Representation::TfidfMlp => "tfidf_mlp",
            Representation::BilstmPretrainedW2v => "bilstm_pretrained_w2v",
            Representation::BilstmGlove => "bilstm_glove",
            Representation::BilstmDomainW2v => "bilstm_domain_w2v",
            Representation::BilstmRandom => "bilstm_random",
        }
    }

    pub fn is_tfidf(self) -> bool {
        matches!(self, Representation::TfidfSvm | Representation::TfidfMlp)
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown representation {s:?}; valid names: {}",
                    Self::valid_names()
                ))
            })
    }
}

/// Where representations are fitted: on the training folds only, or once on
/// the whole per-morbidity dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitScope {
    #[default]
    Fold,
    Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F1Mode {
    /// Positive-class F1.
    #[default]
    Binary,
    /// Support-weighted mean of the per-class F1 scores.
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingFiles {
    pub word2vec: Option<PathBuf>,
    pub glove: Option<PathBuf>,
    pub dim: usize,
}

impl Default for EmbeddingFiles {
    fn default() -> Self {
        EmbeddingFiles {
            word2vec: None,
            glove: None,
            dim: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub k: usize,
    pub jobs: usize,
    pub representations: Vec<Representation>,
    /// Morbidities to evaluate; `None` means the sixteen standard classes.
    pub morbidities: Option<Vec<String>>,
    pub fit_scope: FitScope,
    pub f1_mode: F1Mode,
    /// Stopword file; the bundled English list when absent.
    pub stopwords: Option<PathBuf>,
    pub svm: SvmConfig,
    pub mlp: MlpConfig,
    pub bilstm: BiLstmConfig,
    pub skipgram: SkipgramConfig,
    pub embeddings: EmbeddingFiles,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            k: 10,
            jobs: 1,
            representations: vec![
                Representation::BilstmGlove,
                Representation::BilstmPretrainedW2v,
                Representation::BilstmDomainW2v,
                Representation::TfidfSvm,
                Representation::TfidfMlp,
            ],
            morbidities: None,
            fit_scope: FitScope::Fold,
            f1_mode: F1Mode::Binary,
            stopwords: None,
            svm: SvmConfig::default(),
            mlp: MlpConfig::default(),
            bilstm: BiLstmConfig::default(),
            skipgram: SkipgramConfig::default(),
            embeddings: EmbeddingFiles::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config("k must be at least 2".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.representations.is_empty() {
            return Err(Error::Config(format!(
                "no representations configured; valid names: {}",
                Representation::valid_names()
            )));
        }
        let mut seen = Vec::new();
        for r in &self.representations {
            if seen.contains(r) {
                return Err(Error::Config(format!("representation {r} listed twice")));
            }
            seen.push(*r);
        }
        if self.representations.contains(&Representation::BilstmPretrainedW2v)
            && self.embeddings.word2vec.is_none()
        {
            return Err(Error::Config(
                "bilstm_pretrained_w2v needs embeddings.word2vec".into(),
            ));
        }
        if self.representations.contains(&Representation::BilstmGlove) && self.embeddings.glove.is_none() {
            return Err(Error::Config("bilstm_glove needs embeddings.glove".into()));
        }
        if self.embeddings.dim == 0 {
            return Err(Error::Config("embeddings.dim must be positive".into()));
        }
        self.svm.validate()?;
        self.mlp.validate()?;
        self.bilstm.validate()?;
        self.skipgram.validate()
    }

    pub fn morbidity_list(&self) -> Vec<String> {
        match &self.morbidities {
            Some(list) => list.clone(),
            None => crate::corpus::MORBIDITIES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            if msg.contains("unknown variant") {
                Error::Config(format!("{msg}; valid representation names: {}", Representation::valid_names()))
            } else {
                Error::Config(msg)
            }
        })?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
