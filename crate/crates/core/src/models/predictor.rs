//! Raw-text predictor: a trained model bundled with the preprocessing it
//! was fitted with.

use super::bilstm::BiLstmModel;
use super::mlp::MlpModel;
use super::svm::SvmModel;
use crate::error::{Error, Result};
use crate::linalg::sigmoid;
use crate::preprocess::{analyze, encode, filter_for_tfidf, pad_truncate, LengthPolicy, Stopwords, Vocabulary};
use crate::tfidf::{normalize_row, SparseRow, TfidfModel};

#[derive(Debug, Clone)]
pub struct TfidfPipeline {
    pub stopwords: Stopwords,
    pub model: TfidfModel,
}

impl TfidfPipeline {
    pub fn row(&self, text: &str) -> SparseRow {
        let tokens = filter_for_tfidf(&analyze(text), &self.stopwords);
        let mut row = self.model.transform(&tokens);
        normalize_row(&mut row);
        row
    }
}

#[derive(Debug, Clone)]
pub enum TrainedModel {
    Svm { pipeline: TfidfPipeline, model: SvmModel },
    Mlp { pipeline: TfidfPipeline, model: MlpModel },
    BiLstm { vocab: Vocabulary, policy: LengthPolicy, model: BiLstmModel },
}

#[derive(Debug, Clone)]
pub struct PredictorHandle {
    pub morbidity: String,
    pub model: Option<TrainedModel>,
}

impl PredictorHandle {
    pub fn untrained(morbidity: impl Into<String>) -> Self {
        PredictorHandle {
            morbidity: morbidity.into(),
            model: None,
        }
    }

    pub fn new(morbidity: impl Into<String>, model: TrainedModel) -> Self {
        PredictorHandle {
            morbidity: morbidity.into(),
            model: Some(model),
        }
    }

    /// Score where `>= 0.5` means positive. The SVM reports the logistic of
    /// its margin so the same threshold applies.
    pub fn score(&self, text: &str, morbidity: &str) -> Result<f64> {
        match self.trained_for(morbidity)? {
            TrainedModel::Svm { pipeline, model } => Ok(sigmoid(model.decision_sparse(&pipeline.row(text)))),
            TrainedModel::Mlp { pipeline, model } => Ok(model.predict_proba(&pipeline.row(text))),
            TrainedModel::BiLstm { vocab, policy, model } => {
                let doc = pad_truncate(&encode(&analyze(text), vocab), policy);
                model.predict_proba(&doc)
            }
        }
    }

    fn trained_for(&self, morbidity: &str) -> Result<&TrainedModel> {
        if morbidity != self.morbidity {
            return Err(Error::InvalidInput(format!(
                "handle trained for {:?}, asked about {morbidity:?}",
                self.morbidity
            )));
        }
        self.model
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("no trained model for {morbidity:?}")))
    }
}

/// `γ(text, morbidity) → {0, 1}`.
pub fn predict(handle: &PredictorHandle, text: &str, morbidity: &str) -> Result<u8> {
    if let TrainedModel::Svm { pipeline, model } = handle.trained_for(morbidity)? {
        return Ok(model.predict_sparse(&pipeline.row(text)));
    }
    Ok((handle.score(text, morbidity)? >= 0.5) as u8)
}
