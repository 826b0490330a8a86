//! Classifiers: TF-IDF + linear SVM, TF-IDF + MLP, and embedding + stacked
//! BiLSTM, plus the shared rmsprop optimizer and model persistence.

pub mod bilstm;
pub mod lstm;
pub mod mlp;
pub mod persist;
pub mod predictor;
pub mod rmsprop;
pub mod svm;

pub use bilstm::{
    bilstm_forward, bilstm_layer_forward, bilstm_loss_and_grad, bilstm_train, bilstm_train_traced,
    BiLstmConfig, BiLstmLayer, BiLstmModel,
};
pub use lstm::{lstm_cell, LstmParams};
pub use mlp::{mlp_loss_and_grad, mlp_train, MlpConfig, MlpModel};
pub use predictor::{predict, PredictorHandle, TrainedModel};
pub use rmsprop::{rmsprop_step, RmspropConfig, RmspropState};
pub use svm::{svm_predict, svm_train, svm_train_traced, SvmConfig, SvmModel};
