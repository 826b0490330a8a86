pub mod config;
pub mod experiment;
pub mod kfold;
pub mod metrics;
pub mod report;

pub use config::{ExperimentConfig, FitScope, F1Mode, Representation};
pub use experiment::{run_experiment, CellOutcome, CellResult, ExperimentReport, FoldRecord};
pub use kfold::{stratified_kfold, FoldSplit};
pub use metrics::{confusion, f1_score, weighted_f1, Confusion};
pub use report::{render_report, ReportFormat};
