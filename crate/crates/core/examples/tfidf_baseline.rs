//! TF-IDF rows fed to the linear SVM and the MLP on a toy task.

use morbench::models::{mlp_train, svm_train, MlpConfig, SvmConfig};
use morbench::preprocess::{analyze, filter_for_tfidf, Stopwords};
use morbench::tfidf::TfidfModel;

fn main() -> morbench::Result<()> {
    let texts = [
        ("Patient with chronic gout, elevated uric acid.", 1),
        ("Gout flare of the left toe treated with colchicine.", 1),
        ("Uric acid high, history of gout.", 1),
        ("Routine visit, blood pressure 120/80.", 0),
        ("Knee sprain after a fall, no fracture.", 0),
        ("Seasonal allergies, prescribed antihistamine.", 0),
    ];
    let stop = Stopwords::english();
    let docs: Vec<Vec<String>> = texts.iter().map(|(t, _)| filter_for_tfidf(&analyze(t), &stop)).collect();
    let labels: Vec<u8> = texts.iter().map(|&(_, y)| y).collect();

    let (model, matrix) = TfidfModel::fit_transform(&docs)?;
    println!("{} documents x {} terms", matrix.n_rows(), model.n_features());
    for w in ["gout", "uric", "knee"] {
        println!("idf({w}) = {:.4}", model.idf(w).unwrap_or(f64::NAN));
    }

    // The default λ suits hundreds of notes; six need far more regularization.
    let svm_cfg = SvmConfig { lambda: 0.05, epochs: 200 };
    let svm = svm_train(&matrix.rows, model.n_features(), &labels, &svm_cfg, 1)?;
    let mlp_cfg = MlpConfig { hidden: 16, epochs: 300, ..Default::default() };
    let mlp = mlp_train(&matrix.rows, model.n_features(), &labels, &mlp_cfg, 1)?;

    let query = filter_for_tfidf(&analyze("Acute gout attack"), &stop);
    let mut row = model.transform(&query);
    morbench::tfidf::normalize_row(&mut row);
    println!("svm decision {:+.3}", svm.decision_sparse(&row));
    println!("mlp probability {:.3}", mlp.predict_proba(&row));
    Ok(())
}
