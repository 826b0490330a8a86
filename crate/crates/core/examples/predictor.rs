//! Train once, wrap the model with its preprocessing, classify raw text, and
//! round-trip the weights through the binary model format.

use morbench::models::persist::SavedModel;
use morbench::models::predictor::TfidfPipeline;
use morbench::models::{predict, svm_train, PredictorHandle, SvmConfig, TrainedModel};
use morbench::preprocess::{analyze, filter_for_tfidf, Stopwords};
use morbench::tfidf::TfidfModel;

fn main() -> morbench::Result<()> {
    let train = [
        ("Obese patient, BMI 41, counselled on diet.", 1),
        ("Morbid obesity noted, weight 150 kg.", 1),
        ("BMI 38, obesity class two.", 1),
        ("Thin elderly woman, BMI 19.", 0),
        ("Normal weight, BMI 23, no complaints.", 0),
        ("Fractured wrist, otherwise healthy.", 0),
    ];
    let stopwords = Stopwords::english();
    let docs: Vec<Vec<String>> = train.iter().map(|(t, _)| filter_for_tfidf(&analyze(t), &stopwords)).collect();
    let labels: Vec<u8> = train.iter().map(|&(_, y)| y).collect();
    let (tfidf, matrix) = TfidfModel::fit_transform(&docs)?;
    let svm = svm_train(&matrix.rows, tfidf.n_features(), &labels, &SvmConfig { lambda: 0.05, epochs: 200 }, 3)?;

    let bytes = SavedModel::Svm(svm.clone()).to_bytes();
    println!("saved svm: {} bytes", bytes.len());
    assert_eq!(SavedModel::from_bytes(&bytes)?, SavedModel::Svm(svm.clone()));

    let handle = PredictorHandle::new(
        "Obesity",
        TrainedModel::Svm { pipeline: TfidfPipeline { stopwords, model: tfidf }, model: svm },
    );
    for text in ["Severe obesity, BMI 45.", "Fractured ankle, otherwise healthy."] {
        println!("{text:<36} -> {}", predict(&handle, text, "Obesity")?);
    }
    match predict(&handle, "anything", "Gout") {
        Err(e) => println!("wrong morbidity: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
