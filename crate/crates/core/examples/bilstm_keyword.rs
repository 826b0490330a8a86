//! A stacked BiLSTM learning to detect one keyword anywhere in a sequence.

use morbench::embeddings::EmbeddingTable;
use morbench::eval::f1_score;
use morbench::models::{bilstm_train_traced, BiLstmConfig};
use morbench::preprocess::{pad_truncate, LengthPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> morbench::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (vocab, len, keyword) = (30usize, 12usize, 30u32);
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..200 {
        let y = (i % 2) as u8;
        let mut idx: Vec<u32> = (0..len).map(|_| rng.gen_range(1..keyword)).collect();
        if y == 1 {
            idx[rng.gen_range(0..len)] = keyword;
        }
        docs.push(pad_truncate(&idx, &LengthPolicy::fixed(len)));
        labels.push(y);
    }

    let table = EmbeddingTable::random(vocab, 16, 0.05, &mut rng);
    let cfg = BiLstmConfig {
        hidden: 16,
        embedding_dim: 16,
        trainable_embeddings: Some(true),
        ..Default::default()
    };
    let (model, trace) = bilstm_train_traced(&docs, &labels, table, &cfg, 4)?;
    for (e, l) in trace.epoch_losses.iter().enumerate().step_by(4) {
        println!("epoch {:>2}  loss {l:.4}", e + 1);
    }
    let preds: Vec<u8> = docs
        .iter()
        .map(|d| model.predict_proba(d).map(|p| (p >= 0.5) as u8))
        .collect::<morbench::Result<_>>()?;
    println!("training F1 {:.3}", f1_score(&labels, &preds)?);
    Ok(())
}
