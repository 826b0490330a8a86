//! Skip-gram with negative sampling on a repetitive toy corpus, then nearest
//! neighbours by cosine similarity.

use morbench::embeddings::{cosine, train_skipgram_traced, SkipgramConfig};
use morbench::preprocess::{analyze, build_vocabulary};

fn main() -> morbench::Result<()> {
    let sentences = [
        "insulin controls blood sugar in diabetes",
        "metformin lowers blood sugar in diabetes",
        "inhaler relieves wheeze in asthma",
        "albuterol relieves wheeze in asthma",
    ];
    let docs: Vec<Vec<String>> = sentences.iter().cycle().take(200).map(|s| analyze(s)).collect();
    let vocab = build_vocabulary(&docs);
    let cfg = SkipgramConfig { dim: 16, window: 2, epochs: 20, ..Default::default() };
    let (table, trace) = train_skipgram_traced(&docs, &vocab, &cfg)?;
    println!(
        "mean pair loss: epoch 1 {:.3}, epoch {} {:.3}",
        trace.epoch_losses[0],
        trace.epoch_losses.len(),
        trace.epoch_losses.last().unwrap()
    );

    for probe in ["insulin", "inhaler"] {
        let p = vocab.get(probe).unwrap();
        let mut scored: Vec<(f64, &str)> = vocab
            .words()
            .iter()
            .filter(|w| *w != probe)
            .map(|w| (cosine(table.row(p), table.row(vocab.get(w).unwrap())), w.as_str()))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let top: Vec<String> = scored.iter().take(3).map(|(s, w)| format!("{w} {s:.2}")).collect();
        println!("{probe}: {}", top.join(", "));
    }

    // Same text format that the pretrained loader reads.
    let mut out = Vec::new();
    table.write_text(&vocab, &mut out).unwrap();
    println!("{} bytes of vectors", out.len());
    Ok(())
}
