//! Generate a small synthetic corpus and print it as JSON-Lines.
//!
//!     cargo run --example synth_corpus -- 7

use morbench::corpus::{generate_synthetic_corpus, write_corpus, SyntheticSpec};

fn main() -> morbench::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let spec = SyntheticSpec::uniform(&["Asthma", "Gout"], 3, 3, true);
    let notes = generate_synthetic_corpus(&spec, seed)?;
    write_corpus(&notes, std::io::stdout().lock()).expect("stdout");
    Ok(())
}
