//! Cross-validated comparison on a synthetic marker corpus, rendered as the
//! markdown table the CLI writes to report.md.

use morbench::corpus::{generate_synthetic_corpus, SyntheticSpec};
use morbench::eval::{render_report, run_experiment, ExperimentConfig, ReportFormat, Representation};

fn main() -> morbench::Result<()> {
    let names = ["Asthma", "CAD", "Gout", "Obesity"];
    let spec = SyntheticSpec::uniform(&names, 30, 30, true);
    let notes = generate_synthetic_corpus(&spec, 11)?;

    let mut cfg = ExperimentConfig {
        k: 5,
        jobs: 2,
        representations: vec![
            Representation::TfidfSvm,
            Representation::TfidfMlp,
            Representation::BilstmDomainW2v,
            Representation::BilstmRandom,
        ],
        ..Default::default()
    };
    // Small neural sizes so the example finishes in seconds.
    cfg.bilstm.hidden = 8;
    cfg.bilstm.embedding_dim = 16;
    cfg.skipgram.dim = 16;
    cfg.skipgram.epochs = 3;

    let report = run_experiment(&notes, &names, &cfg, cfg.seed)?;
    print!("{}", render_report(&report, ReportFormat::Markdown));
    Ok(())
}
