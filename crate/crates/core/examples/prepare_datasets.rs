//! Label selection: textual annotations win, intuitive ones fill the gaps,
//! everything else is excluded.

use morbench::corpus::{build_binary_dataset, summarize, ClinicalNote, Label, MORBIDITIES};

fn main() {
    let notes = vec![
        ClinicalNote::new("n1", "Long standing asthma, on inhaler.").with_label("Asthma", Some(Label::Y), None),
        ClinicalNote::new("n2", "No wheeze. Lungs clear.").with_label("Asthma", Some(Label::U), Some(Label::N)),
        ClinicalNote::new("n3", "Questionable reactive airway.").with_label("Asthma", Some(Label::Q), Some(Label::Q)),
        ClinicalNote::new("n4", "Denies asthma; gout flare in toe.")
            .with_label("Asthma", Some(Label::N), Some(Label::Y))
            .with_label("Gout", Some(Label::Y), None),
    ];

    let asthma = build_binary_dataset(&notes, "Asthma");
    for r in &asthma.records {
        println!("{}\tlabel={}\tsource={:?}", r.note_id, r.label, r.source);
    }
    println!();
    print!("{}", summarize(&notes, &MORBIDITIES).to_tsv());
}
