//! Clinical notes, per-morbidity binary datasets and synthetic corpora.
//!
//! A corpus file is JSON-Lines, one note per line:
//!
//! ```text
//! {"id": "n1", "text": "...", "labels": {"Asthma": {"textual": "Y", "intuitive": "N"}}}
//! ```
//!
//! Both label kinds are optional. A note enters the binary dataset of a
//! morbidity when its textual label is `Y`/`N`; otherwise its intuitive label
//! is consulted. `Q` and `U` never produce a record.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The sixteen morbidity classes, in reporting order.
pub const MORBIDITIES: [&str; 16] = [
    "Asthma",
    "CAD",
    "CHF",
    "Depression",
    "Diabetes",
    "Gallstones",
    "GERD",
    "Gout",
    "Hypercholesterolemia",
    "Hypertension",
    "Hypertriglyceridemia",
    "OA",
    "Obesity",
    "OSA",
    "PVD",
    "Venous Insufficiency",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Y,
    N,
    U,
    Q,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Y, Label::N, Label::U, Label::Q];

    /// `Y` → 1, `N` → 0, anything else has no binary value.
    pub fn binary(self) -> Option<u8> {
        match self {
            Label::Y => Some(1),
            Label::N => Some(0),
            Label::U | Label::Q => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Y => "Y",
            Label::N => "N",
            Label::U => "U",
            Label::Q => "Q",
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "Y" => Ok(Label::Y),
            "N" => Ok(Label::N),
            "U" => Ok(Label::U),
            "Q" => Ok(Label::Q),
            other => Err(format!("unknown label symbol {other:?}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPair {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub textual: Option<Label>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intuitive: Option<Label>,
}

impl LabelPair {
    pub fn new(textual: Option<Label>, intuitive: Option<Label>) -> Self {
        LabelPair { textual, intuitive }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalNote {
    pub id: String,
    pub text: String,
    pub labels: BTreeMap<String, LabelPair>,
}

impl ClinicalNote {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        ClinicalNote {
            id: id.into(),
            text: text.into(),
            labels: BTreeMap::new(),
        }
    }

    pub fn with_label(
        mut self,
        morbidity: &str,
        textual: Option<Label>,
        intuitive: Option<Label>,
    ) -> Self {
        self.labels
            .insert(morbidity.to_string(), LabelPair::new(textual, intuitive));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Textual,
    Intuitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub note_id: String,
    pub text: String,
    pub label: u8,
    pub source: LabelSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorbidityDataset {
    pub morbidity: String,
    pub records: Vec<DatasetRecord>,
}

impl MorbidityDataset {
    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn positives(&self) -> usize {
        self.records.iter().filter(|r| r.label == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.records.len() - self.positives()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub morbidity: String,
    pub total: usize,
    pub positive: usize,
    pub negative: usize,
    /// Notes that carry a label entry for the morbidity but no `Y`/`N`.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub rows: Vec<SummaryRow>,
}

impl CorpusSummary {
    pub fn get(&self, morbidity: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.morbidity == morbidity)
    }

    /// Tab-separated table with the columns of the dataset overview.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("morbidity\tclinical_notes\tpositive\tnegative\texcluded\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.morbidity, r.total, r.positive, r.negative, r.excluded
            ));
        }
        out
    }
}

#[derive(Deserialize)]
struct RawLabelPair {
    textual: Option<String>,
    intuitive: Option<String>,
}

#[derive(Deserialize)]
struct RawNote {
    id: String,
    #[serde(default)]
    text: String,
    #[serde(default)]
    labels: BTreeMap<String, RawLabelPair>,
}

fn parse_label(raw: Option<String>, morbidity: &str, kind: &str, line: usize) -> Result<Option<Label>> {
    match raw {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|e: String| {
            Error::Validation(format!(
                "line {line}: morbidity {morbidity:?} {kind} label: {e}"
            ))
        }),
    }
}

/// Parses JSON-Lines notes from a reader. Blank lines are skipped.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Vec<ClinicalNote>> {
    let mut notes = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawNote = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if raw.id.is_empty() {
            return Err(Error::Validation(format!("line {line_no}: empty note id")));
        }
        if let Some(&first_line) = seen.get(&raw.id) {
            return Err(Error::DuplicateId {
                id: raw.id,
                first_line,
                second_line: line_no,
            });
        }
        seen.insert(raw.id.clone(), line_no);
        let mut labels = BTreeMap::new();
        for (morbidity, pair) in raw.labels {
            let textual = parse_label(pair.textual, &morbidity, "textual", line_no)?;
            let intuitive = parse_label(pair.intuitive, &morbidity, "intuitive", line_no)?;
            labels.insert(morbidity, LabelPair { textual, intuitive });
        }
        notes.push(ClinicalNote {
            id: raw.id,
            text: raw.text,
            labels,
        });
    }
    Ok(notes)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<ClinicalNote>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file))
}

/// Serializes notes as JSON-Lines.
pub fn write_corpus<W: Write>(notes: &[ClinicalNote], mut writer: W) -> std::io::Result<()> {
    for note in notes {
        serde_json::to_writer(&mut writer, note)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_corpus(notes: &[ClinicalNote], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_corpus(notes, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Decides the binary label of one note for one morbidity.
///
/// The textual label takes precedence whenever it is `Y` or `N`.
pub fn binary_label(pair: &LabelPair) -> Option<(u8, LabelSource)> {
    if let Some(l) = pair.textual.and_then(Label::binary) {
        return Some((l, LabelSource::Textual));
    }
    pair.intuitive
        .and_then(Label::binary)
        .map(|l| (l, LabelSource::Intuitive))
}

pub fn build_binary_dataset(notes: &[ClinicalNote], morbidity: &str) -> MorbidityDataset {
    // First pass: textual Y/N (the set N), second pass: intuitive Y/N for the rest.
    let mut picked: Vec<Option<(u8, LabelSource)>> = notes
        .iter()
        .map(|n| {
            n.labels
                .get(morbidity)
                .and_then(|p| p.textual.and_then(Label::binary))
                .map(|l| (l, LabelSource::Textual))
        })
        .collect();
    for (slot, note) in picked.iter_mut().zip(notes) {
        if slot.is_none() {
            *slot = note
                .labels
                .get(morbidity)
                .and_then(|p| p.intuitive.and_then(Label::binary))
                .map(|l| (l, LabelSource::Intuitive));
        }
    }
    let records = notes
        .iter()
        .zip(picked)
        .filter_map(|(note, pick)| {
            pick.map(|(label, source)| DatasetRecord {
                note_id: note.id.clone(),
                text: note.text.clone(),
                label,
                source,
            })
        })
        .collect();
    MorbidityDataset {
        morbidity: morbidity.to_string(),
        records,
    }
}

/// Concatenates partitions (for example the original train and test sets).
pub fn merge_partitions(partitions: Vec<Vec<ClinicalNote>>) -> Result<Vec<ClinicalNote>> {
    let mut seen: HashMap<String, (usize, usize)> = HashMap::new();
    let mut merged = Vec::new();
    for (p, part) in partitions.into_iter().enumerate() {
        for (i, note) in part.into_iter().enumerate() {
            if let Some(&(fp, fi)) = seen.get(&note.id) {
                return Err(Error::Validation(format!(
                    "duplicate note id {:?}: partition {fp} position {fi} and partition {p} position {i}",
                    note.id
                )));
            }
            seen.insert(note.id.clone(), (p, i));
            merged.push(note);
        }
    }
    Ok(merged)
}

pub fn summarize<S: AsRef<str>>(notes: &[ClinicalNote], morbidities: &[S]) -> CorpusSummary {
    let rows = morbidities
        .iter()
        .map(|m| {
            let m = m.as_ref();
            let ds = build_binary_dataset(notes, m);
            let labelled = notes.iter().filter(|n| n.labels.contains_key(m)).count();
            let positive = ds.positives();
            SummaryRow {
                morbidity: m.to_string(),
                total: ds.records.len(),
                positive,
                negative: ds.records.len() - positive,
                excluded: labelled - ds.records.len(),
            }
        })
        .collect();
    CorpusSummary { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMorbidity {
    pub name: String,
    pub positives: usize,
    pub negatives: usize,
    /// Every positive note carries a marker token that no negative note contains.
    #[serde(default)]
    pub marker: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub morbidities: Vec<SyntheticMorbidity>,
    pub noise_vocab_size: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Share of notes whose label is carried by the intuitive annotation
    /// (textual set to `U`).
    pub intuitive_fraction: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            morbidities: Vec::new(),
            noise_vocab_size: 10,
            min_tokens: 12,
            max_tokens: 24,
            intuitive_fraction: 0.2,
        }
    }
}

impl SyntheticSpec {
    /// Same counts and marker flag for each named morbidity.
    pub fn uniform<S: AsRef<str>>(names: &[S], positives: usize, negatives: usize, marker: bool) -> Self {
        SyntheticSpec {
            morbidities: names
                .iter()
                .map(|n| SyntheticMorbidity {
                    name: n.as_ref().to_string(),
                    positives,
                    negatives,
                    marker,
                })
                .collect(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_tokens > self.max_tokens {
            return Err(Error::Config(format!(
                "min_tokens {} exceeds max_tokens {}",
                self.min_tokens, self.max_tokens
            )));
        }
        if !(0.0..=1.0).contains(&self.intuitive_fraction) {
            return Err(Error::Config("intuitive_fraction must lie in [0, 1]".into()));
        }
        let needs_noise = self
            .morbidities
            .iter()
            .any(|m| m.positives + m.negatives > 0);
        if needs_noise && self.noise_vocab_size == 0 && self.max_tokens > 0 {
            return Err(Error::Config("noise_vocab_size must be positive".into()));
        }
        for m in &self.morbidities {
            if m.name.is_empty() {
                return Err(Error::Config("morbidity name must be non-empty".into()));
            }
        }
        Ok(())
    }
}

/// Marker token used for the morbidity at position `index` of a synthetic spec.
pub fn marker_token(index: usize) -> String {
    format!("marker{index:02}")
}

const FILLER: [&str; 6] = ["the", "patient", "with", "and", "was", "of"];

/// Generates a labelled corpus; identical `(spec, seed)` give identical notes.
///
/// Each morbidity gets its own block of notes labelled only for that
/// morbidity. Bodies are drawn from a noise vocabulary `w0..w{n-1}` mixed with
/// a few stopwords and numbers.
pub fn generate_synthetic_corpus(spec: &SyntheticSpec, seed: u64) -> Result<Vec<ClinicalNote>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();
    for (m_idx, m) in spec.morbidities.iter().enumerate() {
        let mut labels: Vec<Label> = std::iter::repeat_n(Label::Y, m.positives)
            .chain(std::iter::repeat_n(Label::N, m.negatives))
            .collect();
        labels.shuffle(&mut rng);
        let marker = marker_token(m_idx);
        for (j, label) in labels.into_iter().enumerate() {
            let len = rng.gen_range(spec.min_tokens..=spec.max_tokens);
            let mut tokens: Vec<String> = (0..len)
                .map(|_| {
                    let roll: f64 = rng.gen();
                    if roll < 0.15 {
                        FILLER[rng.gen_range(0..FILLER.len())].to_string()
                    } else if roll < 0.2 {
                        rng.gen_range(1..300u32).to_string()
                    } else {
                        format!("w{}", rng.gen_range(0..spec.noise_vocab_size))
                    }
                })
                .collect();
            if m.marker && label == Label::Y {
                let pos = rng.gen_range(0..=tokens.len());
                tokens.insert(pos, marker.clone());
            }
            let mut text = tokens.join(" ");
            if let Some(first) = text.get(0..1) {
                text = first.to_uppercase() + &text[1..];
            }
            if !text.is_empty() {
                text.push('.');
            }
            let pair = if rng.gen::<f64>() < spec.intuitive_fraction {
                LabelPair::new(Some(Label::U), Some(label))
            } else {
                LabelPair::new(Some(label), None)
            };
            let mut note = ClinicalNote::new(format!("synth-{m_idx:02}-{j:05}"), text);
            note.labels.insert(m.name.clone(), pair);
            notes.push(note);
        }
    }
    Ok(notes)
}
