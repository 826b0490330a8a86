//! Text normalization, tokenization, integer encoding and length policy.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled English stopword list (179 words).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

pub fn normalize_text(text: &str) -> String {
    text.to_lowercase()
}

/// Maximal runs of alphanumeric characters; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Normalize then tokenize.
pub fn analyze(text: &str) -> Vec<String> {
    tokenize(&normalize_text(text))
}

/// Word to index map. Index 0 is reserved for padding, words use `1..=len()`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    words: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds from words already in index order (first word gets index 1).
    pub fn from_ordered_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32 + 1).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vocabulary word {w:?}")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    /// Number of words `V` (the padding index is not counted).
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: u32) -> Option<&str> {
        if index == 0 {
            return None;
        }
        self.words.get(index as usize - 1).map(String::as_str)
    }

    /// Words in index order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Restores the lookup map after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32 + 1))
            .collect();
    }

    pub fn decode(&self, indices: &[u32]) -> Vec<String> {
        indices
            .iter()
            .filter_map(|&i| self.word(i).map(str::to_string))
            .collect()
    }
}

/// Indices ordered by descending corpus frequency, ties broken lexicographically.
pub fn build_vocabulary<S: AsRef<str>>(docs: &[Vec<S>]) -> Vocabulary {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        for tok in doc {
            *freq.entry(tok.as_ref()).or_default() += 1;
        }
    }
    let mut entries: Vec<(&str, usize)> = freq.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let words = entries.into_iter().map(|(w, _)| w.to_string()).collect();
    Vocabulary::from_ordered_words(words).expect("frequency table keys are unique")
}

/// Replaces known tokens by their index and drops the rest.
pub fn encode<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Vec<u32> {
    tokens.iter().filter_map(|t| vocab.get(t.as_ref())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthPolicy {
    pub max_len: usize,
    pub mean: f64,
    pub std: f64,
}

impl LengthPolicy {
    pub fn fixed(max_len: usize) -> Self {
        LengthPolicy {
            max_len,
            mean: max_len as f64,
            std: 0.0,
        }
    }
}

/// `max_len = floor(mean + population std)` of the per-document token counts.
///
/// A corpus of empty documents still gets `max_len = 1`.
pub fn compute_max_len(counts: &[usize]) -> Result<LengthPolicy> {
    if counts.is_empty() {
        return Err(Error::InvalidInput(
            "cannot derive a length policy from zero documents".into(),
        ));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    let max_len = ((mean + std).floor() as usize).max(1);
    Ok(LengthPolicy { max_len, mean, std })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedDoc {
    pub indices: Vec<u32>,
    pub original_length: usize,
}

/// Keeps the first `max_len` indices and right-pads with 0.
pub fn pad_truncate(indices: &[u32], policy: &LengthPolicy) -> EncodedDoc {
    let max_len = policy.max_len.max(1);
    let mut out: Vec<u32> = indices.iter().copied().take(max_len).collect();
    out.resize(max_len, 0);
    EncodedDoc {
        indices: out,
        original_length: indices.len(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(content: &str) -> Self {
        Stopwords(
            content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&content))
    }

    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        Stopwords(words.iter().map(|w| w.as_ref().to_string()).collect())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_numeric_token(tok: &str) -> bool {
    !tok.is_empty() && tok.chars().all(char::is_numeric)
}

/// Drops stopwords and purely numeric tokens.
pub fn filter_for_tfidf<S: AsRef<str>>(tokens: &[S], stopwords: &Stopwords) -> Vec<String> {
    tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| !stopwords.contains(t) && !is_numeric_token(t))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_text("Obesity and obesity"), "obesity and obesity");
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("BP 140/90"), "bp 140/90");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("the patient has the diabetes"),
            ["the", "patient", "has", "the", "diabetes"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("bp 140/90, stable."), ["bp", "140", "90", "stable"]);
    }

    #[test]
    fn vocabulary_ordering() {
        let v = build_vocabulary(&[vec!["a", "b", "a"]]);
        assert_eq!((v.get("a"), v.get("b")), (Some(1), Some(2)));
        let v = build_vocabulary::<&str>(&[]);
        assert_eq!(v.len(), 0);
        let v = build_vocabulary(&[vec!["b"], vec!["a"]]);
        assert_eq!((v.get("a"), v.get("b")), (Some(1), Some(2)));
    }

    #[test]
    fn encode_examples() {
        let vocab = Vocabulary::from_ordered_words(
            (1..=87)
                .map(|i| match i {
                    5 => "the".to_string(),
                    34 => "patient".to_string(),
                    10 => "has".to_string(),
                    87 => "diabetes".to_string(),
                    _ => format!("filler{i}"),
                })
                .collect(),
        )
        .unwrap();
        let tokens = tokenize("the patient has the diabetes");
        assert_eq!(encode(&tokens, &vocab), vec![5, 34, 10, 5, 87]);
        assert!(encode::<&str>(&[], &vocab).is_empty());
        assert!(encode(&["zzz"], &vocab).is_empty());
    }

    #[test]
    fn max_len_examples() {
        let p = compute_max_len(&[25, 39, 44, 80]).unwrap();
        assert_eq!(p.max_len, 67);
        assert_eq!(format!("{:.2}", p.mean), "47.00");
        assert_eq!(format!("{:.2}", p.std), "20.29");
        assert_eq!(compute_max_len(&[10, 10, 10]).unwrap().max_len, 10);
        let p = compute_max_len(&[3, 5]).unwrap();
        assert_eq!((p.mean, p.std, p.max_len), (4.0, 1.0, 5));
        assert!(compute_max_len(&[]).is_err());
    }

    #[test]
    fn pad_truncate_examples() {
        let p = |n| LengthPolicy::fixed(n);
        assert_eq!(pad_truncate(&[5, 34, 10], &p(5)).indices, vec![5, 34, 10, 0, 0]);
        assert_eq!(pad_truncate(&[1, 2, 3, 4, 5, 6], &p(4)).indices, vec![1, 2, 3, 4]);
        assert_eq!(pad_truncate(&[1, 2, 3, 4, 5, 6], &p(4)).original_length, 6);
        assert_eq!(pad_truncate(&[], &p(3)).indices, vec![0, 0, 0]);
    }

    #[test]
    fn filter_examples() {
        let sw = Stopwords::from_words(&["the", "has"]);
        assert_eq!(
            filter_for_tfidf(&["the", "patient", "has", "diabetes"], &sw),
            ["patient", "diabetes"]
        );
        assert!(filter_for_tfidf(&["140", "90"], &sw).is_empty());
        assert!(filter_for_tfidf::<&str>(&[], &sw).is_empty());
    }

    #[test]
    fn bundled_stopwords() {
        let sw = Stopwords::english();
        assert_eq!(sw.len(), 179);
        assert!(sw.contains("the") && sw.contains("wouldn't"));
    }

    proptest! {
        #[test]
        fn encode_is_deterministic_and_decodes(text in "[a-zA-Z0-9 ,./-]{0,80}") {
            let tokens = analyze(&text);
            let vocab = build_vocabulary(std::slice::from_ref(&tokens));
            let a = encode(&tokens, &vocab);
            prop_assert_eq!(&a, &encode(&analyze(&text), &vocab));
            prop_assert_eq!(vocab.decode(&a), tokens);
        }

        #[test]
        fn decode_returns_in_vocab_subsequence(
            known in proptest::collection::vec("[a-e]{1,2}", 0..20),
            probe in proptest::collection::vec("[a-h]{1,2}", 0..20),
        ) {
            let vocab = build_vocabulary(std::slice::from_ref(&known));
            let expected: Vec<String> = probe.iter().filter(|t| known.contains(t)).cloned().collect();
            prop_assert_eq!(vocab.decode(&encode(&probe, &vocab)), expected);
        }

        #[test]
        fn pad_truncate_length(indices in proptest::collection::vec(1u32..50, 0..40), max_len in 1usize..30) {
            let doc = pad_truncate(&indices, &LengthPolicy::fixed(max_len));
            prop_assert_eq!(doc.indices.len(), max_len);
            prop_assert_eq!(doc.original_length, indices.len());
            for (i, &v) in doc.indices.iter().enumerate() {
                if i >= indices.len() { prop_assert_eq!(v, 0); } else { prop_assert_eq!(v, indices[i]); }
            }
        }

        #[test]
        fn max_len_translation(counts in proptest::collection::vec(1usize..500, 1..30), k in 0usize..200) {
            let base = compute_max_len(&counts).unwrap().max_len;
            let shifted: Vec<usize> = counts.iter().map(|c| c + k).collect();
            prop_assert_eq!(compute_max_len(&shifted).unwrap().max_len, base + k);
        }

        #[test]
        fn filter_idempotent(tokens in proptest::collection::vec("[a-z0-9]{1,4}", 0..30)) {
            let sw = Stopwords::english();
            let once = filter_for_tfidf(&tokens, &sw);
            prop_assert_eq!(filter_for_tfidf(&once, &sw), once.clone());
        }
    }
}
