use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    /// Positive-class F1; zero whenever precision or recall is undefined.
    pub fn f1(&self) -> f64 {
        f1_from_counts(self.tp, self.fp, self.fn_)
    }

    /// Support-weighted F1 over both classes.
    pub fn weighted_f1(&self) -> f64 {
        let pos = self.tp + self.fn_;
        let neg = self.tn + self.fp;
        let total = pos + neg;
        if total == 0 {
            return 0.0;
        }
        let f1_pos = f1_from_counts(self.tp, self.fp, self.fn_);
        let f1_neg = f1_from_counts(self.tn, self.fn_, self.fp);
        (f1_pos * pos as f64 + f1_neg * neg as f64) / total as f64
    }
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp + fp == 0 || tp + fn_ == 0 {
        return 0.0;
    }
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fn_) as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn confusion(truth: &[u8], predicted: &[u8]) -> Result<Confusion> {
    if truth.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "{} true labels vs {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut c = Confusion::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t == 1, p == 1) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `2PR / (P + R)` on the positive class.
pub fn f1_score(truth: &[u8], predicted: &[u8]) -> Result<f64> {
    confusion(truth, predicted).map(|c| c.f1())
}

pub fn weighted_f1(truth: &[u8], predicted: &[u8]) -> Result<f64> {
    confusion(truth, predicted).map(|c| c.weighted_f1())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_examples() {
        assert_eq!(f1_score(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
        // TP=2, FP=1, FN=1
        let f = f1_score(&[1, 1, 1, 0, 0], &[1, 1, 0, 1, 0]).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1_score(&[0, 0], &[0, 0]).unwrap(), 0.0);
        assert!(f1_score(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn weighted_f1_balanced_perfect() {
        assert_eq!(weighted_f1(&[1, 0, 1, 0], &[1, 0, 1, 0]).unwrap(), 1.0);
        let w = weighted_f1(&[1, 1, 0, 0], &[1, 0, 0, 0]).unwrap();
        // positive F1 = 2/3 (support 2), negative F1 = 0.8 (support 2)
        assert!((w - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-15);
    }
}
