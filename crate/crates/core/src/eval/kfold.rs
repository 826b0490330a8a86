//! Stratified k-fold assignment.
//!
//! Records of each class are shuffled, then dealt round-robin over the folds.
//! The dealing position carries over from one class to the next, so per-class
//! counts differ by at most one between folds and so do fold sizes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub k: usize,
    /// Fold of each record, in `[0, k)`.
    pub assignment: Vec<usize>,
}

impl FoldSplit {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }
}

pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    if k > labels.len() {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds the {} available records",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut next = 0usize;
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldSplit { k, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_positives_ninety_negatives() {
        let labels: Vec<u8> = (0..100).map(|i| (i < 10) as u8).collect();
        let split = stratified_kfold(&labels, 10, 3).unwrap();
        for f in 0..10 {
            let test = split.test_indices(f);
            let pos = test.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!((pos, test.len() - pos), (1, 9));
        }
    }

    #[test]
    fn single_class_even_sizes() {
        let split = stratified_kfold(&[1, 1, 1, 1], 2, 0).unwrap();
        assert_eq!(split.test_indices(0).len(), 2);
        assert_eq!(split.test_indices(1).len(), 2);
    }

    #[test]
    fn too_many_folds() {
        assert!(stratified_kfold(&[0, 1, 0], 4, 0).is_err());
        assert!(stratified_kfold(&[0, 1, 0], 1, 0).is_err());
    }
}
