//! Stratified train/test splitting at UE granularity: all rows of one UE
//! land entirely in one side, preventing window leakage across the split.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Split UEs (given as `ue_id -> class label`) into train/test id lists,
/// stratified per class. Errors if any class would end up with an empty
/// side.
pub fn stratified_split_by_ue(
    ue_labels: &BTreeMap<u32, usize>,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<u32>, Vec<u32>)> {
    if !(0.0..1.0).contains(&test_fraction) || test_fraction <= 0.0 {
        return Err(Error::config("test_fraction must lie strictly between 0 and 1"));
    }
    let mut per_class: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (&ue, &label) in ue_labels {
        per_class.entry(label).or_default().push(ue);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut ues) in per_class {
        // Deterministic shuffle (BTreeMap iteration gives sorted input).
        for i in (1..ues.len()).rev() {
            let j = rng.gen_range(0..=i);
            ues.swap(i, j);
        }
        let n_test = ((ues.len() as f64) * test_fraction).round() as usize;
        let n_test = n_test.clamp(1, ues.len().saturating_sub(1).max(1));
        if ues.len() < 2 {
            return Err(Error::Data(format!(
                "class {label} has only {} UE(s); population too small for a split",
                ues.len()
            )));
        }
        test.extend(ues.iter().take(n_test));
        train.extend(ues.iter().skip(n_test));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n_per_class: &[usize]) -> BTreeMap<u32, usize> {
        let mut map = BTreeMap::new();
        let mut id = 0u32;
        for (class, &n) in n_per_class.iter().enumerate() {
            for _ in 0..n {
                map.insert(id, class);
                id += 1;
            }
        }
        map
    }

    #[test]
    fn split_is_disjoint_and_covers() {
        let lab = labels(&[10, 20, 6]);
        let (train, test) = stratified_split_by_ue(&lab, 0.3, 5).unwrap();
        assert_eq!(train.len() + test.len(), 36);
        for ue in &test {
            assert!(!train.contains(ue));
        }
    }

    #[test]
    fn split_is_stratified() {
        let lab = labels(&[10, 20]);
        let (_, test) = stratified_split_by_ue(&lab, 0.3, 5).unwrap();
        let class0 = test.iter().filter(|&&u| u < 10).count();
        let class1 = test.len() - class0;
        assert_eq!(class0, 3);
        assert_eq!(class1, 6);
    }

    #[test]
    fn deterministic_per_seed() {
        let lab = labels(&[9, 9]);
        let a = stratified_split_by_ue(&lab, 0.3, 1).unwrap();
        let b = stratified_split_by_ue(&lab, 0.3, 1).unwrap();
        assert_eq!(a, b);
        let c = stratified_split_by_ue(&lab, 0.3, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tiny_class_rejected() {
        let lab = labels(&[1, 10]);
        assert!(stratified_split_by_ue(&lab, 0.3, 1).is_err());
    }
}
