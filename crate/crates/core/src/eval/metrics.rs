//! Retrieval metrics over ranked label lists.
//!
//! `truth` is treated as a set; repeated truth labels count once.

use std::collections::HashSet;

use crate::error::{Error, Result};

fn truth_set<T: AsRef<str>>(truth: &[T]) -> HashSet<&str> {
    truth.iter().map(AsRef::as_ref).collect()
}

fn prefix<S>(ranked: &[S], k: usize) -> &[S] {
    &ranked[..k.min(ranked.len())]
}

/// 1 if any truth label is in the first `k` ranked labels, else 0.
pub fn pass_at_k<S: AsRef<str>, T: AsRef<str>>(ranked: &[S], truth: &[T], k: usize) -> u8 {
    let truth = truth_set(truth);
    u8::from(prefix(ranked, k).iter().any(|l| truth.contains(l.as_ref())))
}

/// Fraction of distinct truth labels present in the first `k` ranked labels.
pub fn recall_at_k<S: AsRef<str>, T: AsRef<str>>(ranked: &[S], truth: &[T], k: usize) -> Result<f64> {
    let truth = truth_set(truth);
    if truth.is_empty() {
        return Err(Error::Precondition("recall is undefined for an empty truth set".into()));
    }
    let hits: HashSet<&str> = prefix(ranked, k)
        .iter()
        .map(AsRef::as_ref)
        .filter(|l| truth.contains(l))
        .collect();
    Ok(hits.len() as f64 / truth.len() as f64)
}

/// `1/r` for the 1-based rank `r` of the first truth label over the whole
/// list, 0 when none is present.
pub fn reciprocal_rank<S: AsRef<str>, T: AsRef<str>>(ranked: &[S], truth: &[T]) -> f64 {
    let truth = truth_set(truth);
    ranked
        .iter()
        .position(|l| truth.contains(l.as_ref()))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Oracles: plain nested loops over indices, no sets.
    fn oracle_pass(ranked: &[String], truth: &[String], k: usize) -> u8 {
        for (i, r) in ranked.iter().enumerate() {
            if i >= k {
                break;
            }
            for t in truth {
                if r == t {
                    return 1;
                }
            }
        }
        0
    }

    fn oracle_recall(ranked: &[String], truth: &[String], k: usize) -> f64 {
        let mut distinct: Vec<&String> = Vec::new();
        for t in truth {
            if !distinct.contains(&t) {
                distinct.push(t);
            }
        }
        let mut found = 0;
        for t in &distinct {
            let mut i = 0;
            while i < ranked.len() && i < k {
                if &&ranked[i] == t {
                    found += 1;
                    break;
                }
                i += 1;
            }
        }
        found as f64 / distinct.len() as f64
    }

    fn oracle_rr(ranked: &[String], truth: &[String]) -> f64 {
        for (i, r) in ranked.iter().enumerate() {
            if truth.iter().any(|t| t == r) {
                return 1.0 / (i as f64 + 1.0);
            }
        }
        0.0
    }

    fn random_case(rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<String>, usize) {
        let universe = rng.random_range(1..20);
        let label = |rng: &mut ChaCha8Rng| format!("f{}", rng.random_range(0..universe));
        let ranked = (0..rng.random_range(0..15)).map(|_| label(rng)).collect();
        let truth = (0..rng.random_range(1..6)).map(|_| label(rng)).collect();
        (ranked, truth, rng.random_range(1..20))
    }

    #[test]
    fn spec_examples() {
        assert_eq!(pass_at_k(&["a", "b", "c"], &["c"], 2), 0);
        assert_eq!(pass_at_k(&["a", "b", "c"], &["c"], 3), 1);
        assert!((recall_at_k(&["a", "b", "c", "d"], &["a", "c", "e"], 3).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(recall_at_k(&["a", "b"], &["b", "a"], 2).unwrap(), 1.0);
        assert!(recall_at_k::<&str, &str>(&["a"], &[], 1).is_err());
        assert_eq!(reciprocal_rank(&["x", "a"], &["a"]), 0.5);
        assert_eq!(reciprocal_rank(&["x"], &["a"]), 0.0);
        assert_eq!(reciprocal_rank(&["a"], &["a"]), 1.0);
    }

    #[test]
    fn agrees_with_oracle_on_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let (ranked, truth, k) = random_case(&mut rng);
            assert_eq!(pass_at_k(&ranked, &truth, k), oracle_pass(&ranked, &truth, k));
            assert_eq!(recall_at_k(&ranked, &truth, k).unwrap(), oracle_recall(&ranked, &truth, k));
            assert_eq!(reciprocal_rank(&ranked, &truth), oracle_rr(&ranked, &truth));
        }
    }

    proptest! {
        #[test]
        fn monotone_in_k_and_bounded(
            ranked in proptest::collection::vec("[a-e]", 0..10),
            truth in proptest::collection::vec("[a-e]", 1..4),
            k in 1usize..12,
        ) {
            let p1 = pass_at_k(&ranked, &truth, k);
            let p2 = pass_at_k(&ranked, &truth, k + 1);
            let r1 = recall_at_k(&ranked, &truth, k).unwrap();
            let r2 = recall_at_k(&ranked, &truth, k + 1).unwrap();
            prop_assert!(p1 <= p2 && r1 <= r2);
            prop_assert!((0.0..=1.0).contains(&r1));
            let rr = reciprocal_rank(&ranked, &truth);
            prop_assert!((0.0..=1.0).contains(&rr));
            if r1 > 0.0 {
                prop_assert_eq!(p1, 1);
            }
        }
    }
}
