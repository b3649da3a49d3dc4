use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use super::EvaluationError;
use crate::clustering::ClusterAssignment;

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index between two labelings of the same items. Returns 1
/// when the index is undefined (both partitions trivial in the same way).
pub fn adjusted_rand_index<A, B>(a: &[A], b: &[B]) -> f64
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    assert_eq!(a.len(), b.len(), "labelings must cover the same items");
    let mut table: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    let denom = max - expected;
    if denom == 0.0 {
        1.0
    } else {
        (index - expected) / denom
    }
}

/// ARI of a clustering against class labels keyed by id.
pub fn ari(
    a: &ClusterAssignment,
    labels: &BTreeMap<String, String>,
) -> Result<f64, EvaluationError> {
    if a.ids.len() != labels.len() {
        return Err(EvaluationError::IdMismatch(format!(
            "{} clustered ids vs {} labels",
            a.ids.len(),
            labels.len()
        )));
    }
    let truth = a
        .ids
        .iter()
        .map(|id| {
            labels
                .get(id)
                .ok_or_else(|| EvaluationError::IdMismatch(format!("`{id}` has no label")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(adjusted_rand_index(&a.labels, &truth))
}
