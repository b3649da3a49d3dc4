use std::collections::HashMap;

use super::EvaluationError;
use crate::dissimilarity::DistanceMatrix;

/// Predicts a class for each `test` row from its `k` nearest `train` rows.
///
/// `dist(i, j)` gives the distance between rows. A test row never counts
/// itself as a neighbour. Equal distances are ordered by row index; a vote
/// tie goes to the tied class whose nearest member ranks first.
pub fn knn_predict<F>(
    dist: F,
    train: &[usize],
    train_labels: &[u32],
    test: &[usize],
    k: usize,
) -> Result<Vec<u32>, EvaluationError>
where
    F: Fn(usize, usize) -> f64,
{
    if k == 0 {
        return Err(EvaluationError::BadK);
    }
    if train.is_empty() {
        return Err(EvaluationError::EmptyTrain);
    }
    debug_assert_eq!(train.len(), train_labels.len());
    let mut out = Vec::with_capacity(test.len());
    let mut cand: Vec<(f64, usize, u32)> = Vec::with_capacity(train.len());
    for &t in test {
        cand.clear();
        cand.extend(
            train
                .iter()
                .zip(train_labels)
                .filter(|(&r, _)| r != t)
                .map(|(&r, &l)| (dist(t, r), r, l)),
        );
        if cand.is_empty() {
            return Err(EvaluationError::EmptyTrain);
        }
        let take = k.min(cand.len());
        let by_distance =
            |a: &(f64, usize, u32), b: &(f64, usize, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if take < cand.len() {
            cand.select_nth_unstable_by(take - 1, by_distance);
            cand.truncate(take);
        }
        cand.sort_by(by_distance);

        // class -> (votes, rank of nearest member)
        let mut votes: HashMap<u32, (usize, usize)> = HashMap::new();
        for (rank, &(_, _, l)) in cand.iter().enumerate() {
            votes.entry(l).or_insert((0, rank)).0 += 1;
        }
        let (&winner, _) = votes
            .iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .expect("at least one neighbour");
        out.push(winner);
    }
    Ok(out)
}

/// Id-based kNN over a distance matrix. Rows are ordered as in the matrix.
pub fn knn_classify(
    m: &DistanceMatrix,
    train: &[(String, String)],
    test: &[String],
    k: usize,
) -> Result<Vec<String>, EvaluationError> {
    let index = |id: &str| {
        m.index_of(id)
            .ok_or_else(|| EvaluationError::IdMismatch(format!("`{id}` is not in the matrix")))
    };
    let mut classes: Vec<String> = train.iter().map(|(_, c)| c.clone()).collect();
    classes.sort();
    classes.dedup();
    let code = |c: &str| classes.binary_search_by(|x| x.as_str().cmp(c)).unwrap() as u32;

    let train_rows = train
        .iter()
        .map(|(id, _)| index(id))
        .collect::<Result<Vec<_>, _>>()?;
    let train_codes: Vec<u32> = train.iter().map(|(_, c)| code(c)).collect();
    let test_rows = test
        .iter()
        .map(|id| index(id))
        .collect::<Result<Vec<_>, _>>()?;
    let pred = knn_predict(|i, j| m.get(i, j), &train_rows, &train_codes, &test_rows, k)?;
    Ok(pred
        .into_iter()
        .map(|c| classes[c as usize].clone())
        .collect())
}
