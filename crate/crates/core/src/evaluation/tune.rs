//! Cross-validated kNN with weight selection by inner cross-validation.
//!
//! Component matrices are computed once; a grid point only changes how the
//! five normalised components are combined. Normalisation maxima come from
//! all target pairs, including pairs that involve held-out vertices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::knn_predict;
use super::{mean, EvaluationError};
use crate::dataset::Dataset;
use crate::dissimilarity::{
    combined_entry, component_matrices, validate_weights, ComponentMatrices, DissimilarityConfig,
    Scale,
};

/// When a label is read, and on behalf of which outer fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Building stratified folds.
    Split,
    /// Choosing weights for outer fold `fold`; `None` is the final
    /// selection over all data.
    Selection { fold: Option<usize> },
    /// Training neighbours for predicting outer fold `fold`.
    Training { fold: usize },
    /// Comparing predictions for outer fold `fold` with the truth.
    Scoring { fold: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelRead {
    pub index: usize,
    pub stage: Stage,
}

/// Receives every label access made during tuning.
pub trait LabelObserver: Sync {
    fn on_read(&self, read: LabelRead);
}

struct LabelStore<'a> {
    codes: &'a [u32],
    observer: Option<&'a dyn LabelObserver>,
}

impl LabelStore<'_> {
    fn read(&self, index: usize, stage: Stage) -> u32 {
        if let Some(o) = self.observer {
            o.on_read(LabelRead { index, stage });
        }
        self.codes[index]
    }

    fn read_all(&self, indices: &[usize], stage: Stage) -> Vec<u32> {
        indices.iter().map(|&i| self.read(i, stage)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub folds: usize,
    /// Neighbours consulted by kNN.
    pub k: usize,
    pub seed: u64,
    pub grid: Vec<[f64; 5]>,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            k: 5,
            seed: 0,
            grid: weight_grid(0.2).expect("0.2 divides 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub weights: [f64; 5],
    /// Mean inner-CV accuracy of the chosen weights, percent.
    pub inner_accuracy: f64,
    /// Outer-test accuracy, percent.
    pub accuracy: f64,
    /// Rows held out in this fold, ascending.
    pub test_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    /// Weights chosen by inner CV over the whole labeled set.
    pub best_weights: [f64; 5],
    pub folds: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    pub fold_count: usize,
    pub warnings: Vec<String>,
}

/// All weight vectors on a regular grid with spacing `step` summing to 1,
/// ordered with `w1` descending first, then `w2`, and so on.
pub fn weight_grid(step: f64) -> Result<Vec<[f64; 5]>, EvaluationError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(EvaluationError::BadGrid(format!(
            "step {step} is not in (0, 1]"
        )));
    }
    let units = (1.0 / step).round();
    if (units * step - 1.0).abs() > 1e-9 {
        return Err(EvaluationError::BadGrid(format!(
            "step {step} does not divide 1"
        )));
    }
    let u = units as usize;
    let mut out = Vec::new();
    for a in (0..=u).rev() {
        for b in (0..=u - a).rev() {
            for c in (0..=u - a - b).rev() {
                for d in (0..=u - a - b - c).rev() {
                    let e = u - a - b - c - d;
                    out.push([a, b, c, d, e].map(|x| x as f64 / units));
                }
            }
        }
    }
    Ok(out)
}

/// Stratified split of `indices` into `folds` parts: each class (ascending
/// code order) is shuffled and dealt round-robin, continuing the deal across
/// classes. When a class has fewer members than `folds`, the fold count is
/// reduced to the smallest class size (but not below 2) and a warning is
/// returned.
pub fn stratified_folds(
    indices: &[usize],
    classes: &[u32],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec<usize>>, Option<String>), EvaluationError> {
    if folds < 2 {
        return Err(EvaluationError::BadFolds(folds));
    }
    if indices.len() < 2 {
        return Err(EvaluationError::BadFolds(indices.len()));
    }
    let mut by_class: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (&i, &c) in indices.iter().zip(classes) {
        by_class.entry(c).or_default().push(i);
    }
    let smallest = by_class.values().map(Vec::len).min().unwrap_or(0);
    let mut warning = None;
    let mut folds = folds;
    if smallest < folds {
        let reduced = smallest.max(2).min(indices.len());
        warning = Some(format!(
            "smallest class has {smallest} members; using {reduced} folds instead of {folds}"
        ));
        folds = reduced;
    }
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(rng);
        for &i in members.iter() {
            out[next % folds].push(i);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok((out, warning))
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}

fn accuracy(pred: &[u32], truth: &[u32]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    100.0 * hits as f64 / pred.len() as f64
}

struct SelectionSet {
    owner: Option<usize>,
    /// `(train, test)` per inner fold.
    inner: Vec<(Vec<usize>, Vec<usize>)>,
}

fn class_codes(labels: &[String]) -> Vec<u32> {
    let mut classes: Vec<&String> = labels.iter().collect();
    classes.sort();
    classes.dedup();
    labels
        .iter()
        .map(|l| classes.binary_search(&l).unwrap() as u32)
        .collect()
}

/// Nested cross-validation on precomputed normalised components. `labels`
/// is aligned with the matrix rows.
pub fn tune_weights_observed(
    norm: &ComponentMatrices,
    labels: &[String],
    opts: &TuneOptions,
    observer: Option<&dyn LabelObserver>,
) -> Result<TuneOutcome, EvaluationError> {
    if norm.scale != Scale::Normalized {
        return Err(EvaluationError::Dissimilarity(
            crate::dissimilarity::DissimilarityError::NotNormalized,
        ));
    }
    let n = norm.len();
    if labels.len() != n {
        return Err(EvaluationError::IdMismatch(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    if opts.k == 0 {
        return Err(EvaluationError::BadK);
    }
    if opts.grid.is_empty() {
        return Err(EvaluationError::BadGrid("grid is empty".into()));
    }
    for w in &opts.grid {
        validate_weights(w).map_err(|e| EvaluationError::BadGrid(e.to_string()))?;
    }

    let codes = class_codes(labels);
    let store = LabelStore {
        codes: &codes,
        observer,
    };
    let all: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let split_codes = store.read_all(&all, Stage::Split);
    let (outer, warning) = stratified_folds(&all, &split_codes, opts.folds, &mut rng)?;
    let mut warnings: Vec<String> = warning.into_iter().collect();

    let selecting = opts.grid.len() > 1;
    let mut sets = Vec::new();
    if selecting {
        let owners = (0..outer.len()).map(Some).chain([None]);
        for (s, owner) in owners.enumerate() {
            let train = match owner {
                Some(f) => complement(n, &outer[f]),
                None => all.clone(),
            };
            let stage = Stage::Selection { fold: owner };
            let train_codes = store.read_all(&train, stage);
            let mut inner_rng = ChaCha8Rng::seed_from_u64(
                opts.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(s as u64 + 1)),
            );
            let (inner, w) = stratified_folds(&train, &train_codes, opts.folds, &mut inner_rng)?;
            if let Some(w) = w {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
            let inner = inner
                .iter()
                .map(|test| {
                    let train_inner: Vec<usize> = train
                        .iter()
                        .copied()
                        .filter(|i| test.binary_search(i).is_err())
                        .collect();
                    (train_inner, test.clone())
                })
                .collect();
            sets.push(SelectionSet { owner, inner });
        }
    }

    // scores[g][s]: mean inner accuracy of grid point g for selection set s
    let scores: Vec<Vec<f64>> = opts
        .grid
        .par_iter()
        .map(|w| {
            let dist = |i: usize, j: usize| combined_entry(norm, w, i, j);
            sets.iter()
                .map(|set| {
                    let stage = Stage::Selection { fold: set.owner };
                    let accs = set
                        .inner
                        .iter()
                        .map(|(train, test)| {
                            let train_labels = store.read_all(train, stage);
                            let pred = knn_predict(dist, train, &train_labels, test, opts.k)?;
                            Ok(accuracy(&pred, &store.read_all(test, stage)))
                        })
                        .collect::<Result<Vec<f64>, EvaluationError>>()?;
                    Ok(mean(&accs).unwrap_or(0.0))
                })
                .collect::<Result<Vec<f64>, EvaluationError>>()
        })
        .collect::<Result<_, _>>()?;

    let choose = |s: usize| -> (usize, f64) {
        if !selecting {
            return (0, f64::NAN);
        }
        let mut best = (0, scores[0][s]);
        for (g, row) in scores.iter().enumerate().skip(1) {
            if row[s] > best.1 {
                best = (g, row[s]);
            }
        }
        best
    };

    let fold_results = outer
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let (g, inner_accuracy) = choose(f);
            let w = &opts.grid[g];
            let train = complement(n, test);
            let train_labels = store.read_all(&train, Stage::Training { fold: f });
            let pred = knn_predict(
                |i, j| combined_entry(norm, w, i, j),
                &train,
                &train_labels,
                test,
                opts.k,
            )?;
            let truth = store.read_all(test, Stage::Scoring { fold: f });
            Ok(FoldOutcome {
                fold: f,
                weights: *w,
                inner_accuracy,
                accuracy: accuracy(&pred, &truth),
                test_indices: test.clone(),
            })
        })
        .collect::<Result<Vec<_>, EvaluationError>>()?;

    let best_weights = opts.grid[choose(outer.len()).0];
    let accs: Vec<f64> = fold_results.iter().map(|f| f.accuracy).collect();
    Ok(TuneOutcome {
        best_weights,
        mean_accuracy: mean(&accs).unwrap_or(0.0),
        fold_count: outer.len(),
        folds: fold_results,
        warnings,
    })
}

/// Computes component matrices for `dataset` and runs nested CV over
/// `opts.grid`. Only the depth and aggregates of `cfg` are used.
pub fn tune_weights(
    dataset: &Dataset,
    cfg: &DissimilarityConfig,
    opts: &TuneOptions,
    workers: Option<usize>,
) -> Result<TuneOutcome, EvaluationError> {
    let labels = dataset
        .target_labels()
        .map_err(EvaluationError::MissingLabels)?;
    let (_, norm) = component_matrices(dataset, cfg, workers)?;
    crate::dissimilarity::with_workers(workers, || {
        tune_weights_observed(&norm, &labels, opts, None)
    })?
}

/// Plain stratified CV with fixed weights.
pub fn cross_validate(
    norm: &ComponentMatrices,
    labels: &[String],
    weights: [f64; 5],
    folds: usize,
    k: usize,
    seed: u64,
) -> Result<TuneOutcome, EvaluationError> {
    let opts = TuneOptions {
        folds,
        k,
        seed,
        grid: vec![weights],
    };
    tune_weights_observed(norm, labels, &opts, None)
}
