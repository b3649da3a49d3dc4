use std::collections::BTreeSet;
use std::sync::Mutex;

use relsim::dissimilarity::{component_matrices, with_workers, DissimilarityConfig};
use relsim::evaluation::{
    cross_validate, tune_weights, tune_weights_observed, weight_grid, LabelObserver, LabelRead,
    Stage, TuneOptions,
};
use relsim::synth;

#[derive(Default)]
struct Recorder(Mutex<Vec<LabelRead>>);

impl LabelObserver for Recorder {
    fn on_read(&self, read: LabelRead) {
        self.0.lock().unwrap().push(read);
    }
}

#[test]
fn outer_test_labels_are_read_only_for_scoring() {
    let ds = synth::attribute_classes(40, 3);
    let labels = ds.target_labels().unwrap();
    let (_, norm) = component_matrices(&ds, &DissimilarityConfig::default(), None).unwrap();
    let opts = TuneOptions {
        folds: 5,
        k: 3,
        seed: 7,
        grid: weight_grid(0.5).unwrap(),
    };
    let rec = Recorder::default();
    let outcome = tune_weights_observed(&norm, &labels, &opts, Some(&rec)).unwrap();
    let reads = rec.0.into_inner().unwrap();
    assert_eq!(outcome.folds.len(), 5);

    for fold in &outcome.folds {
        let f = fold.fold;
        let held: BTreeSet<usize> = fold.test_indices.iter().copied().collect();
        let mut scored = BTreeSet::new();
        for r in &reads {
            match r.stage {
                Stage::Selection { fold: Some(g) } | Stage::Training { fold: g } if g == f => {
                    assert!(
                        !held.contains(&r.index),
                        "fold {f} read held-out row {} during {:?}",
                        r.index,
                        r.stage
                    );
                }
                Stage::Scoring { fold: g } if g == f => {
                    scored.insert(r.index);
                }
                _ => {}
            }
        }
        assert_eq!(scored, held, "fold {f} scores exactly its held-out rows");
    }
    // held-out sets partition the rows
    let mut all: Vec<usize> = outcome
        .folds
        .iter()
        .flat_map(|f| f.test_indices.clone())
        .collect();
    all.sort();
    assert_eq!(all, (0..40).collect::<Vec<_>>());
}

#[test]
fn single_point_grid_equals_plain_cross_validation() {
    let ds = synth::connectivity_blocks(15, 0.3, 4);
    let labels = ds.target_labels().unwrap();
    let (_, norm) = component_matrices(&ds, &DissimilarityConfig::default(), None).unwrap();
    let w = [0.2; 5];
    let plain = cross_validate(&norm, &labels, w, 10, 5, 0).unwrap();
    let tuned = tune_weights_observed(
        &norm,
        &labels,
        &TuneOptions {
            folds: 10,
            k: 5,
            seed: 0,
            grid: vec![w],
        },
        None,
    )
    .unwrap();
    let acc = |o: &relsim::evaluation::TuneOutcome| {
        o.folds.iter().map(|f| f.accuracy).collect::<Vec<_>>()
    };
    assert_eq!(acc(&plain), acc(&tuned));
    assert_eq!(plain.mean_accuracy, tuned.mean_accuracy);
}

#[test]
fn attribute_classes_select_ad_heavy_weights() {
    let ds = synth::attribute_classes(60, 5);
    let opts = TuneOptions {
        folds: 5,
        ..TuneOptions::default()
    };
    let out = tune_weights(&ds, &DissimilarityConfig::default(), &opts, None).unwrap();
    assert_eq!(out.mean_accuracy, 100.0);
    assert!(out.best_weights[0] >= 0.6, "{:?}", out.best_weights);
    for f in &out.folds {
        assert!(f.weights[0] >= 0.6, "fold {} chose {:?}", f.fold, f.weights);
    }
}

#[test]
fn small_class_reduces_folds_with_warning() {
    let ds = synth::attribute_classes(8, 1);
    let labels = ds.target_labels().unwrap();
    let (_, norm) = component_matrices(&ds, &DissimilarityConfig::default(), None).unwrap();
    let out = cross_validate(&norm, &labels, [1.0, 0.0, 0.0, 0.0, 0.0], 10, 1, 0).unwrap();
    assert_eq!(out.fold_count, 4);
    assert!(!out.warnings.is_empty());
}

#[test]
fn tuning_is_deterministic_across_pools() {
    let ds = synth::attribute_classes(30, 8);
    let labels = ds.target_labels().unwrap();
    let (_, norm) = component_matrices(&ds, &DissimilarityConfig::default(), None).unwrap();
    let opts = TuneOptions {
        folds: 3,
        k: 3,
        seed: 11,
        grid: weight_grid(0.25).unwrap(),
    };
    let one = with_workers(Some(1), || {
        tune_weights_observed(&norm, &labels, &opts, None)
    })
    .unwrap()
    .unwrap();
    let many = with_workers(Some(6), || {
        tune_weights_observed(&norm, &labels, &opts, None)
    })
    .unwrap()
    .unwrap();
    assert_eq!(one, many);
}

#[test]
fn unlabeled_targets_are_rejected() {
    let ds = synth::constant_degree(10, 2, 0);
    let err = tune_weights(
        &ds,
        &DissimilarityConfig::default(),
        &TuneOptions::default(),
        None,
    )
    .unwrap_err();
    assert!(matches!(
        err,
        relsim::evaluation::EvaluationError::MissingLabels(_)
    ));
}
