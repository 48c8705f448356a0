mod common;

use common::blobs;
use labelled_motifs::features::FeatureMatrix;
use labelled_motifs::learn::{
    cross_validate, fit, stratified_kfold, ClassifierSpec, FittedModel, Model,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(rows: &[&[f64]], labels: &[&str]) -> FeatureMatrix {
    let names = (0..rows[0].len()).map(|i| format!("f{i}")).collect();
    FeatureMatrix::new(
        names,
        rows.iter().map(|r| r.to_vec()).collect(),
        labels.iter().map(|l| l.to_string()).collect(),
    )
    .unwrap()
}

fn density(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn posteriors(model: &FittedModel, x: &[f64]) -> Vec<f64> {
    match &model.model {
        Model::NaiveBayes(nb) => nb.posteriors(x),
        _ => unreachable!(),
    }
}

fn shuffled(m: &FeatureMatrix, seed: u64) -> FeatureMatrix {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    m.select_rows(&idx)
}

#[test]
fn naive_bayes_posterior_with_variance_floor() {
    // Class a has ML variance 1e-20, raised to the 1e-9 floor.
    let m = matrix(&[&[0.0], &[2e-10], &[1.0], &[3.0]], &["a", "a", "b", "b"]);
    let model = fit(&ClassifierSpec::naive_bayes(), &m, 0).unwrap();
    let x = 1e-10 + 3e-5;
    let pa = 0.5 * density(x, 1e-10, 1e-9);
    let pb = 0.5 * density(x, 2.0, 1.0);
    let got = posteriors(&model, &[x]);
    assert!((got[0] - pa / (pa + pb)).abs() < 1e-12, "{got:?}");
    assert!((got[1] - pb / (pa + pb)).abs() < 1e-12, "{got:?}");
}

#[test]
fn naive_bayes_posterior_two_features() {
    let m = matrix(
        &[&[0.0, 0.0], &[2.0, 2.0], &[4.0, 0.0], &[6.0, 2.0]],
        &["a", "a", "b", "b"],
    );
    let model = fit(&ClassifierSpec::naive_bayes(), &m, 0).unwrap();
    // Means (1,1) and (5,1); every variance is 1.
    for x in [[3.0, 1.0], [2.0, 1.5], [4.5, -0.5]] {
        let pa = density(x[0], 1.0, 1.0) * density(x[1], 1.0, 1.0);
        let pb = density(x[0], 5.0, 1.0) * density(x[1], 1.0, 1.0);
        let got = posteriors(&model, &x);
        assert!((got[0] - pa / (pa + pb)).abs() < 1e-12, "{x:?}: {got:?}");
    }
    assert_eq!(posteriors(&model, &[3.0, 7.0]), vec![0.5, 0.5]);
}

#[test]
fn naive_bayes_symmetric_boundary() {
    let m = matrix(
        &[&[-1.0], &[-3.0], &[1.0], &[3.0]],
        &["neg", "neg", "pos", "pos"],
    );
    let model = fit(&ClassifierSpec::naive_bayes(), &m, 0).unwrap();
    let q = matrix(&[&[-0.1], &[0.1], &[-50.0], &[50.0], &[0.0]], &["?"; 5]);
    // The exact tie at 0 goes to the first class in sorted order.
    assert_eq!(
        model.predict(&q).unwrap(),
        ["neg", "pos", "neg", "pos", "neg"]
    );
}

#[test]
fn separable_blobs_are_learned_exactly_by_the_svm() {
    let m = blobs(17, 50);
    let model = fit(&ClassifierSpec::linear_svm(), &m, 3).unwrap();
    assert_eq!(model.predict(&m).unwrap(), m.labels);
}

#[test]
fn all_classifiers_on_blobs() {
    let m = blobs(42, 50);
    let folds = stratified_kfold(&m.labels, 10, 42).unwrap();
    for spec in ClassifierSpec::defaults() {
        let report = cross_validate(&spec, &m.labels, &folds, 42, |tr, te| {
            Ok((m.select_rows(tr), m.select_rows(te)))
        })
        .unwrap();
        assert!(
            report.mean_accuracy >= 99.0,
            "{}: {}",
            spec.name(),
            report.mean_accuracy
        );
    }
}

#[test]
fn mean_accuracy_ignores_fold_numbering() {
    let m = blobs(8, 30);
    let folds = stratified_kfold(&m.labels, 5, 1).unwrap();
    let renamed: Vec<usize> = folds.iter().map(|f| 4 - f).collect();
    for spec in ClassifierSpec::defaults() {
        let run = |folds: &[usize]| {
            cross_validate(&spec, &m.labels, folds, 9, |tr, te| {
                Ok((m.select_rows(tr), m.select_rows(te)))
            })
            .unwrap()
        };
        let (a, b) = (run(&folds), run(&renamed));
        assert_eq!(a.mean_accuracy, b.mean_accuracy, "{}", spec.name());
        assert_eq!(a.confusion, b.confusion);
    }
}

#[test]
fn prediction_rejects_other_columns() {
    let m = blobs(1, 5);
    let model = fit(&ClassifierSpec::knn(), &m, 0).unwrap();
    let other = FeatureMatrix::new(
        vec!["y".into(), "x".into()],
        m.rows.clone(),
        m.labels.clone(),
    )
    .unwrap();
    assert_eq!(model.predict(&other).unwrap_err().kind(), "schema");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn training_order_is_irrelevant(data_seed in any::<u64>(), perm_seed in any::<u64>()) {
        let m = blobs(data_seed, 8);
        let queries = blobs(data_seed.wrapping_add(1), 6);
        for spec in ClassifierSpec::defaults() {
            let a = fit(&spec, &m, 5).unwrap().predict(&queries).unwrap();
            let b = fit(&spec, &shuffled(&m, perm_seed), 5).unwrap().predict(&queries).unwrap();
            prop_assert_eq!(a, b, "{}", spec.name());
        }
    }

    #[test]
    fn knn_ignores_power_of_two_scaling(data_seed in any::<u64>(), exp in -20i32..20) {
        let m = blobs(data_seed, 6);
        let queries = blobs(data_seed.wrapping_add(7), 5);
        let scale = |x: &FeatureMatrix| {
            let rows = x.rows.iter().map(|r| r.iter().map(|v| v * 2f64.powi(exp)).collect()).collect();
            FeatureMatrix::new(x.feature_names.clone(), rows, x.labels.clone()).unwrap()
        };
        let spec = ClassifierSpec::knn();
        let a = fit(&spec, &m, 0).unwrap().predict(&queries).unwrap();
        let b = fit(&spec, &scale(&m), 0).unwrap().predict(&scale(&queries)).unwrap();
        prop_assert_eq!(a, b);
    }
}
