//! Stratified fold assignment and k-fold evaluation.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, ClassifierSpec};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

fn check_folds(k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {n} samples"
        )));
    }
    Ok(())
}

/// Assigns each sample a fold in `0..k`. Samples of each class are shuffled
/// under `seed` and dealt round-robin, continuing the deal across classes,
/// so per-class and overall fold sizes each differ by at most one.
pub fn stratified_kfold(labels: &[String], k: usize, seed: u64) -> Result<Vec<usize>> {
    check_folds(k, labels.len())?;
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next % k;
            next += 1;
        }
    }
    Ok(folds)
}

/// Like [`stratified_kfold`] but keeps samples sharing a group in one fold.
/// Samples without a group form singleton groups. Groups are placed largest
/// first into the fold holding the fewest samples of the group's majority
/// class, then the fewest samples overall.
pub fn group_stratified_kfold(
    labels: &[String],
    groups: &[Option<String>],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if labels.len() != groups.len() {
        return Err(Error::InvalidArgument(
            "labels and groups differ in length".into(),
        ));
    }
    check_folds(k, labels.len())?;

    let mut units: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        let key = match g {
            Some(g) => (0, g.clone()),
            None => (1, format!("{i:020}")),
        };
        units.entry(key).or_default().push(i);
    }
    if units.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {} groups",
            units.len()
        )));
    }

    let mut classes: Vec<&str> = labels.iter().map(String::as_str).collect();
    classes.sort_unstable();
    classes.dedup();

    let mut units: Vec<Vec<usize>> = units.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    units.shuffle(&mut rng);
    units.sort_by_key(|u| std::cmp::Reverse(u.len()));

    let mut per_class = vec![vec![0usize; classes.len()]; k];
    let mut sizes = vec![0usize; k];
    let mut folds = vec![0; labels.len()];
    for unit in units {
        let mut tally = vec![0usize; classes.len()];
        for &i in &unit {
            tally[classes.binary_search(&labels[i].as_str()).unwrap()] += 1;
        }
        let major = super::argmax(&tally);
        let fold = (0..k)
            .min_by_key(|&f| (per_class[f][major], sizes[f], f))
            .unwrap();
        for &i in &unit {
            folds[i] = fold;
        }
        for (c, t) in tally.iter().enumerate() {
            per_class[fold][c] += t;
        }
        sizes[fold] += unit.len();
    }
    Ok(folds)
}

/// Training and test indices for `fold`.
pub fn split_fold(folds: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    (0..folds.len()).partition(|&i| folds[i] != fold)
}

/// Outcome of one cross-validated classifier run. Accuracies are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub classifier: String,
    pub feature_version: Option<String>,
    pub words: Option<usize>,
    pub seed: u64,
    pub folds: usize,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub classes: Vec<String>,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<u64>>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "classifier {}", self.classifier)?;
        if let Some(v) = &self.feature_version {
            write!(f, "  features {v}")?;
        }
        if let Some(w) = self.words {
            write!(f, "  |W| {w}")?;
        }
        writeln!(f, "  seed {}", self.seed)?;
        for (i, a) in self.fold_accuracies.iter().enumerate() {
            writeln!(f, "  fold {:>2}  {:6.2}%", i + 1, a)?;
        }
        writeln!(f, "  mean     {:6.2}%", self.mean_accuracy)?;
        let width = self
            .classes
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(5);
        write!(f, "  {:>width$}", "")?;
        for c in &self.classes {
            write!(f, " {c:>width$}")?;
        }
        writeln!(f)?;
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            write!(f, "  {c:>width$}")?;
            for v in row {
                write!(f, " {v:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Accuracy of one fold plus its (true, predicted) class index pairs.
type FoldOutcome = (f64, Vec<(usize, usize)>);

/// Runs k-fold evaluation. `featurize` receives the training and test
/// indices of each fold and returns the two feature matrices, so anything
/// derived from training data (such as the tracked word set) is recomputed
/// per fold. Folds run in parallel; the report does not depend on it.
pub fn cross_validate<F>(
    spec: &ClassifierSpec,
    labels: &[String],
    folds: &[usize],
    seed: u64,
    featurize: F,
) -> Result<EvaluationReport>
where
    F: Fn(&[usize], &[usize]) -> Result<(FeatureMatrix, FeatureMatrix)> + Sync,
{
    if labels.len() != folds.len() {
        return Err(Error::InvalidArgument(
            "labels and folds differ in length".into(),
        ));
    }
    let k = folds.iter().max().map_or(0, |m| m + 1);
    check_folds(k, labels.len())?;

    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();

    let outcomes: Vec<Result<FoldOutcome>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train, test) = split_fold(folds, fold);
            if test.is_empty() {
                return Err(Error::InvalidArgument(format!("fold {fold} is empty")));
            }
            let (train_x, test_x) = featurize(&train, &test)?;
            if train_x.len() != train.len() || test_x.len() != test.len() {
                return Err(Error::Schema(
                    "featurizer returned the wrong number of rows".into(),
                ));
            }
            let model = fit(spec, &train_x, seed)?;
            let predicted = model.predict(&test_x)?;
            let mut pairs = Vec::with_capacity(test.len());
            let mut correct = 0;
            for (&i, p) in test.iter().zip(&predicted) {
                if *p == labels[i] {
                    correct += 1;
                }
                let truth = classes.binary_search(&labels[i]).unwrap();
                let pred = classes.binary_search(p).unwrap();
                pairs.push((truth, pred));
            }
            Ok((100.0 * correct as f64 / test.len() as f64, pairs))
        })
        .collect();

    let mut fold_accuracies = Vec::with_capacity(k);
    let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
    for outcome in outcomes {
        let (acc, pairs) = outcome?;
        fold_accuracies.push(acc);
        for (t, p) in pairs {
            confusion[t][p] += 1;
        }
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;

    Ok(EvaluationReport {
        classifier: spec.name().to_string(),
        feature_version: None,
        words: None,
        seed,
        folds: k,
        fold_accuracies,
        mean_accuracy,
        classes,
        confusion,
    })
}
