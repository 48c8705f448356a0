//! Classifiers and the cross-validation harness.
//!
//! Four learners with fixed default hyperparameters: 1-nearest-neighbour,
//! Gaussian naive Bayes, a one-vs-one linear SVM on standardized inputs,
//! and a gain-ratio decision tree. Class labels are handled as indices into
//! the sorted list of training labels, so every tie resolves to the
//! lexicographically smallest label.

mod cv;
mod knn;
mod naive_bayes;
mod svm;
mod tree;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use cv::{
    cross_validate, group_stratified_kfold, split_fold, stratified_kfold, EvaluationReport,
};
pub use knn::KnnModel;
pub use naive_bayes::GaussianNb;
pub use svm::LinearSvm;
pub use tree::DecisionTree;

/// Learning algorithm plus its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Knn {
        k: usize,
    },
    NaiveBayes {
        variance_floor: f64,
    },
    LinearSvm {
        c: f64,
        tolerance: f64,
        max_epochs: usize,
    },
    DecisionTree {
        min_leaf: usize,
    },
}

impl ClassifierSpec {
    pub fn knn() -> Self {
        ClassifierSpec::Knn { k: 1 }
    }

    pub fn naive_bayes() -> Self {
        ClassifierSpec::NaiveBayes {
            variance_floor: 1e-9,
        }
    }

    pub fn linear_svm() -> Self {
        ClassifierSpec::LinearSvm {
            c: 1.0,
            tolerance: 1e-3,
            max_epochs: 1000,
        }
    }

    pub fn decision_tree() -> Self {
        ClassifierSpec::DecisionTree { min_leaf: 2 }
    }

    /// The four default classifiers in table column order.
    pub fn defaults() -> Vec<ClassifierSpec> {
        vec![
            Self::decision_tree(),
            Self::knn(),
            Self::linear_svm(),
            Self::naive_bayes(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn { .. } => "knn",
            ClassifierSpec::NaiveBayes { .. } => "naive_bayes",
            ClassifierSpec::LinearSvm { .. } => "linear_svm",
            ClassifierSpec::DecisionTree { .. } => "decision_tree",
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(Self::knn()),
            "naive_bayes" | "bayes" | "nb" => Ok(Self::naive_bayes()),
            "linear_svm" | "svm" => Ok(Self::linear_svm()),
            "decision_tree" | "tree" | "j48" => Ok(Self::decision_tree()),
            _ => Err(Error::InvalidArgument(format!(
                "unknown classifier `{s}` (expected knn, naive_bayes, linear_svm or decision_tree)"
            ))),
        }
    }
}

/// Training data reduced to what the learners consume: rows in a canonical
/// order and labels as indices into the sorted class list.
pub(crate) struct TrainingSet {
    pub classes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<usize>,
}

fn cmp_rows(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl TrainingSet {
    /// Sorting by (label, values) makes every learner independent of the
    /// incoming row order.
    fn new(data: &FeatureMatrix) -> Self {
        let mut classes = data.labels.clone();
        classes.sort();
        classes.dedup();
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.sort_by(|&i, &j| {
            data.labels[i]
                .cmp(&data.labels[j])
                .then_with(|| cmp_rows(&data.rows[i], &data.rows[j]))
        });
        let targets = order
            .iter()
            .map(|&i| classes.binary_search(&data.labels[i]).unwrap())
            .collect();
        let rows = order.iter().map(|&i| data.rows[i].clone()).collect();
        TrainingSet {
            classes,
            rows,
            targets,
        }
    }

    fn n_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Index of the largest value; the first one wins ties.
pub(crate) fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub enum Model {
    Knn(KnnModel),
    NaiveBayes(GaussianNb),
    LinearSvm(LinearSvm),
    DecisionTree(DecisionTree),
}

/// A trained model bound to the feature columns it was fitted on.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub feature_names: Vec<String>,
    pub classes: Vec<String>,
    pub model: Model,
}

/// Trains `spec` on `data`. The result depends only on (spec, data as a
/// multiset of rows, seed).
pub fn fit(spec: &ClassifierSpec, data: &FeatureMatrix, seed: u64) -> Result<FittedModel> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 training rows, got {}",
            data.len()
        )));
    }
    let set = TrainingSet::new(data);
    let model = match *spec {
        ClassifierSpec::Knn { k } => {
            if k == 0 {
                return Err(Error::InvalidArgument("knn needs k >= 1".into()));
            }
            Model::Knn(KnnModel::fit(&set, k))
        }
        ClassifierSpec::NaiveBayes { variance_floor } => {
            Model::NaiveBayes(GaussianNb::fit(&set, variance_floor))
        }
        ClassifierSpec::LinearSvm {
            c,
            tolerance,
            max_epochs,
        } => {
            require_two_classes(&set, "linear_svm")?;
            Model::LinearSvm(LinearSvm::fit(&set, c, tolerance, max_epochs, seed))
        }
        ClassifierSpec::DecisionTree { min_leaf } => {
            require_two_classes(&set, "decision_tree")?;
            Model::DecisionTree(DecisionTree::fit(&set, min_leaf.max(1)))
        }
    };
    Ok(FittedModel {
        feature_names: data.feature_names.clone(),
        classes: set.classes,
        model,
    })
}

fn require_two_classes(set: &TrainingSet, name: &str) -> Result<()> {
    if set.classes.len() < 2 {
        return Err(Error::DegenerateTraining(format!(
            "{name} needs at least 2 classes, got {:?}",
            set.classes
        )));
    }
    Ok(())
}

impl FittedModel {
    pub fn predict(&self, data: &FeatureMatrix) -> Result<Vec<String>> {
        if data.feature_names != self.feature_names {
            return Err(Error::Schema(format!(
                "prediction columns differ from the {} training columns",
                self.feature_names.len()
            )));
        }
        Ok(data
            .rows
            .iter()
            .map(|row| {
                let class = match &self.model {
                    Model::Knn(m) => m.predict(row),
                    Model::NaiveBayes(m) => m.predict(row),
                    Model::LinearSvm(m) => m.predict(row),
                    Model::DecisionTree(m) => m.predict(row),
                };
                self.classes[class].clone()
            })
            .collect())
    }
}
