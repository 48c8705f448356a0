//! End-to-end experiments: cross-validated accuracy for every combination
//! of feature version, tracked-word count and classifier, plus the scatter
//! data behind two-feature plots.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::corpus::{prepare_dataset, Document, Manifest};
use crate::error::{Error, Result};
use crate::features::{select_top_words, FeatureExtractor, FeatureName, FeatureVersion, WordSet};
use crate::learn::{
    cross_validate, group_stratified_kfold, stratified_kfold, ClassifierSpec, EvaluationReport,
};

/// Inclusive range of tracked-word counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordRange {
    pub lo: usize,
    pub hi: usize,
}

impl WordRange {
    pub fn single(n: usize) -> Self {
        WordRange { lo: n, hi: n }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub manifest: Manifest,
    pub versions: Vec<FeatureVersion>,
    pub words: WordRange,
    pub classifiers: Vec<ClassifierSpec>,
    pub folds: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Select W once from all documents instead of per training split.
    pub global_words: bool,
    /// Keep documents sharing a manifest group in the same fold.
    pub group_folds: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 folds, got {}",
                self.folds
            )));
        }
        if self.words.lo < 1 || self.words.lo > self.words.hi {
            return Err(Error::InvalidArgument(format!(
                "word range {}..={} must satisfy 1 <= lo <= hi",
                self.words.lo, self.words.hi
            )));
        }
        if self.versions.is_empty() || self.classifiers.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one feature version and one classifier are required".into(),
            ));
        }
        self.manifest.validate()
    }
}

/// One (version, |W|, classifier) evaluation.
#[derive(Debug, Clone)]
pub struct Cell {
    pub version: FeatureVersion,
    pub words: usize,
    pub classifier: ClassifierSpec,
    pub report: EvaluationReport,
}

struct CellKey {
    version: FeatureVersion,
    words: usize,
    classifier: ClassifierSpec,
}

/// Evaluates every cell on already prepared documents. Results come back in
/// (version, |W|, classifier) order; a failing cell does not stop the others.
pub fn evaluate_cells(docs: &[Document], config: &ExperimentConfig) -> Vec<Result<Cell>> {
    match prepare_cells(docs, config) {
        Ok((labels, folds, fold_words, extractor)) => {
            let mut keys = Vec::new();
            for &version in &config.versions {
                for words in config.words.iter() {
                    for &classifier in &config.classifiers {
                        keys.push(CellKey {
                            version,
                            words,
                            classifier,
                        });
                    }
                }
            }
            keys.par_iter()
                .map(|key| {
                    let mut report =
                        cross_validate(&key.classifier, &labels, &folds, config.seed, |tr, te| {
                            let ws = fold_words[folds[te[0]]].truncated(key.words);
                            Ok((
                                extractor.matrix(tr, &ws, key.version)?,
                                extractor.matrix(te, &ws, key.version)?,
                            ))
                        })?;
                    report.feature_version = Some(key.version.as_str().to_string());
                    report.words = Some(key.words);
                    Ok(Cell {
                        version: key.version,
                        words: key.words,
                        classifier: key.classifier,
                        report,
                    })
                })
                .collect()
        }
        Err(e) => vec![Err(e)],
    }
}

type Prepared = (Vec<String>, Vec<usize>, Vec<WordSet>, FeatureExtractor);

fn prepare_cells(docs: &[Document], config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let labels: Vec<String> = docs.iter().map(|d| d.label.clone()).collect();
    let folds = if config.group_folds {
        let groups: Vec<Option<String>> = docs.iter().map(|d| d.group.clone()).collect();
        group_stratified_kfold(&labels, &groups, config.folds, config.seed)?
    } else {
        stratified_kfold(&labels, config.folds, config.seed)?
    };

    let max_words = config.words.hi;
    let fold_words: Vec<WordSet> = if config.global_words {
        let ws = select_top_words(docs.iter().map(|d| d.tokens.as_slice()), max_words)?;
        vec![ws; config.folds]
    } else {
        (0..config.folds)
            .map(|f| {
                select_top_words(
                    docs.iter()
                        .zip(&folds)
                        .filter(|(_, &g)| g != f)
                        .map(|(d, _)| d.tokens.as_slice()),
                    max_words,
                )
            })
            .collect::<Result<_>>()?
    };

    let vocabulary: BTreeSet<String> = fold_words.iter().flat_map(|w| w.words.clone()).collect();
    let vocabulary: Vec<String> = vocabulary.into_iter().collect();
    let with_networks = config.versions.iter().any(|v| v.needs_network());
    let extractor = FeatureExtractor::new(docs, &vocabulary, with_networks);
    Ok((labels, folds, fold_words, extractor))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn report_file_name(cell: &Cell) -> String {
    format!(
        "{}_{}_w{}.json",
        cell.version,
        cell.classifier.name(),
        cell.words
    )
}

/// Accuracy table laid out as rows of (features, |W|) and one column per
/// classifier, one decimal place.
pub fn accuracy_table(cells: &[Cell], config: &ExperimentConfig) -> String {
    let mut out = String::from("features,words");
    for c in &config.classifiers {
        let _ = write!(out, ",{}", c.name());
    }
    out.push('\n');
    for &version in &config.versions {
        for words in config.words.iter() {
            let _ = write!(out, "{},{}", version.table_label(), words);
            for c in &config.classifiers {
                let cell = cells
                    .iter()
                    .find(|x| x.version == version && x.words == words && x.classifier == *c);
                match cell {
                    Some(cell) => {
                        let _ = write!(out, ",{:.1}", cell.report.mean_accuracy);
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
    }
    out
}

/// `words,classifier,version,accuracy` rows for accuracy-versus-|W| plots.
pub fn sweep_table(cells: &[Cell]) -> String {
    let mut out = String::from("words,classifier,version,accuracy\n");
    for cell in cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            cell.words,
            cell.classifier.name(),
            cell.version,
            cell.report.mean_accuracy
        );
    }
    out
}

/// Writes successful cells, then returns the first failure if any.
fn flush_cells(
    results: Vec<Result<Cell>>,
    config: &ExperimentConfig,
) -> Result<(Vec<Cell>, Option<Error>)> {
    let mut cells = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(cell) => {
                let path = config.out_dir.join("reports").join(report_file_name(&cell));
                write_atomic(&path, &cell.report.to_json()?)?;
                cells.push(cell);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Ok((cells, first_error))
}

/// Prepares the manifest, evaluates every cell, and writes one JSON report
/// per cell plus `accuracy_table.csv` into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<Cell>> {
    config.validate()?;
    let docs = prepare_dataset(&config.manifest, config.seed)?;
    let (cells, error) = flush_cells(evaluate_cells(&docs, config), config)?;
    write_atomic(
        &config.out_dir.join("accuracy_table.csv"),
        &accuracy_table(&cells, config),
    )?;
    match error {
        Some(e) => Err(e),
        None => Ok(cells),
    }
}

/// Like [`run_experiment`] over the configured word range, additionally
/// writing `sweep.csv`.
pub fn sweep_words(config: &ExperimentConfig) -> Result<Vec<Cell>> {
    config.validate()?;
    let docs = prepare_dataset(&config.manifest, config.seed)?;
    let (cells, error) = flush_cells(evaluate_cells(&docs, config), config)?;
    write_atomic(&config.out_dir.join("sweep.csv"), &sweep_table(&cells))?;
    match error {
        Some(e) => Err(e),
        None => Ok(cells),
    }
}

/// One `(label, x, y)` point per document for the two named features.
pub fn scatter_points(
    docs: &[Document],
    x: &FeatureName,
    y: &FeatureName,
) -> Result<Vec<(String, f64, f64)>> {
    let mut vocabulary = vec![x.word.clone(), y.word.clone()];
    vocabulary.dedup();
    let with_networks = x.motif.is_some() || y.motif.is_some();
    let extractor = FeatureExtractor::new(docs, &vocabulary, with_networks);
    let columns = extractor.columns(&[x.clone(), y.clone()])?;
    Ok(docs
        .iter()
        .zip(columns)
        .map(|(d, c)| (d.label.clone(), c[0], c[1]))
        .collect())
}

/// CSV `label,x,y` for two features given by name.
pub fn emit_scatter(manifest: &Manifest, x: &str, y: &str, seed: u64) -> Result<String> {
    let x: FeatureName = x.parse()?;
    let y: FeatureName = y.parse()?;
    let docs = prepare_dataset(manifest, seed)?;
    let mut out = String::from("label,x,y\n");
    for (label, a, b) in scatter_points(&docs, &x, &y)? {
        let _ = writeln!(out, "{label},{a},{b}");
    }
    Ok(out)
}
