//! Feature extraction: labelled motifs (per word and motif, optionally per
//! orbit) and the most-frequent-word baseline.
//!
//! Feature names follow a fixed grammar: `WORD` for word frequency,
//! `WORD|mK` for the share of motif `K` instances containing the word, and
//! `WORD|mK|oJ` for the share with the word in orbit `J`.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::graph::build_network;
use crate::motifs::{labelled_census, LabelledCensus, MotifId, OrbitId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureVersion {
    /// Word share of each motif.
    V1,
    /// Word share of each motif orbit.
    V2,
    /// Relative word frequency.
    Mfw,
}

impl FeatureVersion {
    pub const ALL: [FeatureVersion; 3] =
        [FeatureVersion::V1, FeatureVersion::V2, FeatureVersion::Mfw];

    /// Short name used on the command line and in file names.
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureVersion::V1 => "v1",
            FeatureVersion::V2 => "v2",
            FeatureVersion::Mfw => "mfw",
        }
    }

    /// Row label used in accuracy tables.
    pub fn table_label(self) -> &'static str {
        match self {
            FeatureVersion::V1 => "LMV1",
            FeatureVersion::V2 => "LMV2",
            FeatureVersion::Mfw => "MFW",
        }
    }

    pub fn needs_network(self) -> bool {
        self != FeatureVersion::Mfw
    }
}

impl fmt::Display for FeatureVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v1" | "lmv1" => Ok(FeatureVersion::V1),
            "v2" | "lmv2" => Ok(FeatureVersion::V2),
            "mfw" => Ok(FeatureVersion::Mfw),
            _ => Err(Error::InvalidArgument(format!(
                "unknown feature version `{s}` (expected v1, v2 or mfw)"
            ))),
        }
    }
}

/// Tracked words, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSet {
    pub words: Vec<String>,
    pub origin: String,
}

impl WordSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The first `k` words; a prefix of a frequency ranking is itself the
    /// top-`k` ranking.
    pub fn truncated(&self, k: usize) -> WordSet {
        WordSet {
            words: self.words[..k.min(self.words.len())].to_vec(),
            origin: self.origin.clone(),
        }
    }
}

/// All distinct words of `docs` ordered by descending frequency, ties broken
/// lexicographically.
pub fn rank_words<'a>(docs: impl IntoIterator<Item = &'a [String]>) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for tokens in docs {
        for t in tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(w, c)| (w.to_string(), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// The `k` most frequent words across `docs`.
pub fn select_top_words<'a>(
    docs: impl IntoIterator<Item = &'a [String]>,
    k: usize,
) -> Result<WordSet> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "word count must be at least 1".into(),
        ));
    }
    let mut ndocs = 0usize;
    let ranked = rank_words(docs.into_iter().inspect(|_| ndocs += 1));
    if ndocs == 0 {
        return Err(Error::InvalidArgument("no training documents".into()));
    }
    if ranked.len() < k {
        return Err(Error::InsufficientVocabulary {
            requested: k,
            available: ranked.len(),
        });
    }
    Ok(WordSet {
        words: ranked.into_iter().take(k).map(|(w, _)| w).collect(),
        origin: format!("top {k} of {ndocs} documents"),
    })
}

/// A parsed feature name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureName {
    pub word: String,
    pub motif: Option<MotifId>,
    pub orbit: Option<OrbitId>,
}

impl FeatureName {
    pub fn version(&self) -> FeatureVersion {
        match (self.motif, self.orbit) {
            (None, _) => FeatureVersion::Mfw,
            (Some(_), None) => FeatureVersion::V1,
            (Some(_), Some(_)) => FeatureVersion::V2,
        }
    }

    /// Every valid feature name for `word`.
    pub fn all_for(word: &str) -> Vec<String> {
        let words = [word.to_string()];
        FeatureVersion::ALL
            .iter()
            .rev()
            .flat_map(|&v| feature_names(&words, v))
            .collect()
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word)?;
        if let Some(m) = self.motif {
            write!(f, "|m{m}")?;
        }
        if let Some(o) = self.orbit {
            write!(f, "|o{o}")?;
        }
        Ok(())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = || {
            let word = s.split('|').next().unwrap_or_default();
            Error::Schema(format!(
                "unknown feature `{s}`; valid names for `{word}` are: {}",
                FeatureName::all_for(word).join(", ")
            ))
        };
        let mut parts = s.split('|');
        let word = parts.next().filter(|w| !w.is_empty()).ok_or_else(invalid)?;
        let motif = match parts.next() {
            None => None,
            Some(p) => {
                let id: u8 = p
                    .strip_prefix('m')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(invalid)?;
                Some(MotifId::new(id).map_err(|_| invalid())?)
            }
        };
        let orbit = match parts.next() {
            None => None,
            Some(p) => {
                let id: u8 = p
                    .strip_prefix('o')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(invalid)?;
                let count = motif.expect("orbit follows motif").entry().orbit_count();
                if id == 0 || id as usize > count {
                    return Err(invalid());
                }
                Some(OrbitId::new(id))
            }
        };
        if parts.next().is_some() {
            return Err(invalid());
        }
        Ok(FeatureName {
            word: word.to_string(),
            motif,
            orbit,
        })
    }
}

/// Column names for `words` under `version`: words outer, motifs then
/// orbits inner.
pub fn feature_names(words: &[String], version: FeatureVersion) -> Vec<String> {
    let mut names = Vec::new();
    for w in words {
        match version {
            FeatureVersion::Mfw => names.push(w.clone()),
            FeatureVersion::V1 => names.extend(MotifId::all().map(|m| format!("{w}|m{m}"))),
            FeatureVersion::V2 => {
                for m in MotifId::all() {
                    names.extend(m.entry().orbits().map(|o| format!("{w}|m{m}|o{o}")));
                }
            }
        }
    }
    names
}

fn share(count: u64, total: u64) -> Ratio<u64> {
    if total == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(count, total)
    }
}

fn to_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact V1 values; see [`features_v1`].
pub fn features_v1_exact(census: &LabelledCensus, words: &WordSet) -> Vec<Ratio<u64>> {
    words
        .words
        .iter()
        .flat_map(|w| {
            MotifId::all().map(move |m| share(census.word_count(w, m), census.motif_count(m)))
        })
        .collect()
}

/// Exact V2 values; see [`features_v2`].
pub fn features_v2_exact(census: &LabelledCensus, words: &WordSet) -> Vec<Ratio<u64>> {
    let mut out = Vec::with_capacity(30 * words.len());
    for w in &words.words {
        for m in MotifId::all() {
            let total = census.motif_count(m);
            for o in m.entry().orbits() {
                out.push(share(census.word_orbit_count(w, m, o), total));
            }
        }
    }
    out
}

/// Share of each motif's instances that contain each tracked word; 13
/// values per word, 0 where a motif never occurs.
pub fn features_v1(census: &LabelledCensus, words: &WordSet) -> Vec<f64> {
    features_v1_exact(census, words)
        .iter()
        .map(to_f64)
        .collect()
}

/// Share of each motif's instances with the word in a given orbit; 30
/// values per word. The denominator is the motif count.
pub fn features_v2(census: &LabelledCensus, words: &WordSet) -> Vec<f64> {
    features_v2_exact(census, words)
        .iter()
        .map(to_f64)
        .collect()
}

pub fn features_mfw_exact(tokens: &[String], words: &WordSet) -> Result<Vec<Ratio<u64>>> {
    if tokens.is_empty() {
        return Err(Error::InvalidArgument(
            "word frequencies of an empty document are undefined".into(),
        ));
    }
    let mut counts: HashMap<&str, u64> = words.words.iter().map(|w| (w.as_str(), 0)).collect();
    for t in tokens {
        if let Some(c) = counts.get_mut(t.as_str()) {
            *c += 1;
        }
    }
    let total = tokens.len() as u64;
    Ok(words
        .words
        .iter()
        .map(|w| share(counts[w.as_str()], total))
        .collect())
}

/// Occurrences of each tracked word divided by the token count.
pub fn features_mfw(tokens: &[String], words: &WordSet) -> Result<Vec<f64>> {
    Ok(features_mfw_exact(tokens, words)?
        .iter()
        .map(to_f64)
        .collect())
}

/// Rows are documents, columns are named features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Schema(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::Schema(format!(
                "row {bad} has {} values, expected {}",
                rows[bad].len(),
                feature_names.len()
            )));
        }
        Ok(FeatureMatrix {
            feature_names,
            rows,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// CSV with header `label,<feature names...>`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(
            std::iter::once("label").chain(self.feature_names.iter().map(String::as_str)),
        )?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut record = vec![label.clone()];
            record.extend(row.iter().map(|v| v.to_string()));
            out.write_record(&record)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let header = input.headers()?.clone();
        if header.get(0) != Some("label") {
            return Err(Error::Schema("first column must be `label`".into()));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for record in input.records() {
            let record = record?;
            labels.push(record.get(0).unwrap_or_default().to_string());
            let row = record
                .iter()
                .skip(1)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("feature value `{v}` is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::new(names, rows, labels)
    }
}

struct DocumentData {
    census: Option<LabelledCensus>,
    tokens: Vec<String>,
    label: String,
}

/// Per-document networks and censuses computed once, from which feature
/// matrices for any word subset of the precomputed vocabulary are cut.
pub struct FeatureExtractor {
    docs: Vec<DocumentData>,
    vocabulary: Vec<String>,
}

impl FeatureExtractor {
    /// `vocabulary` must cover every word later requested. Censuses are
    /// skipped when `with_networks` is false (MFW only).
    pub fn new(docs: &[Document], vocabulary: &[String], with_networks: bool) -> Self {
        let vocab = Vocabulary::Words(vocabulary.to_vec());
        let data = docs
            .par_iter()
            .map(|doc| DocumentData {
                census: with_networks.then(|| labelled_census(&build_network(&doc.tokens), &vocab)),
                tokens: doc.tokens.clone(),
                label: doc.label.clone(),
            })
            .collect();
        let mut vocabulary = vocabulary.to_vec();
        vocabulary.sort();
        vocabulary.dedup();
        FeatureExtractor {
            docs: data,
            vocabulary,
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.docs.iter().map(|d| d.label.clone()).collect()
    }

    fn value(&self, doc: usize, name: &FeatureName) -> Result<f64> {
        let d = &self.docs[doc];
        match (name.motif, name.orbit) {
            (None, _) => {
                let ws = WordSet {
                    words: vec![name.word.clone()],
                    origin: String::new(),
                };
                Ok(features_mfw(&d.tokens, &ws)?[0])
            }
            (Some(m), orbit) => {
                let census = d.census.as_ref().ok_or_else(|| {
                    Error::Schema("motif features requested from an MFW-only extractor".into())
                })?;
                if !census.tracks(&name.word) {
                    return Err(Error::Schema(format!(
                        "word `{}` was not in the census vocabulary",
                        name.word
                    )));
                }
                let total = census.motif_count(m);
                let count = match orbit {
                    Some(o) => census.word_orbit_count(&name.word, m, o),
                    None => census.word_count(&name.word, m),
                };
                Ok(to_f64(&share(count, total)))
            }
        }
    }

    /// Values of arbitrary named features for every document.
    pub fn columns(&self, names: &[FeatureName]) -> Result<Vec<Vec<f64>>> {
        (0..self.docs.len())
            .map(|i| names.iter().map(|n| self.value(i, n)).collect())
            .collect()
    }

    /// Feature matrix over the documents at `rows`.
    pub fn matrix(
        &self,
        rows: &[usize],
        words: &WordSet,
        version: FeatureVersion,
    ) -> Result<FeatureMatrix> {
        if let Some(w) = words
            .words
            .iter()
            .find(|w| self.vocabulary.binary_search(w).is_err())
        {
            return Err(Error::Schema(format!(
                "word `{w}` is outside the precomputed vocabulary"
            )));
        }
        let mut out = Vec::with_capacity(rows.len());
        for &i in rows {
            let d = &self.docs[i];
            let row = match version {
                FeatureVersion::Mfw => features_mfw(&d.tokens, words)?,
                FeatureVersion::V1 | FeatureVersion::V2 => {
                    let census = d.census.as_ref().ok_or_else(|| {
                        Error::Schema("motif features requested from an MFW-only extractor".into())
                    })?;
                    if version == FeatureVersion::V1 {
                        features_v1(census, words)
                    } else {
                        features_v2(census, words)
                    }
                }
            };
            out.push(row);
        }
        FeatureMatrix::new(
            feature_names(&words.words, version),
            out,
            rows.iter().map(|&i| self.docs[i].label.clone()).collect(),
        )
    }
}
