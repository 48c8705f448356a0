//! Corpus ingestion: manifests, text normalization, and the chunking,
//! truncation and class-balancing protocols applied before feature
//! extraction.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A labelled token sequence together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub tokens: Vec<String>,
    pub label: String,
    /// Grouping key (for instance the source book) used by group-aware folds.
    pub group: Option<String>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: String,
    pub group: Option<String>,
}

/// Cap on the number of partitions kept for a class, or for one group
/// within a class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quota {
    pub class: String,
    pub group: Option<String>,
    pub count: usize,
}

impl Quota {
    fn matches(&self, entry: &ManifestEntry) -> bool {
        entry.label == self.class
            && match &self.group {
                Some(g) => entry.group.as_deref() == Some(g.as_str()),
                None => true,
            }
    }

    fn key(&self) -> String {
        match &self.group {
            Some(g) => format!("{}/{}", self.class, g),
            None => self.class.clone(),
        }
    }
}

impl fmt::Display for Quota {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.key(), self.count)
    }
}

/// Parses `CLASS=N` or `CLASS/GROUP=N`.
impl FromStr for Quota {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, count) = s
            .rsplit_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("quota `{s}` is not KEY=N")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("quota `{s}` has a non-integer count")))?;
        let (class, group) = match key.split_once('/') {
            Some((c, g)) => (c.trim(), Some(g.trim().to_string())),
            None => (key.trim(), None),
        };
        if class.is_empty() || group.as_deref() == Some("") {
            return Err(Error::InvalidArgument(format!(
                "quota `{s}` has an empty key"
            )));
        }
        Ok(Quota {
            class: class.to_string(),
            group,
            count,
        })
    }
}

/// The list of sources plus the preparation policy applied to them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub chunk_size: Option<usize>,
    pub truncate_to_shortest: bool,
    pub quotas: Vec<Quota>,
}

#[derive(Debug, Deserialize)]
struct ManifestRecord {
    path: String,
    label: String,
    #[serde(default)]
    group: Option<String>,
}

impl Manifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        Manifest {
            entries,
            ..Default::default()
        }
    }

    /// Reads a `path,label,group` CSV. Relative paths are resolved against
    /// the manifest's own directory; the `group` column may be absent or empty.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_csv_str(&text, base)
    }

    pub fn from_csv_str(text: &str, base: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for record in reader.deserialize::<ManifestRecord>() {
            let record = record?;
            let path = PathBuf::from(&record.path);
            let path = if path.is_absolute() {
                path
            } else {
                base.join(path)
            };
            entries.push(ManifestEntry {
                path,
                label: record.label,
                group: record.group.filter(|g| !g.is_empty()),
            });
        }
        let manifest = Manifest::new(entries);
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for entry in &self.entries {
            if entry.label.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "manifest entry {} has an empty label",
                    entry.path.display()
                )));
            }
            if !seen.insert(&entry.path) {
                return Err(Error::InvalidArgument(format!(
                    "manifest path {} listed twice",
                    entry.path.display()
                )));
            }
        }
        if let Some(size) = self.chunk_size {
            if size < 2 {
                return Err(Error::InvalidArgument(format!(
                    "chunk size {size} is below 2"
                )));
            }
        }
        for (i, a) in self.quotas.iter().enumerate() {
            for b in &self.quotas[i + 1..] {
                let overlap = a.class == b.class
                    && (a.group.is_none() || b.group.is_none() || a.group == b.group);
                if overlap {
                    return Err(Error::InvalidArgument(format!(
                        "quotas `{a}` and `{b}` overlap"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() && !c.is_numeric()
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}')
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    while current.ends_with('\'') {
        current.pop();
    }
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
    current.clear();
}

/// Lower-cases `raw` and splits it into word tokens.
///
/// A token is a maximal run of letters. An apostrophe survives only between
/// two letters (`don't`) and is stored as ASCII `'`. Digits, punctuation,
/// hyphens and whitespace all separate tokens and are dropped.
pub fn normalize_text(raw: &str) -> Vec<String> {
    let chars: Vec<char> = raw.nfc().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if is_word_char(c) {
            current.extend(c.to_lowercase().filter(|&l| is_word_char(l)));
        } else if is_apostrophe(c)
            && !current.is_empty()
            && i > 0
            && is_word_char(chars[i - 1])
            && chars.get(i + 1).is_some_and(|&n| is_word_char(n))
        {
            current.push('\'');
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

/// Splits `tokens` into consecutive windows of exactly `size` tokens. A
/// trailing remainder shorter than `size` is dropped.
pub fn chunk_tokens<T: Clone>(tokens: &[T], size: usize) -> Result<Vec<Vec<T>>> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!(
            "chunk size {size} is below 2"
        )));
    }
    Ok(tokens.chunks_exact(size).map(<[T]>::to_vec).collect())
}

struct Partition {
    entry: usize,
    index: usize,
    tokens: Vec<String>,
}

/// Loads every manifest source and applies, in order: normalization,
/// optional truncation to the shortest source, optional chunking and the
/// per-class quotas. Output follows manifest order, then chunk order.
pub fn prepare_dataset(manifest: &Manifest, seed: u64) -> Result<Vec<Document>> {
    manifest.validate()?;

    let mut sources: Vec<Vec<String>> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            fs::read_to_string(&entry.path)
                .map(|raw| normalize_text(&raw))
                .map_err(|e| Error::io(&entry.path, e))
        })
        .collect::<Result<_>>()?;

    if manifest.truncate_to_shortest {
        if let Some(shortest) = sources.iter().map(Vec::len).min() {
            for tokens in &mut sources {
                tokens.truncate(shortest);
            }
        }
    }

    let mut partitions = Vec::new();
    for (entry, tokens) in sources.into_iter().enumerate() {
        match manifest.chunk_size {
            Some(size) => {
                for (index, chunk) in chunk_tokens(&tokens, size)?.into_iter().enumerate() {
                    partitions.push(Partition {
                        entry,
                        index,
                        tokens: chunk,
                    });
                }
            }
            None => partitions.push(Partition {
                entry,
                index: 0,
                tokens,
            }),
        }
    }

    let keep = apply_quotas(manifest, &partitions, seed)?;

    let chunked = manifest.chunk_size.is_some();
    Ok(partitions
        .into_iter()
        .zip(keep)
        .filter(|(_, keep)| *keep)
        .map(|(p, _)| {
            let entry = &manifest.entries[p.entry];
            let source = if chunked {
                format!("{}#{}", entry.path.display(), p.index)
            } else {
                entry.path.display().to_string()
            };
            Document {
                tokens: p.tokens,
                label: entry.label.clone(),
                group: entry.group.clone(),
                source,
            }
        })
        .collect())
}

fn apply_quotas(manifest: &Manifest, partitions: &[Partition], seed: u64) -> Result<Vec<bool>> {
    let mut keep = vec![true; partitions.len()];
    if manifest.quotas.is_empty() {
        return Ok(keep);
    }

    let mut by_entry: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in partitions.iter().enumerate() {
        by_entry.entry(p.entry).or_default().push(i);
    }

    let mut quotas: Vec<&Quota> = manifest.quotas.iter().collect();
    quotas.sort_by(|a, b| (&a.class, &a.group).cmp(&(&b.class, &b.group)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for quota in quotas {
        let mut sources: Vec<usize> = manifest
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| quota.matches(e))
            .map(|(i, _)| i)
            .collect();
        sources.shuffle(&mut rng);

        let candidates: Vec<usize> = sources
            .iter()
            .flat_map(|s| by_entry.get(s).into_iter().flatten().copied())
            .collect();
        if candidates.len() < quota.count {
            return Err(Error::InsufficientData {
                class: quota.key(),
                requested: quota.count,
                available: candidates.len(),
            });
        }
        for (rank, &p) in candidates.iter().enumerate() {
            keep[p] = rank < quota.count;
        }
    }
    Ok(keep)
}
