//! Test-only oracles and generators, independent of the enumeration and
//! lookup-table code paths they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use labelled_motifs::features::FeatureMatrix;
use labelled_motifs::graph::WordNetwork;
use labelled_motifs::motifs::CATALOG;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const HARD_TIMES: &str =
    "NOW, what I want is, Facts.  Teach these\nboys and girls nothing but Facts.";

pub const HARD_TIMES_TOKENS: [&str; 14] = [
    "now", "what", "i", "want", "is", "facts", "teach", "these", "boys", "and", "girls", "nothing",
    "but", "facts",
];

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn same_arcs(a: &[(usize, usize)], b: &[(u8, u8)]) -> bool {
    a.len() == b.len() && a.iter().all(|&(x, y)| b.contains(&(x as u8, y as u8)))
}

fn connected(arcs: &[(usize, usize)]) -> bool {
    let mut reach = [true, false, false];
    for _ in 0..2 {
        for &(a, b) in arcs {
            if reach[a] || reach[b] {
                reach[a] = true;
                reach[b] = true;
            }
        }
    }
    reach.iter().all(|&r| r)
}

/// Motif id and per-local-node orbit of a three-node arc set, found by
/// matching against every catalog entry under every relabelling.
pub fn classify_by_search(arcs: &[(usize, usize)]) -> Option<(u8, [u8; 3])> {
    if !connected(arcs) {
        return None;
    }
    for entry in &CATALOG {
        for p in PERMS {
            let mapped: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (p[a], p[b])).collect();
            if same_arcs(&mapped, entry.edges) {
                return Some((entry.id.get(), [0, 1, 2].map(|i| entry.orbit_of[p[i]])));
            }
        }
    }
    panic!("catalog misses a connected triad: {arcs:?}");
}

/// (sorted node triple) -> (motif, orbit of each node in the triple).
pub type TriadMap = BTreeMap<[u32; 3], (u8, [u8; 3])>;

/// All connected triples by checking every unordered triple.
pub fn oracle_triads(g: &WordNetwork) -> TriadMap {
    let n = g.node_count() as u32;
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nodes = [i, j, k];
                let mut arcs = Vec::new();
                for a in 0..3 {
                    for b in 0..3 {
                        if a != b && g.has_arc(nodes[a], nodes[b]) {
                            arcs.push((a, b));
                        }
                    }
                }
                if let Some(c) = classify_by_search(&arcs) {
                    out.insert(nodes, c);
                }
            }
        }
    }
    out
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct OracleCensus {
    pub motif: [u64; 13],
    /// (word, motif) -> count
    pub word_motif: HashMap<(String, u8), u64>,
    /// (word, motif, orbit) -> count
    pub word_orbit: HashMap<(String, u8, u8), u64>,
}

pub fn oracle_census(g: &WordNetwork) -> OracleCensus {
    let mut c = OracleCensus::default();
    for (nodes, (m, orbits)) in oracle_triads(g) {
        c.motif[m as usize - 1] += 1;
        for (node, o) in nodes.iter().zip(orbits) {
            let w = g.word(*node).to_string();
            *c.word_motif.entry((w.clone(), m)).or_default() += 1;
            *c.word_orbit.entry((w, m, o)).or_default() += 1;
        }
    }
    c
}

/// Random digraph on `n` nodes named `w0..`, each ordered pair present with
/// probability `density`.
pub fn random_digraph(seed: u64, n: usize, density: f64) -> WordNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let mut arcs = Vec::new();
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s != t && rng.random::<f64>() < density {
                arcs.push((s, t));
            }
        }
    }
    WordNetwork::from_parts(words, arcs).unwrap()
}

/// Four well-separated 2-D Gaussian classes: centres 10 apart, unit spread.
pub fn blobs(seed: u64, per_class: usize) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let centres = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, (cx, cy)) in centres.iter().enumerate() {
        for _ in 0..per_class {
            rows.push(vec![
                cx + noise.sample(&mut rng),
                cy + noise.sample(&mut rng),
            ]);
            labels.push(format!("class{c}"));
        }
    }
    FeatureMatrix::new(vec!["x".into(), "y".into()], rows, labels).unwrap()
}

/// Zipf-distributed word stream over a vocabulary of `vocab` synthetic words.
pub fn zipf_tokens(seed: u64, len: usize, vocab: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = rand_distr::Zipf::new(vocab as f64, 1.0).unwrap();
    (0..len)
        .map(|_| format!("w{}", zipf.sample(&mut rng) as usize))
        .collect()
}

/// A letters-only word for index `i`, so tokenization keeps it intact.
pub fn letter_word(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return s;
        }
    }
}

/// Writes a two-author corpus into `dir` and returns the manifest path.
/// Both authors draw 600 words from one Zipf law over a 60-word vocabulary,
/// but rank the vocabulary in opposite orders.
pub fn write_corpus(dir: &std::path::Path, per_author: usize) -> String {
    let zipf = rand_distr::Zipf::new(60.0, 1.1).unwrap();
    let mut manifest = String::from("path,label\n");
    for (a, author) in ["ann", "bob"].iter().enumerate() {
        for b in 0..per_author {
            let mut rng = ChaCha8Rng::seed_from_u64((a * 100 + b) as u64);
            let text: Vec<String> = (0..600)
                .map(|_| {
                    let r = zipf.sample(&mut rng) as usize;
                    letter_word(if a == 0 { r } else { 61 - r })
                })
                .collect();
            let name = format!("{author}{b}.txt");
            std::fs::write(dir.join(&name), text.join(" ")).unwrap();
            manifest.push_str(&format!("{name},{author}\n"));
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).unwrap();
    path.to_str().unwrap().to_string()
}
