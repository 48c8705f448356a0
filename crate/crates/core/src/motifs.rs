//! Directed three-node motifs and labelled triad census.
//!
//! The catalog fixes the 13 weakly connected loop-free digraphs on three
//! nodes, each with a canonical edge set and the automorphism orbits of its
//! local nodes. Enumeration visits every connected node triple of a
//! [`WordNetwork`] once and classifies it by its induced arc set.
//!
//! Local node pairs are encoded as six bits:
//!
//! | bit | 0    | 1    | 2    | 3    | 4    | 5    |
//! |-----|------|------|------|------|------|------|
//! | arc | 0->1 | 1->0 | 0->2 | 2->0 | 1->2 | 2->1 |
//!
//! The canonical code of an arc set is the minimum of that encoding over all
//! six relabellings of the local nodes.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WordNetwork};

pub const MOTIF_COUNT: usize = 13;
/// Orbits summed over all 13 motifs.
pub const ORBIT_TOTAL: usize = 30;
const MAX_ORBITS: usize = 3;

/// Catalog motif number, 1 through 13.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotifId(u8);

impl MotifId {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=MOTIF_COUNT as u8).contains(&id) {
            Ok(MotifId(id))
        } else {
            Err(Error::InvalidArgument(format!(
                "motif id {id} is outside 1..=13"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = MotifId> {
        (1..=MOTIF_COUNT as u8).map(MotifId)
    }

    pub fn entry(self) -> &'static MotifEntry {
        &CATALOG[self.index()]
    }
}

impl fmt::Display for MotifId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Orbit number within a motif, starting at 1. Orbits are numbered by the
/// smallest canonical local node they contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitId(u8);

impl OrbitId {
    pub fn new(id: u8) -> Self {
        assert!(
            (1..=MAX_ORBITS as u8).contains(&id),
            "orbit id {id} out of range"
        );
        OrbitId(id)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for OrbitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
pub struct MotifEntry {
    pub id: MotifId,
    pub name: &'static str,
    /// Canonical arcs over local nodes {0, 1, 2}.
    pub edges: &'static [(u8, u8)],
    /// Orbit number of each canonical local node.
    pub orbit_of: [u8; 3],
    pub orbit_names: &'static [&'static str],
}

impl MotifEntry {
    pub fn orbit_count(&self) -> usize {
        self.orbit_names.len()
    }

    pub fn orbits(&self) -> impl Iterator<Item = OrbitId> {
        (1..=self.orbit_count() as u8).map(OrbitId)
    }

    /// Number of local nodes in `orbit`.
    pub fn orbit_size(&self, orbit: OrbitId) -> usize {
        self.orbit_of.iter().filter(|&&o| o == orbit.0).count()
    }

    pub fn orbit_name(&self, orbit: OrbitId) -> &'static str {
        self.orbit_names[orbit.index()]
    }

    fn code(&self) -> u8 {
        encode(self.edges)
    }
}

macro_rules! motif {
    ($id:expr, $name:expr, [$(($a:expr, $b:expr)),*], $orbits:expr, [$($o:expr),*]) => {
        MotifEntry {
            id: MotifId($id),
            name: $name,
            edges: &[$(($a, $b)),*],
            orbit_of: $orbits,
            orbit_names: &[$($o),*],
        }
    };
}

pub static CATALOG: [MotifEntry; MOTIF_COUNT] = [
    motif!(
        1,
        "out-star",
        [(0, 1), (0, 2)],
        [1, 2, 2],
        ["center", "leaf"]
    ),
    motif!(
        2,
        "path",
        [(0, 1), (1, 2)],
        [1, 2, 3],
        ["source", "central", "sink"]
    ),
    motif!(
        3,
        "in-star",
        [(1, 0), (2, 0)],
        [1, 2, 2],
        ["center", "leaf"]
    ),
    motif!(
        4,
        "mutual pair with incoming arc",
        [(0, 1), (1, 0), (2, 1)],
        [1, 2, 3],
        ["mutual", "mutual-target", "source"]
    ),
    motif!(
        5,
        "mutual pair with outgoing arc",
        [(0, 1), (1, 0), (1, 2)],
        [1, 2, 3],
        ["mutual", "mutual-source", "sink"]
    ),
    motif!(
        6,
        "feed-forward triangle",
        [(0, 1), (1, 2), (0, 2)],
        [1, 2, 3],
        ["source", "middle", "sink"]
    ),
    motif!(
        7,
        "mutual chain",
        [(0, 1), (1, 0), (1, 2), (2, 1)],
        [1, 2, 1],
        ["end", "center"]
    ),
    motif!(
        8,
        "out-star with mutual leaves",
        [(0, 1), (0, 2), (1, 2), (2, 1)],
        [1, 2, 2],
        ["center", "leaf"]
    ),
    motif!(
        9,
        "directed cycle",
        [(0, 1), (1, 2), (2, 0)],
        [1, 1, 1],
        ["any"]
    ),
    motif!(
        10,
        "in-star with mutual leaves",
        [(1, 0), (2, 0), (1, 2), (2, 1)],
        [1, 2, 2],
        ["center", "leaf"]
    ),
    motif!(
        11,
        "cycle with one mutual pair",
        [(0, 1), (1, 0), (1, 2), (2, 0)],
        [1, 2, 3],
        ["mutual-target", "mutual-source", "relay"]
    ),
    motif!(
        12,
        "mutual chain with shortcut",
        [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2)],
        [1, 2, 3],
        ["end-source", "center", "end-sink"]
    ),
    motif!(
        13,
        "fully mutual",
        [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
        [1, 1, 1],
        ["any"]
    ),
];

const PERMUTATIONS: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn arc_bit(a: u8, b: u8) -> u8 {
    match (a, b) {
        (0, 1) => 0,
        (1, 0) => 1,
        (0, 2) => 2,
        (2, 0) => 3,
        (1, 2) => 4,
        (2, 1) => 5,
        _ => unreachable!("arc {a}->{b} is not between distinct local nodes"),
    }
}

const BIT_ARCS: [(u8, u8); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

fn encode(edges: &[(u8, u8)]) -> u8 {
    edges
        .iter()
        .fold(0, |code, &(a, b)| code | 1 << arc_bit(a, b))
}

/// Code of the arc set after sending local node `i` to `perm[i]`.
fn permute_code(code: u8, perm: [u8; 3]) -> u8 {
    BIT_ARCS
        .iter()
        .enumerate()
        .filter(|(bit, _)| code & (1 << bit) != 0)
        .fold(0, |acc, (_, &(a, b))| {
            acc | 1 << arc_bit(perm[a as usize], perm[b as usize])
        })
}

fn canonical_code(code: u8) -> u8 {
    PERMUTATIONS
        .iter()
        .map(|&p| permute_code(code, p))
        .min()
        .unwrap()
}

fn weakly_connected(code: u8) -> bool {
    let touches = |x: u8| {
        BIT_ARCS
            .iter()
            .enumerate()
            .any(|(bit, &(a, b))| code & (1 << bit) != 0 && (a == x || b == x))
    };
    // Arcs touching all three nodes span two distinct pairs.
    (0..3).all(touches)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Classified {
    motif: MotifId,
    orbits: [OrbitId; 3],
}

fn classification_table() -> &'static [Option<Classified>; 64] {
    static TABLE: OnceLock<[Option<Classified>; 64]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let canonical: Vec<u8> = CATALOG.iter().map(|e| canonical_code(e.code())).collect();
        let mut table = [None; 64];
        for code in 0..64u8 {
            if !weakly_connected(code) {
                continue;
            }
            let canon = canonical_code(code);
            let entry = CATALOG
                .iter()
                .zip(&canonical)
                .find(|(_, &c)| c == canon)
                .map(|(e, _)| e)
                .expect("catalog covers every connected triad");
            let perm = PERMUTATIONS
                .iter()
                .copied()
                .find(|&p| permute_code(code, p) == entry.code())
                .expect("isomorphic codes are related by a permutation");
            let orbits = [0, 1, 2].map(|i| OrbitId(entry.orbit_of[perm[i] as usize]));
            table[code as usize] = Some(Classified {
                motif: entry.id,
                orbits,
            });
        }
        table
    })
}

/// Classifies a three-node arc set. Returns the motif and the orbit of each
/// local node 0, 1 and 2.
pub fn canonical_motif_id(edges: &[(u8, u8)]) -> Result<(MotifId, [OrbitId; 3])> {
    for &(a, b) in edges {
        if a > 2 || b > 2 {
            return Err(Error::InvalidTriad(format!(
                "arc {a}->{b} leaves nodes 0..=2"
            )));
        }
        if a == b {
            return Err(Error::InvalidTriad(format!("self-arc on local node {a}")));
        }
    }
    let code = encode(edges);
    classification_table()[code as usize]
        .map(|c| (c.motif, c.orbits))
        .ok_or_else(|| Error::InvalidTriad("arc set does not connect all three nodes".into()))
}

/// Orbit partition of the canonical local nodes of motif `id`.
pub fn orbits_of(id: u8) -> Result<Vec<Vec<u8>>> {
    let entry = MotifId::new(id)?.entry();
    Ok(entry
        .orbits()
        .map(|o| {
            (0..3u8)
                .filter(|&n| entry.orbit_of[n as usize] == o.0)
                .collect()
        })
        .collect())
}

/// One connected node triple of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriadInstance {
    /// Node ids in ascending order.
    pub nodes: [NodeId; 3],
    pub motif: MotifId,
    /// Orbit of each entry of `nodes`.
    pub orbits: [OrbitId; 3],
}

impl TriadInstance {
    pub fn orbit_of(&self, node: NodeId) -> Option<OrbitId> {
        self.nodes
            .iter()
            .position(|&n| n == node)
            .map(|i| self.orbits[i])
    }
}

fn classify(network: &WordNetwork, nodes: [NodeId; 3]) -> TriadInstance {
    let mut code = 0u8;
    for (bit, &(a, b)) in BIT_ARCS.iter().enumerate() {
        if network.has_arc(nodes[a as usize], nodes[b as usize]) {
            code |= 1 << bit;
        }
    }
    let c = classification_table()[code as usize].expect("enumerated triples are connected");
    TriadInstance {
        nodes,
        motif: c.motif,
        orbits: c.orbits,
    }
}

/// Connected triples for which `center` is adjacent to both other nodes.
/// Open triples have a unique such center; closed ones are reported only
/// from their smallest node.
fn triads_at(network: &WordNetwork, center: NodeId) -> impl Iterator<Item = TriadInstance> + '_ {
    let nbrs = network.neighbors(center);
    (0..nbrs.len()).flat_map(move |i| {
        (i + 1..nbrs.len()).filter_map(move |j| {
            let (v, w) = (nbrs[i], nbrs[j]);
            if network.adjacent(v, w) && center > v {
                return None;
            }
            let mut nodes = [center, v, w];
            nodes.sort_unstable();
            Some(classify(network, nodes))
        })
    })
}

/// Every weakly connected induced three-node subgraph, exactly once.
pub fn enumerate_triads(network: &WordNetwork) -> impl Iterator<Item = TriadInstance> + '_ {
    (0..network.node_count() as NodeId).flat_map(move |u| triads_at(network, u))
}

/// Words whose labelled counts should be collected.
#[derive(Debug, Clone)]
pub enum Vocabulary {
    All,
    Words(Vec<String>),
}

type OrbitCounts = [[u64; MAX_ORBITS]; MOTIF_COUNT];

/// Motif counts plus per-word and per-(word, orbit) occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledCensus {
    motif_counts: [u64; MOTIF_COUNT],
    words: Vec<String>,
    index: HashMap<String, usize>,
    word_motif: Vec<[u64; MOTIF_COUNT]>,
    word_orbit: Vec<OrbitCounts>,
}

struct Accumulator {
    motif_counts: [u64; MOTIF_COUNT],
    word_motif: Vec<[u64; MOTIF_COUNT]>,
    word_orbit: Vec<OrbitCounts>,
}

impl Accumulator {
    fn new(tracked: usize) -> Self {
        Accumulator {
            motif_counts: [0; MOTIF_COUNT],
            word_motif: vec![[0; MOTIF_COUNT]; tracked],
            word_orbit: vec![[[0; MAX_ORBITS]; MOTIF_COUNT]; tracked],
        }
    }

    fn add(&mut self, triad: &TriadInstance, slot_of: &[Option<u32>]) {
        let m = triad.motif.index();
        self.motif_counts[m] += 1;
        for (node, orbit) in triad.nodes.iter().zip(triad.orbits) {
            if let Some(slot) = slot_of[*node as usize] {
                self.word_motif[slot as usize][m] += 1;
                self.word_orbit[slot as usize][m][orbit.index()] += 1;
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.motif_counts.iter_mut().zip(other.motif_counts) {
            *a += b;
        }
        for (a, b) in self.word_motif.iter_mut().zip(&other.word_motif) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.word_orbit.iter_mut().zip(&other.word_orbit) {
            for (x, y) in a.iter_mut().flatten().zip(b.iter().flatten()) {
                *x += y;
            }
        }
        self
    }
}

/// Counts motif instances over the whole network and, for each tracked word,
/// the instances containing it, in total and per orbit.
pub fn labelled_census(network: &WordNetwork, vocabulary: &Vocabulary) -> LabelledCensus {
    let words: Vec<String> = match vocabulary {
        Vocabulary::All => network.words().to_vec(),
        Vocabulary::Words(ws) => {
            let mut ws = ws.clone();
            ws.sort();
            ws.dedup();
            ws
        }
    };
    let index: HashMap<String, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let mut slot_of = vec![None; network.node_count()];
    for (slot, w) in words.iter().enumerate() {
        if let Some(node) = network.node(w) {
            slot_of[node as usize] = Some(slot as u32);
        }
    }

    let tracked = words.len();
    let acc = (0..network.node_count() as NodeId)
        .into_par_iter()
        .with_min_len(256)
        .fold(
            || Accumulator::new(tracked),
            |mut acc, u| {
                for triad in triads_at(network, u) {
                    acc.add(&triad, &slot_of);
                }
                acc
            },
        )
        .reduce(|| Accumulator::new(tracked), Accumulator::merge);

    LabelledCensus {
        motif_counts: acc.motif_counts,
        words,
        index,
        word_motif: acc.word_motif,
        word_orbit: acc.word_orbit,
    }
}

impl LabelledCensus {
    /// n_m: instances of `motif` irrespective of labels.
    pub fn motif_count(&self, motif: MotifId) -> u64 {
        self.motif_counts[motif.index()]
    }

    pub fn motif_counts(&self) -> &[u64; MOTIF_COUNT] {
        &self.motif_counts
    }

    /// Tracked words, sorted.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn tracks(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Instances of `motif` containing `word`; 0 for untracked words.
    pub fn word_count(&self, word: &str, motif: MotifId) -> u64 {
        self.index
            .get(word)
            .map_or(0, |&i| self.word_motif[i][motif.index()])
    }

    /// Instances of `motif` with `word` in `orbit`; 0 for untracked words or
    /// orbits the motif does not have.
    pub fn word_orbit_count(&self, word: &str, motif: MotifId, orbit: OrbitId) -> u64 {
        self.index
            .get(word)
            .map_or(0, |&i| self.word_orbit[i][motif.index()][orbit.index()])
    }
}
