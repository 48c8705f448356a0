//! Directed word co-occurrence networks.
//!
//! Every distinct word becomes a node and every pair of adjacent tokens
//! `a b` with `a != b` contributes the arc `a -> b`. Arcs carry no weight.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Immutable directed simple graph over distinct words.
#[derive(Debug, Clone, Default)]
pub struct WordNetwork {
    words: Vec<String>,
    index: HashMap<String, NodeId>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    support: Vec<Vec<NodeId>>,
    arc_count: usize,
}

impl WordNetwork {
    /// Builds a network from explicit words and arcs. Duplicate arcs are
    /// merged; self-arcs, unknown node ids and repeated words are rejected.
    pub fn from_parts(
        words: Vec<String>,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as NodeId).is_some() {
                return Err(Error::InvalidArgument(format!("word `{w}` appears twice")));
            }
        }
        let n = words.len();
        let mut seen = HashSet::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (s, t) in arcs {
            if s as usize >= n || t as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "arc {s}->{t} references a node outside 0..{n}"
                )));
            }
            if s == t {
                return Err(Error::InvalidArgument(format!(
                    "self-arc on `{}`",
                    words[s as usize]
                )));
            }
            if seen.insert((s, t)) {
                out_adj[s as usize].push(t);
                in_adj[t as usize].push(s);
            }
        }
        let mut support = vec![Vec::new(); n];
        for v in 0..n {
            out_adj[v].sort_unstable();
            in_adj[v].sort_unstable();
            let mut both: Vec<NodeId> = out_adj[v].iter().chain(&in_adj[v]).copied().collect();
            both.sort_unstable();
            both.dedup();
            support[v] = both;
        }
        Ok(WordNetwork {
            words,
            index,
            out_adj,
            in_adj,
            support,
            arc_count: seen.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, node: NodeId) -> &str {
        &self.words[node as usize]
    }

    pub fn node(&self, word: &str) -> Option<NodeId> {
        self.index.get(word).copied()
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.out_adj[node as usize]
    }

    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        &self.in_adj[node as usize]
    }

    /// Neighbours in the undirected support graph, ascending.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.support[node as usize]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_adj[node as usize].len()
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.in_adj[node as usize].len()
    }

    pub fn has_arc(&self, source: NodeId, target: NodeId) -> bool {
        self.out_adj[source as usize].binary_search(&target).is_ok()
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.support[a as usize].binary_search(&b).is_ok()
    }

    /// All arcs ordered by (source id, target id).
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s as NodeId, t)))
    }

    /// Arcs as word pairs; isomorphic networks with equal words compare equal.
    pub fn word_arcs(&self) -> HashSet<(&str, &str)> {
        self.arcs()
            .map(|(s, t)| (self.word(s), self.word(t)))
            .collect()
    }

    /// One `source<TAB>target` line per arc in id order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (s, t) in self.arcs() {
            let _ = writeln!(out, "{}\t{}", self.word(s), self.word(t));
        }
        out
    }

    /// Parses the format written by [`WordNetwork::to_edge_list`]. Node ids
    /// follow first appearance; blank lines are skipped.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut words = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut intern = |w: &str| -> NodeId {
            if let Some(&id) = index.get(w) {
                return id;
            }
            let id = words.len() as NodeId;
            words.push(w.to_string());
            index.insert(w.to_string(), id);
            id
        };
        let mut arcs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(s), Some(t), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!(
                    "edge list line {}: expected `source<TAB>target`",
                    lineno + 1
                )));
            };
            if s.is_empty() || t.is_empty() {
                return Err(Error::Parse(format!(
                    "edge list line {}: empty word",
                    lineno + 1
                )));
            }
            arcs.push((intern(s), intern(t)));
        }
        Self::from_parts(words, arcs)
    }
}

/// Builds the co-occurrence network of a token stream. Node ids follow
/// first occurrence; immediate repetitions produce no self-arc.
pub fn build_network<S: AsRef<str>>(tokens: &[S]) -> WordNetwork {
    let mut words: Vec<String> = Vec::new();
    let mut index: HashMap<&str, NodeId> = HashMap::new();
    let mut ids = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let tok = tok.as_ref();
        let id = *index.entry(tok).or_insert_with(|| {
            words.push(tok.to_string());
            (words.len() - 1) as NodeId
        });
        ids.push(id);
    }
    let arcs: Vec<(NodeId, NodeId)> = ids
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[0], w[1]))
        .collect();
    WordNetwork::from_parts(words, arcs).expect("tokens yield a valid network")
}
