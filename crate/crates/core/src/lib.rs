//! Labelled network motifs for stylometric text classification.
//!
//! Texts become directed word co-occurrence networks; every connected
//! three-node subgraph is classified into one of 13 motifs, and the share of
//! each motif's instances containing a frequent word (optionally in a
//! specific node position) becomes a feature. The crate also carries the
//! most-frequent-word baseline, four classifiers and a cross-validation
//! harness to compare them.
//!
//! ```
//! use labelled_motifs::{corpus, graph, motifs};
//!
//! let tokens = corpus::normalize_text("NOW, what I want is, Facts.");
//! let network = graph::build_network(&tokens);
//! let census = motifs::labelled_census(&network, &motifs::Vocabulary::All);
//! let path = motifs::MotifId::new(2).unwrap();
//! assert_eq!(census.motif_count(path), 4);
//! ```

pub mod cli;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod features;
pub mod graph;
pub mod learn;
pub mod motifs;

pub use error::{Error, Result};
