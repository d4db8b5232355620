//! Builds a commonsense conversation knowledge graph from pre-parsed,
//! emotion/intent-annotated two-party conversations and an ATOMIC-style
//! triple store.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! 1. [`corpus`] loads conversations and their CoNLL-U dependency parses.
//! 2. [`extract`] pulls event mentions out of each sub-utterance
//!    (verb-driven and adjective-driven clauses, with recursive
//!    decomposition), plus the POS-template and punctuation-only baselines.
//! 3. [`link`] matches mentions and concept words to KB heads by embedding
//!    cosine similarity.
//! 4. [`edges`] turns linked conversations into event-flow, concept-flow,
//!    emotion-cause and emotion-intent edges.
//! 5. [`graph`] merges KB triples and flow edges into one queryable store
//!    with statistics, BFS metrics, scenario subgraphs and serialization.
//!
//! [`eval`] and [`tasks`] measure matching quality and drive the
//! knowledge-grounded emotion/intent classification benchmarks. [`edit`]
//! holds the audited, versioned graph mutations behind the annotation
//! service.

pub mod corpus;
pub mod edges;
pub mod edit;
pub mod error;
pub mod eval;
pub mod extract;
pub mod graph;
pub mod io;
pub mod kb;
pub mod labels;
pub mod link;
pub mod tasks;

pub use error::{ClientError, Error, Result};
pub use labels::{EmotionLabel, IntentLabel};
