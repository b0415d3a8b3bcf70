//! Concept co-occurrence networks stratified by journal impact tier: corpus
//! handling, network construction, weighted-network metrics, community
//! detection, rewired null ensembles, threshold decomposition, signed
//! difference networks and distribution fits.

pub mod community;
pub mod corpus;
pub mod decompose;
pub mod diff;
pub mod error;
pub mod fmt;
pub mod graph;
pub mod metrics;
pub mod null_model;
pub mod pipeline;
pub mod stats;
pub mod synth;

pub use corpus::{Concept, ConceptCode, Corpus, CorpusView, DocumentRecord, JournalTierTable, Tier, ViewSelector};
pub use error::{Error, ErrorClass, Result};
pub use graph::{ConceptNetwork, CooccurrenceCounts, NetworkMeta};
