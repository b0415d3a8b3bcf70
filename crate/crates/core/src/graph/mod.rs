//! Concept networks: construction from counts, pruning and file forms.

mod cooccurrence;
pub mod io;
mod network;

pub use cooccurrence::{
    cosine_normalize, count_cooccurrences, count_cooccurrences_with, count_documents,
    prune_shared_isolates, read_universe, universe_from_corpus, CooccurrenceCounts, CountOptions,
};
pub use network::{ConceptNetwork, NetworkMeta};
