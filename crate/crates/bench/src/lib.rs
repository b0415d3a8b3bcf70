//! Benchmark inputs shared by the kernel benches.

use idnet_core::corpus::{Corpus, JournalTierTable, MultiRankPolicy};
use idnet_core::graph::ConceptNetwork;
use idnet_core::synth::{random_weighted_graph, SyntheticCorpus, FIXTURE_SEED};
use idnet_core::Concept;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random network with link probability `p` and weights uniform in (0.01, 1].
pub fn random_network(n: usize, p: f64, seed: u64) -> ConceptNetwork {
    random_weighted_graph(n, p, 0.01, 1.0, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The synthetic fixture corpus, loaded and ready for views.
pub struct FixtureCorpus {
    pub corpus: Corpus,
    pub table: JournalTierTable,
    pub universe: Vec<Concept>,
}

impl FixtureCorpus {
    pub fn load() -> Self {
        let s = SyntheticCorpus::generate(FIXTURE_SEED);
        let mut corpus = Corpus::new();
        corpus.extend(s.records.iter().cloned());
        let mut table = JournalTierTable::new();
        for (year, journal, pct) in &s.ranking {
            table
                .insert(*year, journal, *pct, MultiRankPolicy::Reject)
                .expect("fixture ranking is consistent");
        }
        FixtureCorpus {
            corpus,
            table,
            universe: s.universe,
        }
    }
}
