mod common;

use std::fs;

use common::fixture_dir;
use idnet_core::synth::{SyntheticCorpus, FIXTURE_SEED};

/// The bundled synthetic corpus is exactly what the generator produces.
/// Run with `IDNET_BLESS=1` to rewrite the files.
#[test]
fn bundled_fixture_matches_generator() {
    let s = SyntheticCorpus::generate(FIXTURE_SEED);
    let dir = fixture_dir();
    let files = [
        ("corpus.tsv", s.corpus_tsv()),
        ("ranking.tsv", s.ranking_tsv()),
        ("concepts.tsv", s.concepts_tsv()),
        ("ledger.json", s.ledger_json()),
    ];
    let bless = std::env::var_os("IDNET_BLESS").is_some();
    for (name, body) in files {
        let path = dir.join(name);
        if bless {
            fs::write(&path, &body).unwrap();
        }
        let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(on_disk == body, "{name} differs from generator output; rerun with IDNET_BLESS=1");
    }
}
