mod common;

use std::collections::BTreeSet;

use common::random_graph;
use idnet_core::community::eval_modularity;
use idnet_core::corpus::{Corpus, DocumentRecord, JournalTierTable, MultiRankPolicy, Tier, ViewSelector};
use idnet_core::decompose::{default_grid, lcc_curve};
use idnet_core::diff::signed_difference;
use idnet_core::graph::ConceptNetwork;
use idnet_core::metrics::{aspl, betweenness, gcc, mean_strength, strength_assortativity, ComponentMode};
use idnet_core::null_model::{ensemble_band, rewire, EnsembleSpec, RewireMode};
use idnet_core::stats::log_binned_histogram;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, seed: u64, dyadic: bool) -> ConceptNetwork {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, dyadic)
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn same_result(a: idnet_core::Result<f64>, b: idnet_core::Result<f64>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => near(x, y),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

fn sorted_bits(g: &ConceptNetwork) -> Vec<u64> {
    let mut w: Vec<u64> = g.pair_weights().iter().map(|x| x.to_bits()).collect();
    w.sort_unstable();
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_are_permutation_equivariant(n in 3usize..12, seed: u64, dyadic: bool) {
        let g = graph(n, seed, dyadic);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let h = g.permuted(&perm);

        prop_assert!(same_result(mean_strength(&g), mean_strength(&h)));
        prop_assert!(same_result(gcc(&g), gcc(&h)));
        prop_assert!(same_result(strength_assortativity(&g), strength_assortativity(&h)));
        prop_assert!(same_result(aspl(&g, ComponentMode::All).map(|a| a.value), aspl(&h, ComponentMode::All).map(|a| a.value)));
        let (bg, bh) = (betweenness(&g), betweenness(&h));
        for k in 0..n {
            prop_assert!(near(bh[k], bg[perm[k]]), "node {k}: {} vs {}", bh[k], bg[perm[k]]);
            prop_assert!(near(h.strength(k), g.strength(perm[k])));
        }
        if g.edge_count() > 0 {
            let c: Vec<usize> = (0..n).map(|i| i % 3).collect();
            let ch: Vec<usize> = perm.iter().map(|&p| c[p]).collect();
            prop_assert!(near(eval_modularity(&g, &c).unwrap(), eval_modularity(&h, &ch).unwrap()));
        }
    }

    #[test]
    fn metrics_scale_covariantly(n in 3usize..12, seed: u64, dyadic: bool, c in 0.1f64..10.0) {
        let g = graph(n, seed, dyadic);
        let h = g.scaled(c);
        for i in 0..n {
            prop_assert!(near(h.strength(i), c * g.strength(i)));
        }
        prop_assert!(same_result(gcc(&g), gcc(&h)));
        prop_assert!(same_result(strength_assortativity(&g), strength_assortativity(&h)));
        prop_assert!(same_result(
            aspl(&g, ComponentMode::All).map(|a| a.value / c),
            aspl(&h, ComponentMode::All).map(|a| a.value)
        ));
        let (bg, bh) = (betweenness(&g), betweenness(&h));
        for k in 0..n {
            prop_assert!(near(bg[k], bh[k]));
        }
        if g.edge_count() > 0 {
            let part: Vec<usize> = (0..n).map(|i| i % 2).collect();
            prop_assert!(near(eval_modularity(&g, &part).unwrap(), eval_modularity(&h, &part).unwrap()));
        }
    }

    #[test]
    fn rewiring_conserves_weight_multiset(n in 2usize..25, seed: u64, dyadic: bool, swaps in 0usize..500, existing: bool) {
        let g = graph(n, seed, dyadic);
        let mode = if existing { RewireMode::ExistingLinks } else { RewireMode::AllPairs };
        match rewire(&g, swaps, seed, mode) {
            Ok(h) => {
                prop_assert_eq!(sorted_bits(&g), sorted_bits(&h));
                prop_assert_eq!(mean_strength(&g).unwrap().to_bits(), mean_strength(&h).unwrap().to_bits());
                if existing {
                    let links = |x: &ConceptNetwork| x.edges().map(|(i, j, _)| (i, j)).collect::<BTreeSet<_>>();
                    prop_assert_eq!(links(&g), links(&h));
                }
            }
            // too few candidate pairs to swap
            Err(_) => prop_assert!(swaps > 0 && (existing && g.edge_count() < 2 || n < 3)),
        }
    }

    #[test]
    fn band_lies_within_replicates(n in 4usize..15, seed: u64, replicates in 1usize..30) {
        let g = graph(n, seed, false);
        let grid = match default_grid(&g, 50) {
            Ok(grid) => grid,
            Err(_) => return Ok(()),
        };
        let spec = EnsembleSpec { replicates, seed, ..EnsembleSpec::default() };
        let e = ensemble_band(&g, &spec, |h| Ok(lcc_curve(h, &grid)?.into_iter().map(|s| s as f64).collect())).unwrap();
        for k in 0..grid.len() {
            let col: Vec<f64> = e.observations.iter().map(|(_, o)| o[k]).collect();
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= e.band.lower[k] && e.band.lower[k] <= e.band.upper[k] && e.band.upper[k] <= hi);
            prop_assert!(lo - 1e-9 <= e.band.mean[k] && e.band.mean[k] <= hi + 1e-9);
        }
    }

    #[test]
    fn lcc_curve_is_non_increasing(n in 2usize..30, seed: u64, dyadic: bool) {
        let g = graph(n, seed, dyadic);
        if let Ok(grid) = default_grid(&g, 100) {
            let curve = lcc_curve(&g, &grid).unwrap();
            prop_assert!(curve.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(*curve.last().unwrap(), 1);
        }
    }

    #[test]
    fn difference_reconstructs_and_is_antisymmetric(n in 2usize..20, seed: u64, normalize: bool) {
        let a = graph(n, seed, false);
        let b = graph(n, seed ^ 0xabc, false);
        prop_assume!(a.edge_count() > 0 && b.edge_count() > 0);
        let ab = signed_difference(&a, &b, false).unwrap();
        let ba = signed_difference(&b, &a, false).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((ab.value(i, j) - (a.weight(i, j) - b.weight(i, j))).abs() <= 1e-12);
                prop_assert_eq!(ab.positive.weight(i, j).to_bits(), ba.negative.weight(i, j).to_bits());
                prop_assert_eq!(ab.negative.weight(i, j).to_bits(), ba.positive.weight(i, j).to_bits());
            }
        }
        if normalize {
            let nd = signed_difference(&a, &b, true).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(nd.value(i, j).signum(), ab.value(i, j).signum());
                }
            }
        }
    }

    #[test]
    fn histogram_mass_is_one(samples in prop::collection::vec(1e-4f64..1e3, 1..400), bins in 1usize..40) {
        let h = log_binned_histogram(&samples, bins, None).unwrap();
        prop_assert!((h.mass() - 1.0).abs() <= 1e-9, "mass {}", h.mass());
        prop_assert_eq!(h.counts.iter().sum::<usize>(), samples.len());
    }

    #[test]
    fn month_views_partition_the_year(seed: u64, docs in 1usize..200) {
        let (corpus, table) = random_corpus(seed, docs);
        for tier in [Tier::I, Tier::NI] {
            let year = corpus.view(&table, 0.10, ViewSelector::new(tier, 2000, None)).unwrap();
            let whole: BTreeSet<&str> = year.iter().map(|d| d.doc_id.as_str()).collect();
            let mut parts = BTreeSet::new();
            let mut total = 0;
            for m in 1..=12 {
                let v = corpus.view(&table, 0.10, ViewSelector::new(tier, 2000, Some(m))).unwrap();
                total += v.count();
                parts.extend(v.iter().map(|d| d.doc_id.as_str()));
            }
            prop_assert_eq!(total, whole.len());
            prop_assert_eq!(parts, whole);
        }
    }

    #[test]
    fn ingest_is_idempotent(seed: u64, docs in 1usize..100) {
        let (corpus, _) = random_corpus(seed, docs);
        let text: String = corpus.records().map(|r| r.to_line() + "\n").collect();
        let mut again = Corpus::new();
        let first = again.ingest(text.as_bytes(), "mem").unwrap();
        let second = again.ingest(text.as_bytes(), "mem").unwrap();
        prop_assert_eq!(first.accepted, corpus.len());
        prop_assert_eq!(second.accepted, 0);
        prop_assert_eq!(second.duplicates, corpus.len());
        let a: Vec<_> = corpus.records().collect();
        let b: Vec<_> = again.records().collect();
        prop_assert_eq!(a, b);
    }
}

fn random_corpus(seed: u64, docs: usize) -> (Corpus, JournalTierTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranking = String::from("year\tjournal_id\tpercentile\n");
    for k in 0..6 {
        ranking.push_str(&format!("2000\tJ{k}\t{}\n", 0.05 + 0.1 * k as f64));
    }
    let table = JournalTierTable::read(ranking.as_bytes(), "mem", MultiRankPolicy::Reject).unwrap();
    let mut corpus = Corpus::new();
    let records = (0..docs).map(|d| {
        let concepts = (0..rng.random_range(1..4))
            .map(|_| format!("C0{}.{}", rng.random_range(1..4), rng.random_range(100..105)))
            .collect::<Vec<_>>()
            .join(",");
        // journal J6 is unranked
        let line = format!("D{d:04}\t2000\t{}\tJ{}\t{concepts}", rng.random_range(1..=12), rng.random_range(0..7));
        DocumentRecord::parse_line(&line).unwrap()
    });
    corpus.extend(records.collect::<Vec<_>>());
    (corpus, table)
}
