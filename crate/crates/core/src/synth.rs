//! Seeded synthetic data: a small stratified corpus with its own ledger of
//! expected counts, and weighted-graph fixtures with planted structure.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Concept, ConceptCode, DocumentRecord, Tier, DEFAULT_MONTH};
use crate::fmt::num;
use crate::graph::ConceptNetwork;

pub const FIXTURE_SEED: u64 = 20_240_601;

/// Uniform weights in `[lo, hi]` on each pair with probability `p`.
pub fn random_weighted_graph<R: Rng>(n: usize, p: f64, lo: f64, hi: f64, rng: &mut R) -> ConceptNetwork {
    let mut g = ConceptNetwork::anonymous(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.set_weight(i, j, rng.random_range(lo..=hi));
            }
        }
    }
    g
}

/// `blocks` groups of near-equal size over `n` nodes; pairs link with
/// probability `p_in` inside a block and `p_out` across, weights uniform in
/// `[0.5, 1]`. Returns the network and the planted block of each node.
pub fn planted_partition(n: usize, blocks: usize, p_in: f64, p_out: f64, seed: u64) -> (ConceptNetwork, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<usize> = (0..n).map(|i| i * blocks / n).collect();
    let mut g = ConceptNetwork::anonymous(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if truth[i] == truth[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                g.set_weight(i, j, rng.random_range(0.5..=1.0));
            }
        }
    }
    (g, truth)
}

/// Every pair linked: weight `w_in` inside a block, `w_out` across.
pub fn planted_weights(n: usize, blocks: usize, w_in: f64, w_out: f64) -> (ConceptNetwork, Vec<usize>) {
    let truth: Vec<usize> = (0..n).map(|i| i * blocks / n).collect();
    let mut g = ConceptNetwork::anonymous(n);
    for i in 0..n {
        for j in (i + 1)..n {
            g.set_weight(i, j, if truth[i] == truth[j] { w_in } else { w_out });
        }
    }
    (g, truth)
}

/// Core-periphery fixture and where its pieces live.
#[derive(Debug, Clone)]
pub struct CorePeriphery {
    pub net: ConceptNetwork,
    /// Nodes of the strong central clique.
    pub core: Vec<usize>,
    /// Node lists of the satellite cliques.
    pub satellites: Vec<Vec<usize>>,
}

/// A strong clique (weights in `[0.75, 0.9]`), satellite cliques of
/// moderate weight (`[0.3, 0.6]`) and weak links (`[0.005, 0.08]`) tying
/// every satellite node to one or two core nodes. Thresholding strips the
/// weak fringe first, so the LCC collapses far faster than under rewiring.
pub fn core_periphery(core_size: usize, satellites: usize, satellite_size: usize, seed: u64) -> CorePeriphery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = core_size + satellites * satellite_size;
    let mut g = ConceptNetwork::anonymous(n);
    let core: Vec<usize> = (0..core_size).collect();
    for a in 0..core_size {
        for b in (a + 1)..core_size {
            g.set_weight(a, b, rng.random_range(0.75..=0.9));
        }
    }
    let mut sats = Vec::with_capacity(satellites);
    for s in 0..satellites {
        let start = core_size + s * satellite_size;
        let members: Vec<usize> = (start..start + satellite_size).collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                g.set_weight(a, b, rng.random_range(0.3..=0.6));
            }
            let links = rng.random_range(1..=2);
            for _ in 0..links {
                let c = rng.random_range(0..core_size);
                g.set_weight(a, c, rng.random_range(0.005..=0.08));
            }
        }
        sats.push(members);
    }
    CorePeriphery {
        net: g,
        core,
        satellites: sats,
    }
}

/// Planned document counts for one year.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct YearPlan {
    pub year: i32,
    pub tier_i: usize,
    pub tier_ni: usize,
    /// NI documents published in June (part of `tier_ni`).
    pub ni_june: usize,
    /// Documents from journals missing from the ranking table.
    pub unranked: usize,
    /// NI documents indexing only the solo concept (part of `tier_ni`).
    pub solo: usize,
}

pub const DEFAULT_PLAN: [YearPlan; 3] = [
    YearPlan { year: 1999, tier_i: 120, tier_ni: 520, ni_june: 137, unranked: 20, solo: 3 },
    YearPlan { year: 2010, tier_i: 125, tier_ni: 525, ni_june: 130, unranked: 20, solo: 3 },
    YearPlan { year: 2022, tier_i: 130, tier_ni: 520, ni_june: 128, unranked: 20, solo: 3 },
];

const CATEGORIES: [&str; 8] = ["A01", "B01", "C04", "C10", "C23", "D12", "E05", "F03"];
const PER_CATEGORY: usize = 8;
const UNUSED: [&str; 4] = ["G01.100", "G01.200", "G01.300", "G01.400"];
const SOLO: &str = "H02.100";

/// Expected counts written by the generator, checked against ingest and views.
#[derive(Debug, Clone, Serialize)]
pub struct Ledger {
    pub total: usize,
    pub per_year: BTreeMap<i32, usize>,
    /// Keys like `I_1999`, `NI_1999`, `NI-June_1999`.
    pub per_view: BTreeMap<String, usize>,
    pub unranked: BTreeMap<i32, usize>,
    pub universe: usize,
    /// Concepts isolated in every network of the study.
    pub isolated: Vec<String>,
    pub kept_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub records: Vec<DocumentRecord>,
    /// `(year, journal, percentile)`.
    pub ranking: Vec<(i32, String, f64)>,
    pub universe: Vec<Concept>,
    pub ledger: Ledger,
}

fn journal(k: usize) -> String {
    format!("J{k:03}")
}

fn concept_codes() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for cat in CATEGORIES {
        for k in 0..PER_CATEGORY {
            out.push((format!("{cat}.{}", 100 + 37 * k), format!("{cat} topic {k}")));
        }
    }
    for code in UNUSED {
        out.push((code.to_string(), "unused topic".to_string()));
    }
    out.push((SOLO.to_string(), "solo topic".to_string()));
    out.sort();
    out
}

impl SyntheticCorpus {
    pub fn generate(seed: u64) -> Self {
        Self::with_plan(seed, &DEFAULT_PLAN)
    }

    pub fn with_plan(seed: u64, plan: &[YearPlan]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let universe: Vec<Concept> = concept_codes()
            .into_iter()
            .map(|(c, l)| Concept {
                code: ConceptCode::new(&c).expect("valid fixture code"),
                label: l,
            })
            .collect();
        // journals 1..=5 are top tier (5 sits exactly on the cutoff), 6..=36
        // the rest, 37..=40 unranked; journal 6 climbs into the top tier in
        // the last planned year
        let mut ranking = Vec::new();
        for (y, p) in plan.iter().enumerate() {
            let last = y + 1 == plan.len();
            for k in 1..=36 {
                let pct = match k {
                    1..=4 => k as f64 / 100.0,
                    5 => 0.10,
                    6 if last => 0.08,
                    _ => 0.11 + (k - 6) as f64 * 0.028,
                };
                ranking.push((p.year, journal(k), pct));
            }
        }

        let by_category: Vec<Vec<ConceptCode>> = CATEGORIES
            .iter()
            .map(|cat| {
                (0..PER_CATEGORY)
                    .map(|k| ConceptCode::new(&format!("{cat}.{}", 100 + 37 * k)).unwrap())
                    .collect()
            })
            .collect();
        let solo = ConceptCode::new(SOLO).unwrap();

        let mut records = Vec::new();
        let mut per_year = BTreeMap::new();
        let mut per_view = BTreeMap::new();
        let mut unranked = BTreeMap::new();
        for (y, p) in plan.iter().enumerate() {
            let last = y + 1 == plan.len();
            let top: Vec<usize> = if last { (1..=6).collect() } else { (1..=5).collect() };
            let rest: Vec<usize> = ((if last { 7 } else { 6 })..=36).collect();
            let mut serial = 0usize;
            let mut push = |tier: Option<Tier>, month: u8, concepts: BTreeSet<ConceptCode>, rng: &mut ChaCha8Rng| {
                serial += 1;
                let j = match tier {
                    Some(Tier::I) => top[rng.random_range(0..top.len())],
                    Some(Tier::NI) => rest[rng.random_range(0..rest.len())],
                    None => rng.random_range(37..=40),
                };
                records.push(DocumentRecord {
                    doc_id: format!("S{}-{serial:05}", p.year),
                    year: p.year,
                    month,
                    journal_id: journal(j),
                    concepts,
                });
            };
            for k in 0..p.tier_i {
                let c = draw_concepts(&by_category, 0.45, &mut rng);
                push(Some(Tier::I), (k % 12) as u8 + 1, c, &mut rng);
            }
            let other_months: Vec<u8> = (1..=12).filter(|&m| m != DEFAULT_MONTH).collect();
            for k in 0..p.tier_ni {
                let month = if k < p.ni_june {
                    DEFAULT_MONTH
                } else {
                    other_months[(k - p.ni_june) % other_months.len()]
                };
                let c = if k >= p.tier_ni - p.solo {
                    BTreeSet::from([solo.clone()])
                } else {
                    draw_concepts(&by_category, 0.25, &mut rng)
                };
                push(Some(Tier::NI), month, c, &mut rng);
            }
            for k in 0..p.unranked {
                let c = draw_concepts(&by_category, 0.3, &mut rng);
                push(None, (k % 12) as u8 + 1, c, &mut rng);
            }
            per_year.insert(p.year, p.tier_i + p.tier_ni + p.unranked);
            per_view.insert(format!("I_{}", p.year), p.tier_i);
            per_view.insert(format!("NI_{}", p.year), p.tier_ni);
            per_view.insert(format!("NI-June_{}", p.year), p.ni_june);
            unranked.insert(p.year, p.unranked);
        }
        records.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

        let mut isolated: Vec<String> = UNUSED.iter().map(|s| s.to_string()).collect();
        isolated.push(SOLO.to_string());
        isolated.sort();
        let ledger = Ledger {
            total: records.len(),
            per_year,
            per_view,
            unranked,
            universe: universe.len(),
            kept_nodes: universe.len() - isolated.len(),
            isolated,
        };
        SyntheticCorpus {
            records,
            ranking,
            universe,
            ledger,
        }
    }

    pub fn corpus_tsv(&self) -> String {
        let mut out = String::from("doc_id\tyear\tmonth\tjournal_id\tconcepts\n");
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    pub fn ranking_tsv(&self) -> String {
        let mut out = String::from("year\tjournal_id\tpercentile\n");
        for (y, j, p) in &self.ranking {
            out.push_str(&format!("{y}\t{j}\t{}\n", num(*p)));
        }
        out
    }

    pub fn concepts_tsv(&self) -> String {
        let mut out = String::from("code\tlabel\n");
        for c in &self.universe {
            out.push_str(&format!("{}\t{}\n", c.code, c.label));
        }
        out
    }

    pub fn ledger_json(&self) -> String {
        serde_json::to_string_pretty(&self.ledger).expect("ledger serializes") + "\n"
    }
}

/// 2 to 6 concepts: a home category with a popularity skew towards its first
/// topics, plus cross-category picks with probability `mix`.
fn draw_concepts(by_category: &[Vec<ConceptCode>], mix: f64, rng: &mut ChaCha8Rng) -> BTreeSet<ConceptCode> {
    let home = rng.random_range(0..by_category.len());
    let size = rng.random_range(2..=6);
    let mut out = BTreeSet::new();
    while out.len() < size {
        let cat = if rng.random::<f64>() < mix {
            rng.random_range(0..by_category.len())
        } else {
            home
        };
        let topics = &by_category[cat];
        // index = floor(len · u²) favours low indices
        let u: f64 = rng.random();
        let k = ((topics.len() as f64) * u * u) as usize;
        out.insert(topics[k.min(topics.len() - 1)].clone());
    }
    out
}
