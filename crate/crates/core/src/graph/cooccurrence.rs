use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;

use rayon::prelude::*;

use super::network::{ConceptNetwork, NetworkMeta};
use crate::corpus::{Concept, ConceptCode, Corpus, CorpusView, DocumentRecord};
use crate::error::{Error, Result};

/// Symmetric co-occurrence counts over an ordered concept universe.
/// `count(i, i)` is the number of documents indexing concept `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceCounts {
    universe: Vec<Concept>,
    counts: Vec<u64>,
    documents: usize,
}

impl CooccurrenceCounts {
    pub fn universe(&self) -> &[Concept] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    /// Documents that contributed (had at least one in-universe concept).
    pub fn documents(&self) -> usize {
        self.documents
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.universe.len() + j]
    }

    pub fn raw(&self) -> &[u64] {
        &self.counts
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountOptions {
    /// Truncate deeper codes to this many tree levels before matching
    /// against the universe (e.g. `Some(2)` maps `C04.588.1` to `C04.588`).
    pub rollup_level: Option<usize>,
}

/// Count co-occurrences over `view`. Concepts outside `universe` are ignored.
pub fn count_cooccurrences(view: &CorpusView<'_>, universe: &[Concept]) -> Result<CooccurrenceCounts> {
    count_documents(view.iter(), universe, CountOptions::default())
}

pub fn count_cooccurrences_with(
    view: &CorpusView<'_>,
    universe: &[Concept],
    opts: CountOptions,
) -> Result<CooccurrenceCounts> {
    count_documents(view.iter(), universe, opts)
}

/// Core counting kernel over any document sequence. Documents are split into
/// shards that are counted in parallel and merged by integer addition, so the
/// result does not depend on document order or thread count.
pub fn count_documents<'a, I>(docs: I, universe: &[Concept], opts: CountOptions) -> Result<CooccurrenceCounts>
where
    I: IntoIterator<Item = &'a DocumentRecord>,
{
    if universe.is_empty() {
        return Err(Error::InvalidArgument("concept universe is empty".into()));
    }
    let n = universe.len();
    let index: HashMap<&ConceptCode, usize> =
        universe.iter().enumerate().map(|(i, c)| (&c.code, i)).collect();

    let docs: Vec<Vec<usize>> = docs
        .into_iter()
        .map(|d| {
            let set: BTreeSet<usize> = d
                .concepts
                .iter()
                .filter_map(|c| match opts.rollup_level {
                    Some(level) => index.get(&c.truncate(level)).copied(),
                    None => index.get(c).copied(),
                })
                .collect();
            set.into_iter().collect()
        })
        .filter(|v: &Vec<usize>| !v.is_empty())
        .collect();

    let counts = docs
        .par_chunks(256)
        .fold(
            || vec![0u64; n * n],
            |mut acc, chunk| {
                for idx in chunk {
                    for (a, &i) in idx.iter().enumerate() {
                        acc[i * n + i] += 1;
                        for &j in &idx[a + 1..] {
                            acc[i * n + j] += 1;
                            acc[j * n + i] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n * n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    Ok(CooccurrenceCounts {
        universe: universe.to_vec(),
        counts,
        documents: docs.len(),
    })
}

/// `w_ij = c_ij / sqrt(c_ii c_jj)`, zero when either term never occurs.
pub fn cosine_normalize(counts: &CooccurrenceCounts, meta: NetworkMeta) -> ConceptNetwork {
    let n = counts.len();
    let mut meta = meta;
    meta.documents = counts.documents;
    meta.zero_frequency = (0..n)
        .filter(|&i| counts.count(i, i) == 0)
        .map(|i| counts.universe[i].code.clone())
        .collect();
    let mut net = ConceptNetwork::empty(counts.universe.clone(), meta);
    for i in 0..n {
        let cii = counts.count(i, i);
        if cii == 0 {
            continue;
        }
        for j in (i + 1)..n {
            let cij = counts.count(i, j);
            let cjj = counts.count(j, j);
            if cij == 0 || cjj == 0 {
                continue;
            }
            let w = cij as f64 / ((cii as f64) * (cjj as f64)).sqrt();
            assert!(
                (0.0..=1.0).contains(&w),
                "cosine weight {w} out of range for pair ({i}, {j})"
            );
            net.set_weight(i, j, w);
        }
    }
    net
}

/// Drop nodes whose strength is zero in every network. All inputs must share
/// one node order; the outputs share the reduced order.
pub fn prune_shared_isolates(networks: &[ConceptNetwork]) -> Result<(Vec<ConceptNetwork>, Vec<Concept>)> {
    let first = match networks.first() {
        Some(f) => f,
        None => return Ok((Vec::new(), Vec::new())),
    };
    for (k, net) in networks.iter().enumerate().skip(1) {
        if !first.same_universe(net) {
            return Err(Error::UniverseMismatch(format!(
                "network {k} ({}) differs from network 0 ({})",
                net.meta.name(),
                first.meta.name()
            )));
        }
    }
    let n = first.node_count();
    let (keep, removed): (Vec<usize>, Vec<usize>) = (0..n)
        .partition(|&i| networks.iter().any(|net| net.row(i).iter().any(|&w| w > 0.0)));
    let removed_nodes = removed.iter().map(|&i| first.nodes()[i].clone()).collect();
    let pruned = networks.iter().map(|net| net.restrict(&keep)).collect();
    Ok((pruned, removed_nodes))
}

/// Read a `code <TAB> label` sidecar. Labels are optional.
pub fn read_universe<R: BufRead>(reader: R, source: &str) -> Result<Vec<Concept>> {
    let mut seen = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (code, label) = match line.split_once('\t') {
            Some((c, l)) => (c.trim(), l.trim()),
            None => (line.trim(), ""),
        };
        if idx == 0 && code == "code" {
            continue;
        }
        let code = ConceptCode::new(code).map_err(|e| Error::Parse {
            path: source.into(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        seen.insert(code, label.to_string());
    }
    Ok(seen
        .into_iter()
        .map(|(code, label)| Concept { code, label })
        .collect())
}

/// Sorted set of all codes in the corpus, optionally rolled up.
pub fn universe_from_corpus(corpus: &Corpus, rollup_level: Option<usize>) -> Vec<Concept> {
    let codes: BTreeSet<ConceptCode> = corpus
        .records()
        .flat_map(|r| r.concepts.iter())
        .map(|c| match rollup_level {
            Some(l) => c.truncate(l),
            None => c.clone(),
        })
        .collect();
    codes.into_iter().map(Concept::unlabeled).collect()
}
