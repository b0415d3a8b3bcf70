//! Weight-rewired reference networks and ensemble bands.
//!
//! A rewire step picks two distinct node pairs and exchanges their weights.
//! In [`RewireMode::AllPairs`] every node pair takes part, zeros included, so
//! links relocate anywhere; in [`RewireMode::ExistingLinks`] only the pairs
//! that carry a link in the input are shuffled and the topology is kept.
//! Either way the multiset of pair weights is conserved exactly.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

pub const DEFAULT_REPLICATES: usize = 100;
/// Swap budget per positive-weight link when the count is `auto`.
pub const AUTO_SWAPS_PER_LINK: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewireMode {
    #[default]
    AllPairs,
    ExistingLinks,
}

impl FromStr for RewireMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-pairs" => Ok(RewireMode::AllPairs),
            "existing-links" => Ok(RewireMode::ExistingLinks),
            other => Err(Error::InvalidArgument(format!("unknown rewire mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "SwapSpec", into = "SwapSpec")]
pub enum SwapCount {
    /// `AUTO_SWAPS_PER_LINK` × number of positive-weight links.
    #[default]
    Auto,
    Fixed(usize),
}

/// Wire form of [`SwapCount`]: the string `auto` or a plain integer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SwapSpec {
    Count(usize),
    Text(String),
}

impl TryFrom<SwapSpec> for SwapCount {
    type Error = Error;
    fn try_from(s: SwapSpec) -> Result<Self> {
        match s {
            SwapSpec::Count(n) => Ok(SwapCount::Fixed(n)),
            SwapSpec::Text(t) => t.parse(),
        }
    }
}

impl From<SwapCount> for SwapSpec {
    fn from(s: SwapCount) -> Self {
        match s {
            SwapCount::Auto => SwapSpec::Text("auto".into()),
            SwapCount::Fixed(n) => SwapSpec::Count(n),
        }
    }
}

impl SwapCount {
    pub fn resolve(self, net: &ConceptNetwork) -> usize {
        match self {
            SwapCount::Auto => AUTO_SWAPS_PER_LINK * net.edge_count(),
            SwapCount::Fixed(n) => n,
        }
    }
}

impl FromStr for SwapCount {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(SwapCount::Auto);
        }
        s.parse()
            .map(SwapCount::Fixed)
            .map_err(|_| Error::InvalidArgument(format!("swap count must be 'auto' or an integer, got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub replicates: usize,
    pub swaps: SwapCount,
    pub seed: u64,
    pub mode: RewireMode,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            replicates: DEFAULT_REPLICATES,
            swaps: SwapCount::Auto,
            seed: 42,
            mode: RewireMode::AllPairs,
        }
    }
}

/// Generator for replicate `index`: one ChaCha stream per replicate, so the
/// ensemble does not depend on scheduling.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One performed swap: the two node pairs whose weights were exchanged.
pub type Swap = ((usize, usize), (usize, usize));

fn pair_list(net: &ConceptNetwork, mode: RewireMode) -> Vec<(usize, usize)> {
    let n = net.node_count();
    match mode {
        RewireMode::AllPairs => (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect(),
        RewireMode::ExistingLinks => net.edges().map(|(i, j, _)| (i, j)).collect(),
    }
}

/// Rewire and return the swaps performed, in order.
pub fn rewire_traced<R: Rng>(
    net: &ConceptNetwork,
    iterations: usize,
    mode: RewireMode,
    rng: &mut R,
) -> Result<(ConceptNetwork, Vec<Swap>)> {
    if net.node_count() < 2 {
        return Err(Error::InvalidArgument("rewiring needs at least 2 nodes".into()));
    }
    let mut out = net.clone();
    if iterations == 0 {
        return Ok((out, Vec::new()));
    }
    let pairs = pair_list(net, mode);
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "rewiring needs at least 2 candidate pairs, found {}",
            pairs.len()
        )));
    }
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let a = rng.random_range(0..pairs.len());
        let mut b = rng.random_range(0..pairs.len() - 1);
        if b >= a {
            b += 1;
        }
        let (p, q) = pairs[a];
        let (u, v) = pairs[b];
        let wa = out.weight(p, q);
        let wb = out.weight(u, v);
        out.set_weight(p, q, wb);
        out.set_weight(u, v, wa);
        trace.push(((p, q), (u, v)));
    }
    Ok((out, trace))
}

pub fn rewire(net: &ConceptNetwork, iterations: usize, seed: u64, mode: RewireMode) -> Result<ConceptNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rewire_traced(net, iterations, mode, &mut rng).map(|(g, _)| g)
}

/// Pointwise ensemble summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleBand {
    pub mean: Vec<f64>,
    /// Empirical 2.5% quantile.
    pub lower: Vec<f64>,
    /// Empirical 97.5% quantile.
    pub upper: Vec<f64>,
}

impl EnsembleBand {
    /// Summarise replicate observations (all of equal length).
    pub fn from_replicates(obs: &[Vec<f64>]) -> Result<Self> {
        let first = obs.first().ok_or(Error::InsufficientSamples { needed: 1, got: 0 })?;
        let len = first.len();
        if obs.iter().any(|o| o.len() != len) {
            return Err(Error::InvalidArgument("replicate observations differ in length".into()));
        }
        let n = obs.len() as f64;
        let mut band = EnsembleBand {
            mean: Vec::with_capacity(len),
            lower: Vec::with_capacity(len),
            upper: Vec::with_capacity(len),
        };
        let mut column = Vec::with_capacity(obs.len());
        for p in 0..len {
            column.clear();
            column.extend(obs.iter().map(|o| o[p]));
            // deviation form keeps a constant column exactly constant
            let base = column[0];
            let mean = base + column.iter().map(|x| x - base).sum::<f64>() / n;
            column.sort_by(f64::total_cmp);
            band.mean.push(mean);
            band.lower.push(quantile_sorted(&column, 0.025));
            band.upper.push(quantile_sorted(&column, 0.975));
        }
        Ok(band)
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Observations of every surviving replicate plus their band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub spec: EnsembleSpec,
    pub swaps_per_replicate: usize,
    /// `(replicate index, observation)` for replicates that succeeded.
    pub observations: Vec<(usize, Vec<f64>)>,
    /// `(replicate index, error)` for replicates whose observable failed.
    pub failures: Vec<(usize, String)>,
    pub band: EnsembleBand,
}

/// Apply `observable` to `spec.replicates` independent rewires of `net`.
pub fn ensemble_band<F>(net: &ConceptNetwork, spec: &EnsembleSpec, observable: F) -> Result<Ensemble>
where
    F: Fn(&ConceptNetwork) -> Result<Vec<f64>> + Sync,
{
    if spec.replicates == 0 {
        return Err(Error::InvalidArgument("replicate count must be at least 1".into()));
    }
    let swaps = spec.swaps.resolve(net);
    let results: Vec<(usize, Result<Vec<f64>>)> = (0..spec.replicates)
        .into_par_iter()
        .map(|k| {
            let mut rng = replicate_rng(spec.seed, k as u64);
            let obs = rewire_traced(net, swaps, spec.mode, &mut rng).and_then(|(g, _)| observable(&g));
            (k, obs)
        })
        .collect();
    let mut observations = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in results {
        match r {
            Ok(o) => observations.push((k, o)),
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    let obs: Vec<Vec<f64>> = observations.iter().map(|(_, o)| o.clone()).collect();
    let band = EnsembleBand::from_replicates(&obs)?;
    Ok(Ensemble {
        spec: *spec,
        swaps_per_replicate: swaps,
        observations,
        failures,
        band,
    })
}
