//! Weighted shortest paths with edge length `1 / w`, and Brandes-style
//! betweenness. Path lengths within a relative tolerance of
//! [`TIE_TOLERANCE`] are treated as equal so that equal-length routes are
//! counted exactly despite floating-point summation order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

pub const TIE_TOLERANCE: f64 = 1e-9;

#[inline]
pub(crate) fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// All-pairs distances; `None` marks a disconnected pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<f64>,
}

impl DistanceTable {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let d = self.dist[i * self.n + j];
        d.is_finite().then_some(d)
    }

    /// Raw row with `f64::INFINITY` for unreachable nodes.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }
}

struct SingleSource {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
}

/// Dense O(N²) Dijkstra from `s`, tracking shortest-path multiplicities.
fn single_source(net: &ConceptNetwork, s: usize) -> SingleSource {
    let n = net.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    dist[s] = 0.0;
    sigma[s] = 1.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        order.push(u);
        for (v, w) in net.neighbors(u) {
            if done[v] {
                continue;
            }
            let alt = dist[u] + 1.0 / w;
            if dist[v].is_finite() && ties(alt, dist[v]) {
                sigma[v] += sigma[u];
                preds[v].push(u);
            } else if alt < dist[v] {
                dist[v] = alt;
                sigma[v] = sigma[u];
                preds[v].clear();
                preds[v].push(u);
            }
        }
    }
    SingleSource {
        dist,
        sigma,
        preds,
        order,
    }
}

pub fn shortest_paths(net: &ConceptNetwork) -> DistanceTable {
    let n = net.node_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(net, s).dist)
        .collect();
    DistanceTable {
        n,
        dist: rows.concat(),
    }
}

/// Which node pairs enter the ASPL average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentMode {
    /// Every pair; a disconnected network is an error.
    #[default]
    All,
    /// Pairs inside the largest connected component only.
    Largest,
}

impl std::str::FromStr for ComponentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ComponentMode::All),
            "largest" => Ok(ComponentMode::Largest),
            other => Err(Error::InvalidArgument(format!("unknown component mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aspl {
    pub value: f64,
    pub mode: ComponentMode,
    /// Nodes whose pairs were averaged.
    pub nodes: usize,
}

/// Largest component; ties go to the one containing the smallest node index.
pub(crate) fn largest_component(net: &ConceptNetwork) -> Vec<usize> {
    net.components()
        .into_iter()
        .fold(Vec::new(), |best, c| if c.len() > best.len() { c } else { best })
}

pub fn aspl(net: &ConceptNetwork, mode: ComponentMode) -> Result<Aspl> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("ASPL needs at least 2 nodes, got {n}")));
    }
    let members: Vec<usize> = match mode {
        ComponentMode::All => {
            let comps = net.components().len();
            if comps > 1 {
                return Err(Error::Disconnected { components: comps });
            }
            (0..n).collect()
        }
        ComponentMode::Largest => largest_component(net),
    };
    if members.len() < 2 {
        return Err(Error::InvalidArgument("largest component has a single node".into()));
    }
    let table = shortest_paths(net);
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            total += table.row(i)[j];
            pairs += 1;
        }
    }
    Ok(Aspl {
        value: total / pairs as f64,
        mode,
        nodes: members.len(),
    })
}

/// Normalised betweenness: pair-dependencies over unordered pairs `{j, k}`
/// not containing `i`, divided by `(N-1)(N-2)/2`.
pub fn betweenness(net: &ConceptNetwork) -> Vec<f64> {
    let n = net.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let per_source: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let ss = single_source(net, s);
            let mut delta = vec![0.0; n];
            for &w in ss.order.iter().rev() {
                for &v in &ss.preds[w] {
                    delta[v] += ss.sigma[v] / ss.sigma[w] * (1.0 + delta[w]);
                }
            }
            delta[s] = 0.0;
            delta
        })
        .collect();
    let mut b = vec![0.0; n];
    for delta in &per_source {
        for (acc, d) in b.iter_mut().zip(delta) {
            *acc += d;
        }
    }
    // every unordered pair was visited from both endpoints
    let norm = 2.0 * ((n - 1) * (n - 2)) as f64 / 2.0;
    b.iter_mut().for_each(|x| *x /= norm);
    b
}
