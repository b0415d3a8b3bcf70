//! Global and node-level network metrics.

mod paths;

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

pub use paths::{aspl, betweenness, shortest_paths, Aspl, ComponentMode, DistanceTable, TIE_TOLERANCE};

/// `(1/N) Σ_i Σ_{j≠i} w_ij`, summed as `2 Σ_{i<j} w_ij` over the sorted link
/// weights so the result depends only on the weight multiset.
pub fn mean_strength(net: &ConceptNetwork) -> Result<f64> {
    let n = net.node_count();
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut w: Vec<f64> = net.edges().map(|(_, _, w)| w).collect();
    w.sort_by(f64::total_cmp);
    Ok(2.0 * w.iter().sum::<f64>() / n as f64)
}

/// Fraction of node pairs joined by a positive-weight link.
pub fn edge_density(net: &ConceptNetwork) -> Result<f64> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("edge density needs N >= 2, got {n}")));
    }
    Ok(net.edge_count() as f64 / (n * (n - 1) / 2) as f64)
}

/// Weighted global clustering coefficient: triad value is the mean of its
/// two links; the coefficient is the closed share of total triad value.
pub fn gcc(net: &ConceptNetwork) -> Result<f64> {
    let n = net.node_count();
    let mut closed = 0.0;
    let mut total = 0.0;
    for j in 0..n {
        let nbrs: Vec<(usize, f64)> = net.neighbors(j).collect();
        for (a, &(i, wij)) in nbrs.iter().enumerate() {
            for &(k, wjk) in &nbrs[a + 1..] {
                let triad = (wij + wjk) / 2.0;
                total += triad;
                if net.weight(i, k) > 0.0 {
                    closed += triad;
                }
            }
        }
    }
    if total == 0.0 {
        return Err(Error::GccUndefined);
    }
    Ok(closed / total)
}

/// Strength assortativity over the reciprocal edge set (each undirected link
/// contributes both orientations), unweighted by link weight.
pub fn strength_assortativity(net: &ConceptNetwork) -> Result<f64> {
    let edges: Vec<(usize, usize, f64)> = net.edges().collect();
    if edges.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: edges.len(),
        });
    }
    let s = net.strengths();
    // node i appears as the source of deg(i) orientations
    let mut degree = vec![0usize; net.node_count()];
    for &(i, j, _) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    let m2 = 2.0 * edges.len() as f64;
    let mu = degree
        .iter()
        .zip(&s)
        .map(|(&d, &si)| d as f64 * si)
        .sum::<f64>()
        / m2;
    let var = degree
        .iter()
        .zip(&s)
        .map(|(&d, &si)| d as f64 * (si - mu) * (si - mu))
        .sum::<f64>();
    let cov = edges
        .iter()
        .map(|&(i, j, _)| 2.0 * (s[i] - mu) * (s[j] - mu))
        .sum::<f64>();
    if var <= f64::EPSILON * mu * mu * m2 {
        return Err(Error::AssortativityUndefined);
    }
    Ok(cov / var)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Strength,
    Betweenness,
}

impl std::str::FromStr for RankKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strength" => Ok(RankKey::Strength),
            "betweenness" => Ok(RankKey::Betweenness),
            other => Err(Error::InvalidArgument(format!("unknown rank key {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranked {
    pub code: String,
    pub value: f64,
}

/// Per-node strength and normalised betweenness.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics {
    pub codes: Vec<String>,
    pub strength: Vec<f64>,
    pub betweenness: Vec<f64>,
}

impl NodeMetrics {
    pub fn compute(net: &ConceptNetwork) -> Self {
        NodeMetrics {
            codes: net.nodes().iter().map(|c| c.code.to_string()).collect(),
            strength: net.strengths(),
            betweenness: betweenness(net),
        }
    }

    pub fn values(&self, key: RankKey) -> &[f64] {
        match key {
            RankKey::Strength => &self.strength,
            RankKey::Betweenness => &self.betweenness,
        }
    }
}

/// Top `k` nodes by `key`, descending; exact ties go to the smaller code.
pub fn top_nodes(metrics: &NodeMetrics, key: RankKey, k: usize) -> Result<Vec<Ranked>> {
    top_by(
        metrics.codes.iter().map(String::as_str).zip(metrics.values(key).iter().copied()),
        k,
    )
}

/// Descending ranking of labelled values, ties broken by label.
pub fn top_by<'a, I>(items: I, k: usize) -> Result<Vec<Ranked>>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut all: Vec<(&str, f64)> = items.into_iter().collect();
    all.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(b.0),
        o => o,
    });
    Ok(all
        .into_iter()
        .take(k)
        .map(|(c, v)| Ranked {
            code: c.to_string(),
            value: v,
        })
        .collect())
}

/// Global summary of one network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMetricsReport {
    pub network: String,
    pub mean_strength: f64,
    pub edge_density: f64,
    pub aspl: Option<f64>,
    pub gcc: Option<f64>,
    pub assortativity: Option<f64>,
    pub modularity: Option<f64>,
    pub node_count: usize,
    pub edge_count: usize,
    /// Which pairs the ASPL averages over.
    pub aspl_component: ComponentMode,
    pub aspl_nodes: Option<usize>,
    /// Edge length used for paths.
    pub distance_convention: &'static str,
    pub modularity_seed: Option<u64>,
    /// Metrics that could not be computed, with the reason.
    pub undefined: Vec<String>,
}

impl GlobalMetricsReport {
    /// Compute everything except modularity, which the community module fills.
    pub fn compute(net: &ConceptNetwork, mode: ComponentMode) -> Result<Self> {
        let mut undefined = Vec::new();
        let mut keep = |name: &str, r: Result<f64>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                undefined.push(format!("{name}: {e}"));
                None
            }
        };
        let aspl_res = aspl(net, mode);
        let aspl_nodes = aspl_res.as_ref().ok().map(|a| a.nodes);
        let aspl_value = keep("aspl", aspl_res.map(|a| a.value));
        let gcc_value = keep("gcc", gcc(net));
        let r_value = keep("assortativity", strength_assortativity(net));
        Ok(GlobalMetricsReport {
            network: net.meta.name(),
            mean_strength: mean_strength(net)?,
            edge_density: edge_density(net)?,
            aspl: aspl_value,
            gcc: gcc_value,
            assortativity: r_value,
            modularity: None,
            node_count: net.node_count(),
            edge_count: net.edge_count(),
            aspl_component: mode,
            aspl_nodes,
            distance_convention: "reciprocal weight (1/w)",
            modularity_seed: None,
            undefined,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_triangle() -> ConceptNetwork {
        let mut g = ConceptNetwork::anonymous(3);
        g.set_weight(0, 1, 1.0);
        g.set_weight(1, 2, 1.0);
        g.set_weight(0, 2, 1.0);
        g
    }

    fn star(leaves: usize) -> ConceptNetwork {
        let mut g = ConceptNetwork::anonymous(leaves + 1);
        for l in 1..=leaves {
            g.set_weight(0, l, 1.0);
        }
        g
    }

    #[test]
    fn strength_examples() {
        assert_eq!(mean_strength(&unit_triangle()).unwrap(), 2.0);
        let mut p = ConceptNetwork::anonymous(4);
        p.set_weight(0, 1, 0.5);
        p.set_weight(1, 2, 0.5);
        p.set_weight(2, 3, 0.5);
        assert_eq!(mean_strength(&p).unwrap(), 0.75);
        assert!(matches!(
            mean_strength(&ConceptNetwork::anonymous(0)),
            Err(Error::EmptyNetwork)
        ));
    }

    #[test]
    fn density_examples() {
        assert_eq!(edge_density(&unit_triangle()).unwrap(), 1.0);
        assert_eq!(edge_density(&ConceptNetwork::anonymous(5)).unwrap(), 0.0);
        assert!(edge_density(&ConceptNetwork::anonymous(1)).is_err());
    }

    #[test]
    fn gcc_examples() {
        assert_eq!(gcc(&unit_triangle()).unwrap(), 1.0);
        let mut p = ConceptNetwork::anonymous(3);
        p.set_weight(0, 1, 0.3);
        p.set_weight(1, 2, 0.7);
        assert_eq!(gcc(&p).unwrap(), 0.0);
        let mut e = ConceptNetwork::anonymous(2);
        e.set_weight(0, 1, 1.0);
        assert!(matches!(gcc(&e), Err(Error::GccUndefined)));
    }

    #[test]
    fn star_is_perfectly_disassortative() {
        for leaves in [2, 3, 7] {
            let r = strength_assortativity(&star(leaves)).unwrap();
            assert!((r + 1.0).abs() < 1e-12, "leaves={leaves} r={r}");
        }
    }

    #[test]
    fn regular_graph_assortativity_undefined() {
        assert!(matches!(
            strength_assortativity(&unit_triangle()),
            Err(Error::AssortativityUndefined)
        ));
    }

    #[test]
    fn ranking_ties_are_lexicographic() {
        let m = NodeMetrics {
            codes: vec!["C02.1".into(), "C01.5".into(), "C01.2".into()],
            strength: vec![1.0, 1.0, 1.0],
            betweenness: vec![0.1, 0.3, 0.2],
        };
        let s = top_nodes(&m, RankKey::Strength, 10).unwrap();
        let codes: Vec<_> = s.iter().map(|r| r.code.as_str()).collect();
        assert_eq!(codes, ["C01.2", "C01.5", "C02.1"]);
        let b = top_nodes(&m, RankKey::Betweenness, 2).unwrap();
        assert_eq!(b[0].code, "C01.5");
        assert_eq!(b.len(), 2);
        assert!(top_nodes(&m, RankKey::Strength, 0).is_err());
    }

    #[test]
    fn report_marks_undefined_metrics() {
        let rep = GlobalMetricsReport::compute(&unit_triangle(), ComponentMode::All).unwrap();
        assert_eq!(rep.gcc, Some(1.0));
        assert_eq!(rep.assortativity, None);
        assert_eq!(rep.undefined.len(), 1);
        let json = serde_json::to_value(&rep).unwrap();
        for key in ["mean_strength", "edge_density", "aspl", "gcc", "assortativity", "modularity", "node_count", "edge_count"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
