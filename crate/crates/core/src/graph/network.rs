use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Concept, ConceptCode};
use crate::error::{Error, Result};

/// Snapshot metadata carried alongside the weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkMeta {
    /// Tier label such as `I`, `NI` or `NI-June`; free-form for derived networks.
    pub tier: String,
    pub year: Option<i32>,
    pub documents: usize,
    /// Concepts that no document in the snapshot indexed.
    pub zero_frequency: Vec<ConceptCode>,
}

impl NetworkMeta {
    pub fn name(&self) -> String {
        match self.year {
            Some(y) if !self.tier.is_empty() => format!("{}_{}", self.tier, y),
            Some(y) => y.to_string(),
            None => self.tier.clone(),
        }
    }
}

/// Undirected weighted graph over concept nodes, stored as a dense symmetric
/// matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptNetwork {
    nodes: Vec<Concept>,
    weights: Vec<f64>,
    pub meta: NetworkMeta,
}

impl ConceptNetwork {
    /// Build from a row-major `n × n` matrix. The matrix must be symmetric,
    /// non-negative and finite with a zero diagonal.
    pub fn from_dense(nodes: Vec<Concept>, weights: Vec<f64>, meta: NetworkMeta) -> Result<Self> {
        let n = nodes.len();
        if weights.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "weight matrix has {} entries, expected {}",
                weights.len(),
                n * n
            )));
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument(format!("non-zero diagonal at node {i}")));
            }
            for j in (i + 1)..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "invalid weight {w} between nodes {i} and {j}"
                    )));
                }
                if w != weights[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "asymmetric weight between nodes {i} and {j}"
                    )));
                }
            }
        }
        Ok(ConceptNetwork {
            nodes,
            weights,
            meta,
        })
    }

    /// Build from an edge list; later duplicates overwrite earlier ones.
    pub fn from_edges<I>(nodes: Vec<Concept>, edges: I, meta: NetworkMeta) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut net = ConceptNetwork::empty(nodes, meta);
        let n = net.node_count();
        for (i, j, w) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidArgument(format!("invalid edge ({i}, {j})")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            net.set_weight(i, j, w);
        }
        Ok(net)
    }

    pub fn empty(nodes: Vec<Concept>, meta: NetworkMeta) -> Self {
        let n = nodes.len();
        ConceptNetwork {
            nodes,
            weights: vec![0.0; n * n],
            meta,
        }
    }

    /// Network with synthetic node codes `X0`, `X1`, ... (tests, fixtures).
    pub fn anonymous(n: usize) -> Self {
        let nodes = (0..n)
            .map(|i| Concept::unlabeled(ConceptCode::new(&format!("X{i}")).expect("valid code")))
            .collect();
        ConceptNetwork::empty(nodes, NetworkMeta::default())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Concept] {
        &self.nodes
    }

    pub fn code(&self, i: usize) -> &ConceptCode {
        &self.nodes[i].code
    }

    pub fn index_of(&self) -> HashMap<&ConceptCode, usize> {
        self.nodes.iter().enumerate().map(|(i, c)| (&c.code, i)).collect()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.nodes.len() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.nodes.len();
        &self.weights[i * n..(i + 1) * n]
    }

    pub fn dense(&self) -> &[f64] {
        &self.weights
    }

    /// Set `w_ij = w_ji = w`. Panics if `i == j` and `w != 0`.
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j || w == 0.0, "self-loops are not allowed");
        let n = self.nodes.len();
        self.weights[i * n + j] = w;
        self.weights[j * n + i] = w;
    }

    /// Positive-weight neighbours of `i` with their weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w > 0.0)
            .map(|(j, &w)| (j, w))
    }

    /// Positive-weight links as `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.nodes.len();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weights[i * n + j];
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn strength(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn strengths(&self) -> Vec<f64> {
        (0..self.nodes.len()).map(|i| self.strength(i)).collect()
    }

    /// Sum of link weights, each undirected link counted once.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Weights of every unordered node pair (zeros included), row-major.
    pub fn pair_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            out.extend_from_slice(&self.weights[i * n + i + 1..(i + 1) * n]);
        }
        out
    }

    pub fn same_universe(&self, other: &ConceptNetwork) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| a.code == b.code)
    }

    /// Keep only the nodes at `keep` (in that order).
    pub fn restrict(&self, keep: &[usize]) -> ConceptNetwork {
        let nodes: Vec<Concept> = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        let m = keep.len();
        let mut weights = vec![0.0; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                weights[a * m + b] = self.weight(i, j);
            }
        }
        ConceptNetwork {
            nodes,
            weights,
            meta: self.meta.clone(),
        }
    }

    /// Relabel: node `k` of the result is node `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> ConceptNetwork {
        assert_eq!(perm.len(), self.node_count());
        self.restrict(perm)
    }

    pub fn scaled(&self, factor: f64) -> ConceptNetwork {
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= factor;
        }
        out
    }

    /// Same nodes and metadata, weights replaced by `f(i, j, w)` on `i < j`.
    pub fn map_weights<F: FnMut(usize, usize, f64) -> f64>(&self, mut f: F) -> ConceptNetwork {
        let n = self.node_count();
        let mut out = ConceptNetwork::empty(self.nodes.clone(), self.meta.clone());
        for i in 0..n {
            for j in (i + 1)..n {
                out.set_weight(i, j, f(i, j, self.weight(i, j)));
            }
        }
        out
    }

    /// Connected components over positive-weight links, each sorted, listed
    /// by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let u = comp[k];
                k += 1;
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_validation() {
        let nodes = ConceptNetwork::anonymous(2).nodes().to_vec();
        assert!(ConceptNetwork::from_dense(nodes.clone(), vec![0.0, 0.5, 0.5, 0.0], NetworkMeta::default()).is_ok());
        assert!(ConceptNetwork::from_dense(nodes.clone(), vec![0.0, 0.5, 0.4, 0.0], NetworkMeta::default()).is_err());
        assert!(ConceptNetwork::from_dense(nodes.clone(), vec![1.0, 0.5, 0.5, 0.0], NetworkMeta::default()).is_err());
        assert!(ConceptNetwork::from_dense(nodes, vec![0.0, -0.5, -0.5, 0.0], NetworkMeta::default()).is_err());
    }

    #[test]
    fn strengths_sum_to_twice_total() {
        let mut g = ConceptNetwork::anonymous(4);
        g.set_weight(0, 1, 0.5);
        g.set_weight(1, 2, 0.25);
        g.set_weight(0, 3, 0.125);
        let s: f64 = g.strengths().iter().sum();
        assert_eq!(s, 2.0 * g.total_weight());
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn components_and_restrict() {
        let mut g = ConceptNetwork::anonymous(5);
        g.set_weight(0, 1, 1.0);
        g.set_weight(3, 4, 1.0);
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        let r = g.restrict(&[3, 4, 0]);
        assert_eq!(r.weight(0, 1), 1.0);
        assert_eq!(r.weight(1, 2), 0.0);
        assert_eq!(r.code(2).as_str(), "X0");
    }
}
