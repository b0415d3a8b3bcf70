//! Threshold decomposition: size of the largest connected component (LCC)
//! as links with `w <= t` are removed, and the inner core found on that
//! curve.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::num;
use crate::graph::ConceptNetwork;
use crate::null_model::{ensemble_band, Ensemble, EnsembleSpec};

pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_CORE_TARGET: usize = 10;

/// `points` evenly spaced thresholds on `[0, max w + ε]`. Points landing
/// exactly on a link weight are moved one ulp up so the strict `w > t`
/// retention rule never sits on a tie.
pub fn default_grid(net: &ConceptNetwork, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let max = net.max_weight();
    let top = max + 1e-9 * max.max(1.0);
    let mut weights: Vec<f64> = net.edges().map(|(_, _, w)| w).collect();
    weights.sort_by(f64::total_cmp);
    Ok((0..points)
        .map(|k| {
            let t = top * k as f64 / (points - 1) as f64;
            if weights.binary_search_by(|w| w.total_cmp(&t)).is_ok() {
                t.next_up()
            } else {
                t
            }
        })
        .collect())
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a != b {
            if self.size[a] < self.size[b] {
                std::mem::swap(&mut a, &mut b);
            }
            self.parent[b] = a;
            self.size[a] += self.size[b];
        }
        self.size[a]
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("threshold grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("threshold grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// LCC size at each threshold, keeping links with `w > t`.
pub fn lcc_curve(net: &ConceptNetwork, grid: &[f64]) -> Result<Vec<usize>> {
    check_grid(grid)?;
    let n = net.node_count();
    let mut edges: Vec<(usize, usize, f64)> = net.edges().collect();
    edges.sort_by(|a, b| b.2.total_cmp(&a.2));
    let mut uf = UnionFind::new(n);
    let mut largest = n.min(1);
    let mut next = 0;
    let mut out = vec![0; grid.len()];
    for k in (0..grid.len()).rev() {
        while next < edges.len() && edges[next].2 > grid[k] {
            let (i, j, _) = edges[next];
            largest = largest.max(uf.union(i, j));
            next += 1;
        }
        out[k] = largest;
    }
    Ok(out)
}

/// Components of the graph thresholded at `t`, each sorted.
fn components_above(net: &ConceptNetwork, t: f64) -> Vec<Vec<usize>> {
    net.map_weights(|_, _, w| if w > t { w } else { 0.0 }).components()
}

/// Largest component of `comps`; among equal sizes the one with greater
/// internal weight in `net`, then the one with the smaller first node.
fn pick_largest(net: &ConceptNetwork, comps: &[Vec<usize>]) -> Vec<usize> {
    let internal = |c: &[usize]| -> f64 {
        let mut s = 0.0;
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                s += net.weight(i, j);
            }
        }
        s
    };
    let mut best: Option<(&Vec<usize>, f64)> = None;
    for c in comps {
        let w = internal(c);
        best = match best {
            None => Some((c, w)),
            Some((b, bw)) if c.len() > b.len() || (c.len() == b.len() && w > bw) => Some((c, w)),
            keep => keep,
        };
    }
    best.map(|(c, _)| c.clone()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerCore {
    pub size: usize,
    pub target: usize,
    pub nodes: Vec<usize>,
    pub codes: Vec<String>,
    /// Grid thresholds over which the LCC is exactly this node set.
    pub t_start: f64,
    pub t_end: f64,
    /// LCC size at the grid point just below `t_start`, when larger than the
    /// target (the curve jumped over the sizes in between).
    pub jumped_from: Option<usize>,
}

/// Largest LCC of size at most `target` (and at least 2) on the grid.
pub fn inner_core(net: &ConceptNetwork, target: usize, grid: &[f64]) -> Result<InnerCore> {
    if target < 2 {
        return Err(Error::InvalidArgument(format!("core target must be at least 2, got {target}")));
    }
    let sizes = lcc_curve(net, grid)?;
    let size = sizes
        .iter()
        .copied()
        .filter(|&s| (2..=target).contains(&s))
        .max()
        .ok_or(Error::NoInnerCore { target })?;
    let start = sizes.iter().position(|&s| s == size).expect("size occurs");
    let nodes = pick_largest(net, &components_above(net, grid[start]));
    let mut end = start;
    while end + 1 < grid.len() && sizes[end + 1] == size {
        let comps = components_above(net, grid[end + 1]);
        if !comps.contains(&nodes) {
            break;
        }
        end += 1;
    }
    let jumped_from = start
        .checked_sub(1)
        .map(|k| sizes[k])
        .filter(|&s| s > target);
    Ok(InnerCore {
        size,
        target,
        codes: nodes.iter().map(|&i| net.code(i).to_string()).collect(),
        nodes,
        t_start: grid[start],
        t_end: grid[end],
        jumped_from,
    })
}

/// Empirical LCC curve alongside the rewired-ensemble band on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionProfile {
    pub grid: Vec<f64>,
    pub lcc: Vec<usize>,
    pub null: Option<Ensemble>,
}

impl DecompositionProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,lcc_size,null_mean,null_lo,null_hi\n");
        for (k, (&t, &s)) in self.grid.iter().zip(&self.lcc).enumerate() {
            out.push_str(&num(t));
            out.push(',');
            out.push_str(&s.to_string());
            match &self.null {
                Some(e) => {
                    for v in [e.band.mean[k], e.band.lower[k], e.band.upper[k]] {
                        out.push(',');
                        out.push_str(&num(v));
                    }
                }
                None => out.push_str(",,,"),
            }
            out.push('\n');
        }
        out
    }

    /// Grid points where the empirical LCC lies strictly below the band.
    pub fn below_band(&self) -> Vec<usize> {
        match &self.null {
            Some(e) => (0..self.grid.len())
                .filter(|&k| (self.lcc[k] as f64) < e.band.lower[k])
                .collect(),
            None => Vec::new(),
        }
    }
}

pub fn compare_to_null(net: &ConceptNetwork, spec: &EnsembleSpec, grid: &[f64]) -> Result<DecompositionProfile> {
    let lcc = lcc_curve(net, grid)?;
    let null = ensemble_band(net, spec, |g| {
        Ok(lcc_curve(g, grid)?.into_iter().map(|s| s as f64).collect())
    })?;
    Ok(DecompositionProfile {
        grid: grid.to_vec(),
        lcc,
        null: Some(null),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(ws: &[f64]) -> ConceptNetwork {
        let mut g = ConceptNetwork::anonymous(ws.len() + 1);
        for (k, &w) in ws.iter().enumerate() {
            g.set_weight(k, k + 1, w);
        }
        g
    }

    #[test]
    fn grid_avoids_exact_weights() {
        let g = path(&[0.5, 0.25]);
        let grid = default_grid(&g, 5).unwrap();
        assert_eq!(grid.len(), 5);
        assert!(grid.iter().all(|t| *t != 0.5 && *t != 0.25));
        assert!(*grid.last().unwrap() > 0.5);
    }

    #[test]
    fn curve_on_a_path() {
        let g = path(&[0.5, 0.25, 0.75]);
        let c = lcc_curve(&g, &[0.0, 0.3, 0.6, 0.8]).unwrap();
        assert_eq!(c, vec![4, 2, 2, 1]);
        assert!(lcc_curve(&g, &[0.3, 0.1]).is_err());
    }

    #[test]
    fn two_node_core() {
        let g = path(&[0.4]);
        let grid = default_grid(&g, 50).unwrap();
        let core = inner_core(&g, 10, &grid).unwrap();
        assert_eq!(core.nodes, vec![0, 1]);
        assert_eq!(core.t_start, 0.0);
        assert!(core.t_end < 0.4);
        let next = grid.iter().find(|&&t| t > core.t_end).unwrap();
        assert!(*next > 0.4);
    }

    #[test]
    fn no_links_means_no_core() {
        let g = ConceptNetwork::anonymous(5);
        let grid = [0.0, 0.5, 1.0];
        assert!(matches!(inner_core(&g, 3, &grid), Err(Error::NoInnerCore { target: 3 })));
    }

    #[test]
    fn equal_size_tie_prefers_heavier() {
        let mut g = ConceptNetwork::anonymous(4);
        g.set_weight(0, 1, 0.6);
        g.set_weight(2, 3, 0.9);
        let core = inner_core(&g, 2, &[0.0, 0.7, 1.0]).unwrap();
        assert_eq!(core.nodes, vec![2, 3]);
    }
}
