//! Louvain modularity optimisation: repeated local node moves followed by
//! community aggregation, until a level produces no move.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::modularity::eval_modularity;
use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

pub const DEFAULT_SEED: u64 = 42;

/// Minimum modularity gain for a node move to count.
const MOVE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Community id per node, numbered by first appearance in node order.
    pub membership: Vec<usize>,
    pub community_count: usize,
    /// Plain modularity of `membership` on the source network.
    pub modularity: f64,
    pub seed: u64,
    pub resolution: f64,
    /// Resolution-adjusted modularity after each aggregation level, starting
    /// with the singleton partition.
    pub level_modularity: Vec<f64>,
}

/// Weighted graph with self-loops, as produced by aggregation.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// `A_ii` in ordered-pair convention (twice the internal link weight).
    self_loop: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_network(net: &ConceptNetwork) -> Self {
        let n = net.node_count();
        let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|i| net.neighbors(i).collect()).collect();
        let strength = net.strengths();
        Level {
            adj,
            self_loop: vec![0.0; n],
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Resolution-adjusted modularity of `comm` on this level.
    fn quality(&self, comm: &[usize], two_m: f64, resolution: f64) -> f64 {
        let k = comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut total = vec![0.0; k];
        for i in 0..self.len() {
            let c = comm[i];
            total[c] += self.strength[i];
            inside[c] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if comm[j] == c {
                    inside[c] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&total)
            .map(|(&a, &t)| a / two_m - resolution * (t / two_m) * (t / two_m))
            .sum()
    }

    /// One local-moving phase. Returns whether any node moved.
    fn move_nodes(&self, comm: &mut [usize], two_m: f64, resolution: f64, rng: &mut ChaCha8Rng) -> bool {
        let n = self.len();
        let mut total = vec![0.0; n];
        for i in 0..n {
            total[comm[i]] += self.strength[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut links_to = vec![0.0; n];
        let mut is_touched = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let ci = comm[i];
                let ki = self.strength[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if !is_touched[c] {
                        is_touched[c] = true;
                        touched.push(c);
                    }
                    links_to[c] += w;
                }
                total[ci] -= ki;
                let gain = |c: usize, links: f64| links - resolution * total[c] * ki / two_m;
                let stay = gain(ci, links_to[ci]);
                let mut best = ci;
                let mut best_gain = stay;
                for &c in &touched {
                    let g = gain(c, links_to[c]);
                    if g > best_gain + MOVE_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                if best != ci {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    links_to[c] = 0.0;
                    is_touched[c] = false;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        any_move
    }

    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut self_loop = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut dense = vec![0.0; k * k];
        for i in 0..self.len() {
            let ci = comm[i];
            strength[ci] += self.strength[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    dense[ci * k + cj] += w;
                }
            }
        }
        let adj = (0..k)
            .map(|a| {
                (0..k)
                    .filter(|&b| dense[a * k + b] > 0.0)
                    .map(|b| (b, dense[a * k + b]))
                    .collect()
            })
            .collect();
        Level {
            adj,
            self_loop,
            strength,
        }
    }
}

/// Renumber community ids by first appearance; returns the count.
fn relabel(comm: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; comm.len().max(1)];
    let mut next = 0;
    for c in comm.iter_mut() {
        if map[*c] == usize::MAX {
            map[*c] = next;
            next += 1;
        }
        *c = map[*c];
    }
    next
}

/// Louvain with a seeded node sweep order.
pub fn louvain(net: &ConceptNetwork, seed: u64, resolution: f64) -> Result<Partition> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution {resolution} must be positive")));
    }
    let two_m = 2.0 * net.total_weight();
    if two_m == 0.0 {
        return Err(Error::ZeroWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_network(net);
    let mut level_modularity = vec![level.quality(&membership, two_m, resolution)];

    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        if !level.move_nodes(&mut comm, two_m, resolution, &mut rng) {
            break;
        }
        let k = relabel(&mut comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        let q = level.quality(&comm, two_m, resolution);
        let prev = *level_modularity.last().unwrap();
        level_modularity.push(q);
        level = level.aggregate(&comm, k);
        if k == comm.len() || q - prev <= MOVE_EPS {
            break;
        }
    }

    let community_count = relabel(&mut membership);
    let modularity = eval_modularity(net, &membership)?;
    Ok(Partition {
        membership,
        community_count,
        modularity,
        seed,
        resolution,
        level_modularity,
    })
}

/// Run Louvain for seeds `base_seed .. base_seed + runs` in parallel and keep
/// the highest-modularity partition; equal modularity goes to the lower seed.
pub fn louvain_best(net: &ConceptNetwork, base_seed: u64, runs: usize, resolution: f64) -> Result<Partition> {
    if runs == 0 {
        return Err(Error::InvalidArgument("at least one Louvain run is required".into()));
    }
    let results: Vec<Partition> = (0..runs as u64)
        .into_par_iter()
        .map(|k| louvain(net, base_seed.wrapping_add(k), resolution))
        .collect::<Result<_>>()?;
    let mut best = results[0].clone();
    for p in &results[1..] {
        if p.modularity > best.modularity {
            best = p.clone();
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> ConceptNetwork {
        let mut g = ConceptNetwork::anonymous(6);
        for (i, j) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.set_weight(i, j, 1.0);
        }
        g
    }

    #[test]
    fn two_triangles_split() {
        for seed in 0..10 {
            let p = louvain(&two_triangles(), seed, 1.0).unwrap();
            assert_eq!(p.membership, vec![0, 0, 0, 1, 1, 1]);
            assert!((p.modularity - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_merges() {
        let mut g = ConceptNetwork::anonymous(2);
        g.set_weight(0, 1, 0.7);
        let p = louvain(&g, DEFAULT_SEED, 1.0).unwrap();
        assert_eq!(p.community_count, 1);
        assert!(p.modularity.abs() < 1e-15);
    }

    #[test]
    fn levels_are_monotone() {
        let mut g = ConceptNetwork::anonymous(12);
        let mut s = 7u64;
        for i in 0..12 {
            for j in (i + 1)..12 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (s >> 40).is_multiple_of(3) {
                    g.set_weight(i, j, ((s >> 20) % 100 + 1) as f64 / 100.0);
                }
            }
        }
        let p = louvain(&g, 3, 1.0).unwrap();
        for w in p.level_modularity.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!((-0.5..=1.0).contains(&p.modularity));
    }

    #[test]
    fn zero_weight_is_an_error() {
        assert!(matches!(
            louvain(&ConceptNetwork::anonymous(3), 1, 1.0),
            Err(Error::ZeroWeight)
        ));
    }

    #[test]
    fn best_of_many_is_deterministic() {
        let a = louvain_best(&two_triangles(), 42, 8, 1.0).unwrap();
        let b = louvain_best(&two_triangles(), 42, 8, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 42);
    }
}
