//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use idnet_core::graph::ConceptNetwork;
use rand::Rng;

pub const REL_TIE: f64 = 1e-9;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

/// Random graph: either continuous weights or weights from {1/4, 1/2, 1}
/// (integer path lengths, so shortest-path ties are common).
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, dyadic: bool) -> ConceptNetwork {
    let p = rng.random_range(0.3..0.9);
    let mut g = ConceptNetwork::anonymous(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                let w = if dyadic {
                    [0.25, 0.5, 1.0][rng.random_range(0..3)]
                } else {
                    rng.random_range(0.01..1.0)
                };
                g.set_weight(i, j, w);
            }
        }
    }
    g
}

/// Floyd–Warshall distances with length `1/w`.
pub fn floyd_warshall(g: &ConceptNetwork) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        for j in 0..n {
            let w = g.weight(i, j);
            if w > 0.0 {
                d[i][j] = 1.0 / w;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// All simple paths from `s` to `t` no longer than `bound` (with relative
/// slack), as `(length, interior nodes)`.
pub fn simple_paths(g: &ConceptNetwork, s: usize, t: usize, bound: f64) -> Vec<(f64, Vec<usize>)> {
    fn go(
        g: &ConceptNetwork,
        u: usize,
        t: usize,
        len: f64,
        bound: f64,
        on: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if len > bound * (1.0 + 1e-6) {
            return;
        }
        if u == t {
            out.push((len, path[1..path.len() - 1].to_vec()));
            return;
        }
        for v in 0..g.node_count() {
            let w = g.weight(u, v);
            if w > 0.0 && !on[v] {
                on[v] = true;
                path.push(v);
                go(g, v, t, len + 1.0 / w, bound, on, path, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    let mut path = vec![s];
    let mut out = Vec::new();
    go(g, s, t, 0.0, bound, &mut on, &mut path, &mut out);
    out
}

/// Shortest distance and shortest-path membership counts by enumeration.
pub fn enumerate_pair(g: &ConceptNetwork, s: usize, t: usize, bound: f64) -> Option<(f64, f64, Vec<f64>)> {
    let paths = simple_paths(g, s, t, bound);
    let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let mut through = vec![0.0; g.node_count()];
    let mut count = 0.0;
    for (len, interior) in &paths {
        if (len - best).abs() <= REL_TIE * best {
            count += 1.0;
            for &v in interior {
                through[v] += 1.0;
            }
        }
    }
    Some((best, count, through))
}

/// ASPL over all pairs by enumeration; `None` when any pair is disconnected.
pub fn oracle_aspl(g: &ConceptNetwork) -> Option<f64> {
    let fw = floyd_warshall(g);
    let n = g.node_count();
    let mut total = 0.0;
    let mut pairs = 0.0;
    for s in 0..n {
        for t in (s + 1)..n {
            if !fw[s][t].is_finite() {
                return None;
            }
            let (d, _, _) = enumerate_pair(g, s, t, fw[s][t])?;
            total += d;
            pairs += 1.0;
        }
    }
    Some(total / pairs)
}

pub fn oracle_betweenness(g: &ConceptNetwork) -> Vec<f64> {
    let fw = floyd_warshall(g);
    let n = g.node_count();
    let mut b = vec![0.0; n];
    if n < 3 {
        return b;
    }
    for s in 0..n {
        for t in (s + 1)..n {
            if !fw[s][t].is_finite() {
                continue;
            }
            let (_, count, through) = enumerate_pair(g, s, t, fw[s][t]).unwrap();
            for v in 0..n {
                b[v] += through[v] / count;
            }
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64 / 2.0;
    b.iter().map(|x| x / norm).collect()
}

/// Every connected triple `i - j - k` (centre `j`, `i < k`).
pub fn oracle_gcc(g: &ConceptNetwork) -> Option<f64> {
    let n = g.node_count();
    let (mut closed, mut total) = (0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            for k in (i + 1)..n {
                if i == j || k == j {
                    continue;
                }
                let (a, b) = (g.weight(i, j), g.weight(j, k));
                if a > 0.0 && b > 0.0 {
                    let v = (a + b) / 2.0;
                    total += v;
                    if g.weight(i, k) > 0.0 {
                        closed += v;
                    }
                }
            }
        }
    }
    (total > 0.0).then(|| closed / total)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Pearson correlation of endpoint strengths over both orientations of
/// every link.
pub fn oracle_assortativity(g: &ConceptNetwork) -> Option<f64> {
    let n = g.node_count();
    let s: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g.weight(i, j)).sum()).collect();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for i in 0..n {
        for j in 0..n {
            if i != j && g.weight(i, j) > 0.0 {
                x.push(s[i]);
                y.push(s[j]);
            }
        }
    }
    if x.len() < 4 {
        return None;
    }
    let r = pearson(&x, &y);
    r.is_finite().then_some(r)
}

/// Literal ordered-pair double sum.
pub fn oracle_modularity(g: &ConceptNetwork, c: &[usize]) -> f64 {
    let n = g.node_count();
    let s: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g.weight(i, j)).sum()).collect();
    let two_m: f64 = s.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if c[i] == c[j] {
                q += g.weight(i, j) - s[i] * s[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Largest component size by BFS over links with `w > t`.
pub fn oracle_lcc(g: &ConceptNetwork, t: f64) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut best = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for v in 0..n {
                if !seen[v] && g.weight(u, v) > t {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Share of nodes on which `found` agrees with `truth` under the best
/// one-to-one matching of found communities to planted blocks.
pub fn agreement(found: &[usize], truth: &[usize]) -> f64 {
    let kf = found.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let mut overlap = vec![vec![0usize; kt]; kf];
    for (&f, &t) in found.iter().zip(truth) {
        overlap[f][t] += 1;
    }
    // exhaustive assignment over found communities (kf is small here)
    fn best(overlap: &[Vec<usize>], row: usize, used: &mut Vec<bool>) -> usize {
        if row == overlap.len() {
            return 0;
        }
        let mut top = best(overlap, row + 1, used);
        for t in 0..used.len() {
            if !used[t] {
                used[t] = true;
                top = top.max(overlap[row][t] + best(overlap, row + 1, used));
                used[t] = false;
            }
        }
        top
    }
    let mut used = vec![false; kt];
    best(&overlap, 0, &mut used) as f64 / found.len() as f64
}
