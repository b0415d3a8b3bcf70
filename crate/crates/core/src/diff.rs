//! Signed difference networks between two snapshots on one node universe,
//! link co-location statistics, and difference-versus-reference scaling.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ConceptNetwork, NetworkMeta};
use crate::stats::{binned_means, ols, BinnedMean, Regression};

pub const DEFAULT_COLOCATION_BINS: usize = 15;

/// `A - B` split into its positive and negative parts, both non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDifference {
    pub positive: ConceptNetwork,
    pub negative: ConceptNetwork,
    /// Divisor applied to both parts: mean link weight of `A`.
    pub normalization: Option<f64>,
}

impl SignedDifference {
    /// Signed value `positive - negative` for the pair.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.positive.weight(i, j) - self.negative.weight(i, j)
    }
}

/// Mean weight over the positive-weight links of `net`.
pub fn mean_link_weight(net: &ConceptNetwork) -> Result<f64> {
    let m = net.edge_count();
    if m == 0 {
        return Err(Error::ZeroWeight);
    }
    Ok(net.total_weight() / m as f64)
}

/// Build `A - B`. With `normalize`, differences are divided by the mean link
/// weight of `A`; the sign pattern is unchanged.
pub fn signed_difference(a: &ConceptNetwork, b: &ConceptNetwork, normalize: bool) -> Result<SignedDifference> {
    if !a.same_universe(b) {
        return Err(Error::UniverseMismatch(format!(
            "{} has {} nodes, {} has {}",
            a.meta.name(),
            a.node_count(),
            b.meta.name(),
            b.node_count()
        )));
    }
    let norm = if normalize { Some(mean_link_weight(a)?) } else { None };
    let scale = norm.unwrap_or(1.0);
    let meta = |tier: &str| NetworkMeta {
        tier: format!("{tier}({}-{})", a.meta.tier, b.meta.tier),
        year: a.meta.year,
        documents: 0,
        zero_frequency: Vec::new(),
    };
    let mut positive = ConceptNetwork::empty(a.nodes().to_vec(), meta("pos"));
    let mut negative = ConceptNetwork::empty(a.nodes().to_vec(), meta("neg"));
    let n = a.node_count();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (a.weight(i, j) - b.weight(i, j)) / scale;
            if d > 0.0 {
                positive.set_weight(i, j, d);
            } else if d < 0.0 {
                negative.set_weight(i, j, -d);
            }
        }
    }
    Ok(SignedDifference {
        positive,
        negative,
        normalization: norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColocationPair {
    PosPos,
    NegNeg,
    PosNeg,
    NegPos,
}

impl ColocationPair {
    pub const ALL: [ColocationPair; 4] = [
        ColocationPair::PosPos,
        ColocationPair::NegNeg,
        ColocationPair::PosNeg,
        ColocationPair::NegPos,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ColocationPair::PosPos => "pos-pos",
            ColocationPair::NegNeg => "neg-neg",
            ColocationPair::PosNeg => "pos-neg",
            ColocationPair::NegPos => "neg-pos",
        }
    }

    /// `(focal, neighbour)` networks for this pairing.
    pub fn select(self, d: &SignedDifference) -> (&ConceptNetwork, &ConceptNetwork) {
        match self {
            ColocationPair::PosPos => (&d.positive, &d.positive),
            ColocationPair::NegNeg => (&d.negative, &d.negative),
            ColocationPair::PosNeg => (&d.positive, &d.negative),
            ColocationPair::NegPos => (&d.negative, &d.positive),
        }
    }
}

impl FromStr for ColocationPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ColocationPair::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown co-location pairing {s:?}")))
    }
}

/// For every focal link `(u, v)` and every neighbour-network link sharing
/// exactly one endpoint with it, the pair `(focal weight, neighbour weight)`.
pub fn colocation_samples(focal: &ConceptNetwork, neighbour: &ConceptNetwork) -> Result<(Vec<f64>, Vec<f64>)> {
    if !focal.same_universe(neighbour) {
        return Err(Error::UniverseMismatch("co-location networks differ".into()));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (u, v, w) in focal.edges() {
        for (end, other) in [(u, v), (v, u)] {
            for (k, wn) in neighbour.neighbors(end) {
                if k != other {
                    x.push(w);
                    y.push(wn);
                }
            }
        }
    }
    Ok((x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Colocation {
    pub pairing: ColocationPair,
    pub samples: usize,
    pub regression: Regression,
    pub bins: Vec<BinnedMean>,
}

pub fn colocation(d: &SignedDifference, pairing: ColocationPair, bins: usize) -> Result<Colocation> {
    let (focal, neighbour) = pairing.select(d);
    colocation_between(focal, neighbour, pairing, bins)
}

pub fn colocation_between(
    focal: &ConceptNetwork,
    neighbour: &ConceptNetwork,
    pairing: ColocationPair,
    bins: usize,
) -> Result<Colocation> {
    let (x, y) = colocation_samples(focal, neighbour)?;
    let regression = ols(&x, &y)?;
    Ok(Colocation {
        pairing,
        samples: x.len(),
        regression,
        bins: binned_means(&x, &y, bins)?,
    })
}

/// Log-log fit `|d| = amplitude · w^α` over one sign of the difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub alpha: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scaling {
    pub label: String,
    pub positive: Option<ScalingFit>,
    pub negative: Option<ScalingFit>,
    /// Why a branch could not be fitted.
    pub undefined: Vec<String>,
    /// Reference links whose difference is exactly zero.
    pub zero_difference: usize,
    /// Nonzero differences on pairs where the reference has no link.
    pub no_reference: usize,
}

/// Samples `(w_ref, |d|)` per sign, over reference links with `w > 0`.
pub struct ScalingSamples {
    pub positive: (Vec<f64>, Vec<f64>),
    pub negative: (Vec<f64>, Vec<f64>),
    pub zero_difference: usize,
    pub no_reference: usize,
}

pub fn scaling_samples(inputs: &[(&SignedDifference, &ConceptNetwork)]) -> Result<ScalingSamples> {
    let mut s = ScalingSamples {
        positive: (Vec::new(), Vec::new()),
        negative: (Vec::new(), Vec::new()),
        zero_difference: 0,
        no_reference: 0,
    };
    for (d, reference) in inputs {
        if !d.positive.same_universe(reference) {
            return Err(Error::UniverseMismatch("difference and reference differ".into()));
        }
        let n = reference.node_count();
        for i in 0..n {
            for j in (i + 1)..n {
                let (w, p, q) = (reference.weight(i, j), d.positive.weight(i, j), d.negative.weight(i, j));
                if w > 0.0 {
                    if p > 0.0 {
                        s.positive.0.push(w);
                        s.positive.1.push(p);
                    } else if q > 0.0 {
                        s.negative.0.push(w);
                        s.negative.1.push(q);
                    } else {
                        s.zero_difference += 1;
                    }
                } else if p > 0.0 || q > 0.0 {
                    s.no_reference += 1;
                }
            }
        }
    }
    Ok(s)
}

pub fn fit_scaling(w: &[f64], d: &[f64]) -> Result<ScalingFit> {
    if w.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: w.len() });
    }
    let x: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let r = ols(&x, &y)?;
    Ok(ScalingFit {
        alpha: r.slope,
        amplitude: r.intercept.exp(),
        r_squared: r.r_squared,
        n: r.n,
    })
}

/// Fit both signs, pooling every `(difference, reference)` input.
pub fn diff_vs_reference_scaling(label: &str, inputs: &[(&SignedDifference, &ConceptNetwork)]) -> Result<Scaling> {
    let s = scaling_samples(inputs)?;
    let mut undefined = Vec::new();
    let mut fit = |name: &str, (w, d): &(Vec<f64>, Vec<f64>)| match fit_scaling(w, d) {
        Ok(f) => Some(f),
        Err(e) => {
            undefined.push(format!("{name}: {e}"));
            None
        }
    };
    let positive = fit("positive", &s.positive);
    let negative = fit("negative", &s.negative);
    Ok(Scaling {
        label: label.to_string(),
        positive,
        negative,
        undefined,
        zero_difference: s.zero_difference,
        no_reference: s.no_reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (ConceptNetwork, ConceptNetwork) {
        let mut a = ConceptNetwork::anonymous(4);
        let mut b = ConceptNetwork::anonymous(4);
        a.set_weight(0, 1, 0.5);
        a.set_weight(1, 2, 0.2);
        a.set_weight(2, 3, 0.3);
        b.set_weight(0, 1, 0.25);
        b.set_weight(1, 2, 0.4);
        b.set_weight(0, 3, 0.1);
        (a, b)
    }

    #[test]
    fn parts_reconstruct_and_split() {
        let (a, b) = pair();
        let d = signed_difference(&a, &b, false).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d.value(i, j), a.weight(i, j) - b.weight(i, j));
                assert!(d.positive.weight(i, j) == 0.0 || d.negative.weight(i, j) == 0.0);
            }
        }
        assert_eq!(d.positive.weight(0, 1), 0.25);
        assert!((d.negative.weight(1, 2) - 0.2).abs() < 1e-15);
        assert_eq!(d.negative.weight(0, 3), 0.1);
    }

    #[test]
    fn antisymmetric() {
        let (a, b) = pair();
        let ab = signed_difference(&a, &b, false).unwrap();
        let ba = signed_difference(&b, &a, false).unwrap();
        assert_eq!(ab.positive.dense(), ba.negative.dense());
        assert_eq!(ab.negative.dense(), ba.positive.dense());
    }

    #[test]
    fn normalisation_keeps_signs() {
        let (a, b) = pair();
        let raw = signed_difference(&a, &b, false).unwrap();
        let norm = signed_difference(&a, &b, true).unwrap();
        let mean = (0.5 + 0.2 + 0.3) / 3.0;
        assert_eq!(norm.normalization, Some(mean));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(raw.value(i, j).signum(), norm.value(i, j).signum());
            }
        }
    }

    #[test]
    fn universe_mismatch() {
        let (a, _) = pair();
        let c = ConceptNetwork::anonymous(3);
        assert!(matches!(signed_difference(&a, &c, false), Err(Error::UniverseMismatch(_))));
    }

    #[test]
    fn colocation_counts_adjacent_links() {
        // path 0-1-2-3: link (0,1) touches (1,2); (1,2) touches both others
        let mut g = ConceptNetwork::anonymous(4);
        g.set_weight(0, 1, 0.1);
        g.set_weight(1, 2, 0.2);
        g.set_weight(2, 3, 0.3);
        let (x, y) = colocation_samples(&g, &g).unwrap();
        let mut pairs: Vec<(f64, f64)> = x.into_iter().zip(y).collect();
        pairs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert_eq!(pairs, vec![(0.1, 0.2), (0.2, 0.1), (0.2, 0.3), (0.3, 0.2)]);
    }

    #[test]
    fn uniform_colocation_is_flat() {
        let mut g = ConceptNetwork::anonymous(5);
        for i in 0..5 {
            for j in (i + 1)..5 {
                g.set_weight(i, j, 0.3);
            }
        }
        let c = colocation_between(&g, &g, ColocationPair::PosPos, 5).unwrap();
        assert_eq!(c.regression.slope, 0.0);
        assert_eq!(c.regression.r_squared, 0.0);
    }

    #[test]
    fn scaling_recovers_exponent() {
        let n = 12;
        let mut a = ConceptNetwork::anonymous(n);
        let mut b = ConceptNetwork::anonymous(n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                k += 1;
                let w = 0.01 + 0.9 * (k as f64 / 66.0);
                a.set_weight(i, j, w);
                let d = 0.2 * w.powf(0.7);
                b.set_weight(i, j, if k % 2 == 0 { w - d.min(w / 2.0) } else { w + d });
            }
        }
        let d = signed_difference(&a, &b, false).unwrap();
        let s = diff_vs_reference_scaling("t", &[(&d, &a)]).unwrap();
        let neg = s.negative.unwrap();
        assert!((neg.alpha - 0.7).abs() < 1e-9, "{}", neg.alpha);
        assert!((neg.amplitude - 0.2).abs() < 1e-9);
    }

    #[test]
    fn scaling_needs_three_points() {
        assert!(matches!(
            fit_scaling(&[0.1, 0.2], &[0.1, 0.2]),
            Err(Error::InsufficientSamples { needed: 3, got: 2 })
        ));
    }
}
