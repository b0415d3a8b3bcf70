//! Regression, log-binned histograms and tail fits.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_HIST_BINS: usize = 30;
pub const MIN_POWER_LAW_TAIL: usize = 50;
pub const MIN_EXPONENTIAL_SAMPLES: usize = 20;

/// Ordinary least squares `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// OLS fit. Constant `y` gives slope 0 and R² 0 whatever `x` does; constant
/// `x` with varying `y` has no slope.
pub fn ols(x: &[f64], y: &[f64]) -> Result<Regression> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("x and y differ in length".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if syy == 0.0 || y.iter().all(|&v| v == y[0]) {
        return Ok(Regression {
            slope: 0.0,
            intercept: y[0],
            r_squared: 0.0,
            n,
        });
    }
    if sxx == 0.0 || x.iter().all(|&v| v == x[0]) {
        return Err(Error::UndefinedSlope);
    }
    let slope = sxy / sxx;
    Ok(Regression {
        slope,
        intercept: my - slope * mx,
        r_squared: (sxy * sxy / (sxx * syy)).min(1.0),
        n,
    })
}

/// `bins + 1` logarithmically spaced edges from `lo` to `hi` (both > 0).
pub fn log_edges(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if bins == 0 || !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "log bins need 0 < lo < hi and bins >= 1 (lo={lo}, hi={hi}, bins={bins})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut edges: Vec<f64> = (0..=bins)
        .map(|k| (a + (b - a) * k as f64 / bins as f64).exp())
        .collect();
    edges[0] = lo;
    edges[bins] = hi;
    Ok(edges)
}

/// Bin index of `x` within `edges` (last bin closed on the right).
fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let bins = edges.len() - 1;
    if x < edges[0] || x > edges[bins] {
        return None;
    }
    // first edge strictly greater than x, minus one
    let k = edges.partition_point(|&e| e <= x);
    Some(k.saturating_sub(1).min(bins - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `count / (n_positive · width)`.
    pub density: Vec<f64>,
    /// Samples that are zero or negative; never binned.
    pub excluded_nonpositive: usize,
    /// Positive samples outside the requested range.
    pub out_of_range: usize,
    pub positive: usize,
}

impl BinnedHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| (e[0] * e[1]).sqrt()).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| e[1] - e[0]).collect()
    }

    /// `Σ density · width`: the share of positive samples that were binned.
    pub fn mass(&self) -> f64 {
        self.density.iter().zip(self.widths()).map(|(d, w)| d * w).sum()
    }

    /// Slope of log density against log bin centre over bins with at least
    /// `min_count` samples.
    pub fn log_log_slope(&self, min_count: usize) -> Result<Regression> {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for ((c, d), &k) in self.centers().iter().zip(&self.density).zip(&self.counts) {
            if k >= min_count.max(1) {
                x.push(c.ln());
                y.push(d.ln());
            }
        }
        ols(&x, &y)
    }
}

/// Histogram on `bins` log-spaced bins. Without a range, the bins span the
/// smallest to largest positive sample.
pub fn log_binned_histogram(samples: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<BinnedHistogram> {
    let positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    let excluded = samples.len() - positive.len();
    if positive.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let (lo, hi) = match range {
        Some(r) => r,
        None => {
            let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = positive.iter().copied().fold(0.0, f64::max);
            if hi == lo {
                (lo, lo * (1.0 + 1e-9))
            } else {
                (lo, hi)
            }
        }
    };
    let edges = log_edges(lo, hi, bins)?;
    let mut counts = vec![0usize; bins];
    let mut out_of_range = 0;
    for &x in &positive {
        match bin_of(&edges, x) {
            Some(k) => counts[k] += 1,
            None => out_of_range += 1,
        }
    }
    let n = positive.len().max(1) as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (n * (e[1] - e[0])))
        .collect();
    Ok(BinnedHistogram {
        edges,
        counts,
        density,
        excluded_nonpositive: excluded,
        out_of_range,
        positive: positive.len(),
    })
}

/// Mean of `y` within log-spaced bins of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinnedMean {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean; `None` below two samples.
    pub stderr: Option<f64>,
}

pub fn binned_means(x: &[f64], y: &[f64], bins: usize) -> Result<Vec<BinnedMean>> {
    let pos: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).filter(|p| p.0 > 0.0).collect();
    if pos.is_empty() {
        return Ok(Vec::new());
    }
    let lo = pos.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let mut hi = pos.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi == lo {
        hi = lo * (1.0 + 1e-9);
    }
    let edges = log_edges(lo, hi, bins)?;
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (a, b) in pos {
        if let Some(k) = bin_of(&edges, a) {
            groups[k].push(b);
        }
    }
    Ok(groups
        .iter()
        .zip(edges.windows(2))
        .filter(|(g, _)| !g.is_empty())
        .map(|(g, e)| {
            let n = g.len() as f64;
            let mean = g.iter().sum::<f64>() / n;
            let stderr = (g.len() >= 2).then(|| {
                let var = g.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            });
            BinnedMean {
                lo: e[0],
                hi: e[1],
                center: (e[0] * e[1]).sqrt(),
                count: g.len(),
                mean,
                stderr,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailFamily {
    PowerLaw,
    TruncatedExponential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub family: TailFamily,
    /// Exponent α for the power law, rate λ for the exponential.
    pub parameter: f64,
    pub x_min: f64,
    /// Upper truncation for the exponential.
    pub x_max: Option<f64>,
    pub n_tail: usize,
    /// Kolmogorov–Smirnov distance between the tail sample and the fit.
    pub ks: f64,
}

fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Continuous power-law MLE on samples `>= x_min`:
/// `α = 1 + n / Σ ln(x / x_min)`.
pub fn fit_power_law_tail(samples: &[f64], x_min: f64) -> Result<TailFit> {
    if !(x_min > 0.0) {
        return Err(Error::InvalidArgument(format!("x_min must be positive, got {x_min}")));
    }
    let mut tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.len() < MIN_POWER_LAW_TAIL {
        return Err(Error::InsufficientSamples {
            needed: MIN_POWER_LAW_TAIL,
            got: tail.len(),
        });
    }
    let log_sum: f64 = tail.iter().map(|x| (x / x_min).ln()).sum();
    if log_sum == 0.0 {
        return Err(Error::DegenerateTail);
    }
    let alpha = 1.0 + tail.len() as f64 / log_sum;
    tail.sort_by(f64::total_cmp);
    let ks = ks_distance(&tail, |x| 1.0 - (x / x_min).powf(1.0 - alpha));
    Ok(TailFit {
        family: TailFamily::PowerLaw,
        parameter: alpha,
        x_min,
        x_max: None,
        n_tail: tail.len(),
        ks,
    })
}

/// Mean of `x - a` under density ∝ `exp(-λ (x - a))` on `[a, a + len]`.
fn truncated_mean(lambda: f64, len: f64) -> f64 {
    let z = lambda * len;
    if z.abs() < 1e-6 {
        // series around λ = 0
        len / 2.0 - lambda * len * len / 12.0
    } else {
        1.0 / lambda - len / z.exp_m1()
    }
}

fn truncated_cdf(x: f64, a: f64, len: f64, lambda: f64) -> f64 {
    let t = x - a;
    let z = lambda * len;
    if z.abs() < 1e-12 {
        t / len
    } else {
        (-lambda * t).exp_m1() / (-z).exp_m1()
    }
}

/// Exponential MLE truncated to `[a, b]`. The rate is solved on the whole
/// real line, so flat or rising data yield λ ≤ 0.
pub fn fit_exponential(samples: &[f64], a: f64, b: f64) -> Result<TailFit> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    let mut s: Vec<f64> = samples.iter().copied().filter(|&x| x >= a && x <= b).collect();
    if s.len() < MIN_EXPONENTIAL_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_EXPONENTIAL_SAMPLES,
            got: s.len(),
        });
    }
    let len = b - a;
    let target = s.iter().map(|x| x - a).sum::<f64>() / s.len() as f64;
    if !(target > 0.0 && target < len) {
        return Err(Error::DegenerateTail);
    }
    // truncated_mean falls from len (λ → -∞) to 0 (λ → ∞)
    let mut bound = 1.0 / len;
    while truncated_mean(bound, len) > target || truncated_mean(-bound, len) < target {
        bound *= 2.0;
        if bound > 1e12 / len {
            return Err(Error::DegenerateTail);
        }
    }
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean(mid, len) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * mid.abs().max(1.0 / len) {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    s.sort_by(f64::total_cmp);
    let ks = ks_distance(&s, |x| truncated_cdf(x, a, len, lambda));
    Ok(TailFit {
        family: TailFamily::TruncatedExponential,
        parameter: lambda,
        x_min: a,
        x_max: Some(b),
        n_tail: s.len(),
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ols_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let r = ols(&x, &y).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!((r.intercept - 1.0).abs() < 1e-12);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ols_degenerate() {
        let r = ols(&[0.3, 0.3, 0.3], &[0.3, 0.3, 0.3]).unwrap();
        assert_eq!((r.slope, r.r_squared), (0.0, 0.0));
        assert!(matches!(ols(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedSlope)));
        assert!(ols(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn histogram_mass_and_exclusions() {
        let s = [0.0, 0.0, 0.1, 0.2, 0.4, 0.8, 1.6];
        let h = log_binned_histogram(&s, 4, None).unwrap();
        assert_eq!(h.excluded_nonpositive, 2);
        assert_eq!(h.counts.iter().sum::<usize>(), 5);
        assert!((h.mass() - 1.0).abs() < 1e-12);
        let h = log_binned_histogram(&s, 4, Some((0.15, 1.0))).unwrap();
        assert_eq!(h.out_of_range, 2);
        assert!((h.mass() - 3.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_recovers_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alpha = 2.5;
        let s: Vec<f64> = (0..20_000)
            .map(|_| {
                let u: f64 = rng.random();
                (1.0 - u).powf(-1.0 / (alpha - 1.0))
            })
            .collect();
        let f = fit_power_law_tail(&s, 1.0).unwrap();
        assert!((f.parameter - alpha).abs() < 0.05, "{}", f.parameter);
        assert!(f.ks < 0.02);
    }

    #[test]
    fn power_law_errors() {
        assert!(matches!(
            fit_power_law_tail(&[2.0; 10], 1.0),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(fit_power_law_tail(&[1.0; 60], 1.0), Err(Error::DegenerateTail)));
    }

    #[test]
    fn exponential_recovers_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (lambda, a, b): (f64, f64, f64) = (4.0, 0.0, 1.0);
        // inverse CDF of the truncated law
        let norm = 1.0 - (-lambda * (b - a)).exp();
        let s: Vec<f64> = (0..20_000)
            .map(|_| {
                let u: f64 = rng.random();
                a - (1.0 - u * norm).ln() / lambda
            })
            .collect();
        let f = fit_exponential(&s, a, b).unwrap();
        assert!((f.parameter - lambda).abs() < 0.15, "{}", f.parameter);
    }

    #[test]
    fn flat_data_gives_near_zero_rate() {
        let s: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect();
        let f = fit_exponential(&s, 0.0, 1.0).unwrap();
        assert!(f.parameter.abs() < 1e-6, "{}", f.parameter);
    }
}
