//! Histograms, survival curves, moments and inequality summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation.
pub fn accurate_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn mean(samples: &[f64]) -> f64 {
    accurate_sum(samples.iter().copied()) / samples.len() as f64
}

/// How bin edges are laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinScheme {
    /// Equal-width bins; the range defaults to the sample span.
    Linear {
        bins: usize,
        range: Option<(f64, f64)>,
    },
    /// Geometric bins from `min_positive` (default: smallest positive sample)
    /// up to `max` (default: largest sample). Values below the floor,
    /// including zeros, land in the underflow counter.
    Logarithmic {
        bins: usize,
        min_positive: Option<f64>,
        max: Option<f64>,
    },
    /// Caller-supplied strictly increasing edges.
    Edges(Vec<f64>),
}

impl BinScheme {
    pub fn linear(bins: usize, lo: f64, hi: f64) -> Self {
        BinScheme::Linear {
            bins,
            range: Some((lo, hi)),
        }
    }

    pub fn logarithmic(bins: usize, min_positive: f64, max: f64) -> Self {
        BinScheme::Logarithmic {
            bins,
            min_positive: Some(min_positive),
            max: Some(max),
        }
    }

    /// Resolves the scheme against a sample into concrete edges.
    pub fn edges_for(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let span = || {
            samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                })
        };
        let edges = match self {
            BinScheme::Linear { bins, range } => {
                if *bins == 0 {
                    return Err(Error::usage("histogram needs at least one bin"));
                }
                let (lo, hi) = match range {
                    Some(r) => *r,
                    None => {
                        let (lo, hi) = span();
                        // the largest sample must fall inside the half-open last bin
                        let hi = if hi > lo {
                            hi.next_up()
                        } else {
                            lo + lo.abs().max(1.0)
                        };
                        (lo, hi)
                    }
                };
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(Error::usage(format!("invalid linear range [{lo}, {hi})")));
                }
                let width = (hi - lo) / *bins as f64;
                let mut edges: Vec<f64> = (0..*bins).map(|k| lo + k as f64 * width).collect();
                edges.push(hi);
                edges
            }
            BinScheme::Logarithmic {
                bins,
                min_positive,
                max,
            } => {
                if *bins == 0 {
                    return Err(Error::usage("histogram needs at least one bin"));
                }
                let floor = match min_positive {
                    Some(v) => *v,
                    None => samples
                        .iter()
                        .copied()
                        .filter(|&x| x > 0.0)
                        .fold(f64::INFINITY, f64::min),
                };
                let top = match max {
                    Some(v) => *v,
                    None => span().1.next_up(),
                };
                if !(floor > 0.0 && floor.is_finite() && top.is_finite() && top > floor) {
                    return Err(Error::usage(format!(
                        "invalid logarithmic range [{floor}, {top}); need 0 < floor < top"
                    )));
                }
                let log_lo = floor.ln();
                let step = (top.ln() - log_lo) / *bins as f64;
                let mut edges: Vec<f64> = Vec::with_capacity(bins + 1);
                edges.push(floor);
                edges.extend((1..*bins).map(|k| (log_lo + k as f64 * step).exp()));
                edges.push(top);
                edges
            }
            BinScheme::Edges(edges) => edges.clone(),
        };
        check_edges(&edges)?;
        Ok(edges)
    }
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::usage("histogram needs at least two edges"));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage(
            "bin edges must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// Counts per half-open bin `[edge_k, edge_{k+1})`, with explicit
/// under- and overflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub n_total: u64,
}

impl Histogram {
    pub fn empty(edges: Vec<f64>) -> Result<Self> {
        check_edges(&edges)?;
        let bins = edges.len() - 1;
        Ok(Histogram {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
            n_total: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Adds one sample. NaN counts as overflow.
    pub fn add(&mut self, x: f64) {
        self.n_total += 1;
        let first = self.edges[0];
        let last = self.edges[self.edges.len() - 1];
        if x < first {
            self.underflow += 1;
            return;
        }
        if !(x < last) {
            self.overflow += 1;
            return;
        }
        // binary search over the edges: index of the last edge <= x
        let k = self.edges.partition_point(|&e| e <= x) - 1;
        self.counts[k] += 1;
    }

    pub fn extend_from(&mut self, samples: &[f64]) {
        for &x in samples {
            self.add(x);
        }
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.underflow = 0;
        self.overflow = 0;
        self.n_total = 0;
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        0.5 * (self.edges[k] + self.edges[k + 1])
    }

    /// Probability density per bin: `count / (n_total * width)`.
    pub fn density(&self) -> Vec<f64> {
        let n = self.n_total.max(1) as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 / (n * (self.edges[k + 1] - self.edges[k])))
            .collect()
    }

    /// Center of the bin with the largest count; the lowest such bin on ties.
    pub fn mode_bin_center(&self) -> Option<f64> {
        let mut best: Option<(usize, u64)> = None;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > 0 && best.is_none_or(|(_, b)| c > b) {
                best = Some((k, c));
            }
        }
        best.map(|(k, _)| self.bin_center(k))
    }

    /// Fraction of all samples below each edge, underflow included.
    pub fn cumulative_mass(&self) -> Vec<f64> {
        let n = self.n_total.max(1) as f64;
        let mut acc = self.underflow;
        let mut out = Vec::with_capacity(self.edges.len());
        out.push(acc as f64 / n);
        for &c in &self.counts {
            acc += c;
            out.push(acc as f64 / n);
        }
        out
    }

    /// Largest absolute gap between the two normalized cumulative bin masses.
    pub fn ks_distance(&self, other: &Histogram) -> Result<f64> {
        if self.edges != other.edges {
            return Err(Error::usage(
                "histograms were built with different bin edges",
            ));
        }
        if self.n_total == 0 || other.n_total == 0 {
            return Err(Error::usage("cannot compare an empty histogram"));
        }
        let a = self.cumulative_mass();
        let b = other.cumulative_mass();
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

pub fn build_histogram(samples: &[f64], scheme: &BinScheme) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::usage(
            "cannot build a histogram from an empty sample",
        ));
    }
    let mut hist = Histogram::empty(scheme.edges_for(samples)?)?;
    hist.extend_from(samples);
    Ok(hist)
}

/// Empirical survival function: at each distinct sample value `w`, the
/// fraction of samples `>= w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub points: Vec<(f64, f64)>,
    pub n_total: usize,
}

impl CcdfCurve {
    /// Fraction of samples `>= w`.
    pub fn at(&self, w: f64) -> f64 {
        let k = self.points.partition_point(|&(x, _)| x < w);
        self.points.get(k).map_or(0.0, |&(_, f)| f)
    }

    /// Weighted least-squares slope of `ln S(w)` against `ln w` on `n_points`
    /// log-spaced abscissae spanning `[lo, hi]`.
    pub fn loglog_slope(&self, lo: f64, hi: f64, n_points: usize) -> Result<f64> {
        if !(lo > 0.0 && hi > lo) || n_points < 2 {
            return Err(Error::usage(format!("invalid slope window [{lo}, {hi}]")));
        }
        let step = (hi / lo).ln() / (n_points - 1) as f64;
        // Var(ln S) ~ 1/(S n): weight each point by its surviving count.
        let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
        let mut pts = Vec::with_capacity(n_points);
        for k in 0..n_points {
            let lx = lo.ln() + k as f64 * step;
            let s = self.at(lx.exp());
            if s > 0.0 {
                let w = s * self.n_total as f64;
                sw += w;
                sx += w * lx;
                sy += w * s.ln();
                pts.push((lx, s.ln(), w));
            }
        }
        if pts.len() < 2 {
            return Err(Error::usage(
                "slope window holds fewer than two populated points",
            ));
        }
        let (mx, my) = (sx / sw, sy / sw);
        let sxy: f64 = pts.iter().map(|&(x, y, w)| w * (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|&(x, _, w)| w * (x - mx) * (x - mx)).sum();
        Ok(sxy / sxx)
    }

    /// Slope over the upper decade `[w_top / 10, w_top]`, where `w_top` is
    /// the 100th largest sample; sparser ends make the slope too noisy.
    pub fn top_decade_slope(&self) -> Result<f64> {
        const KEEP: f64 = 100.0;
        let cutoff = KEEP / self.n_total as f64;
        let k = self.points.partition_point(|&(_, f)| f > cutoff);
        let (w_top, _) = *self
            .points
            .get(k.min(self.points.len().saturating_sub(1)))
            .ok_or_else(|| Error::usage("empty ccdf"))?;
        self.loglog_slope(w_top / 10.0, w_top, 21)
    }

    /// Slope over the single decade `[w_lo, 10 w_lo]`.
    pub fn decade_slope_from(&self, w_lo: f64) -> Result<f64> {
        self.loglog_slope(w_lo, 10.0 * w_lo, 21)
    }

    /// Keeps at most `max_points` points, spaced geometrically in survival
    /// fraction; first and last points are always kept.
    pub fn thinned(&self, max_points: usize) -> CcdfCurve {
        if self.points.len() <= max_points || max_points < 2 {
            return self.clone();
        }
        let n = self.points.len();
        let mut idx: Vec<usize> = Vec::with_capacity(max_points);
        let last_f = self.points[n - 1].1;
        for k in 0..max_points {
            let f = last_f.powf(k as f64 / (max_points - 1) as f64);
            // first point whose fraction is <= f
            let i = self.points.partition_point(|&(_, p)| p > f).min(n - 1);
            if idx.last() != Some(&i) {
                idx.push(i);
            }
        }
        CcdfCurve {
            points: idx.into_iter().map(|i| self.points[i]).collect(),
            n_total: self.n_total,
        }
    }
}

pub fn empirical_ccdf(samples: &[f64]) -> Result<CcdfCurve> {
    if samples.is_empty() {
        return Err(Error::usage("cannot build a ccdf from an empty sample"));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let w = sorted[i];
        points.push((w, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == w {
            i += 1;
        }
    }
    Ok(CcdfCurve { points, n_total: n })
}

/// Raw moments `m_j = mean(x^j)` for `j = 1..=4`, plus the population variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub raw: [f64; 4],
}

pub fn moments(samples: &[f64]) -> Result<Moments> {
    if samples.is_empty() {
        return Err(Error::usage("moments of an empty sample"));
    }
    let n = samples.len() as f64;
    let mut raw = [0.0; 4];
    for (j, m) in raw.iter_mut().enumerate() {
        let p = j as i32 + 1;
        *m = accurate_sum(samples.iter().map(|x| x.powi(p))) / n;
    }
    let mu = raw[0];
    let variance = (accurate_sum(samples.iter().map(|x| (x - mu) * (x - mu))) / n).max(0.0);
    Ok(Moments {
        mean: mu,
        variance,
        raw,
    })
}

/// Gini coefficient via the sorted-index formula
/// `G = 2 Σ i x_(i) / (n Σ x) - (n + 1) / n`.
pub fn gini(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::usage("gini of an empty sample"));
    }
    if samples.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::domain("gini requires non-negative samples"));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len() as f64;
    let total = accurate_sum(sorted.iter().copied());
    if total <= 0.0 {
        return Err(Error::domain("gini is undefined for an all-zero sample"));
    }
    let weighted = accurate_sum(sorted.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x));
    Ok((2.0 * weighted / (n * total) - (n + 1.0) / n).max(0.0))
}

pub fn normalize_by_mean(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::usage("cannot normalize an empty sample"));
    }
    let m = mean(samples);
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!(
            "normalization needs a positive mean, got {m}"
        )));
    }
    Ok(samples.iter().map(|x| x / m).collect())
}

pub(crate) fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::usage("ks distance of an empty sample"));
    }
    Ok(ks_distance_sorted(&sorted_copy(samples), cdf))
}

/// As [`ks_distance`] for a sample already sorted ascending.
pub fn ks_distance_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution, `P(K > z)`.
pub fn kolmogorov_survival(z: f64) -> f64 {
    if z < 0.2 {
        return 1.0;
    }
    if z < 1.0 {
        // theta-function form converges quickly for small z
        let v = -std::f64::consts::PI.powi(2) / (8.0 * z * z);
        let s: f64 = (0..6)
            .map(|k| {
                let odd = (2 * k + 1) as f64;
                (odd * odd * v).exp()
            })
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / z * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * z * z).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a one-sample KS distance `d` over `n` samples,
/// with the usual finite-size correction of the scaling factor.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// Linear-interpolated quantile of an ascending sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let t = pos - lo as f64;
    sorted[lo] + t * (sorted[hi] - sorted[lo])
}

/// Mean, variance, raw moments, modal bin and Gini of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub raw_moments: [f64; 4],
    pub mode_bin_center: Option<f64>,
    pub gini: f64,
}

pub fn summarize(samples: &[f64], scheme: &BinScheme) -> Result<SummaryStats> {
    let m = moments(samples)?;
    let hist = build_histogram(samples, scheme)?;
    Ok(SummaryStats {
        n: samples.len(),
        mean: m.mean,
        variance: m.variance,
        raw_moments: m.raw,
        mode_bin_center: hist.mode_bin_center(),
        gini: gini(samples)?,
    })
}
