//! Estimators for the equilibrium families: exponential, Gamma in the
//! `w^n e^{-w/T}` convention, Pareto tail, log-normal, and a piecewise
//! bulk + power-law tail with a fitted crossover `w_c`.
//!
//! The Gamma family is reported with exponent `n`, which is the standard
//! shape parameter minus one: a density `∝ w^n e^{-w/T}` is `Gamma(n + 1, T)`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{checked_gamma_lr, digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::statistics::{accurate_sum, ks_distance_sorted, quantile_sorted, sorted_copy};

/// Fewest samples the tail estimator accepts.
pub const MIN_TAIL_SAMPLES: usize = 10;

/// Fewest samples `fit_piecewise` accepts.
pub const MIN_PIECEWISE_SAMPLES: usize = 100;

const GAMMA_SCORE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Gamma,
    PowerLawTail,
    LogNormal,
    PiecewiseBulkTail,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Gamma => "gamma",
            Family::PowerLawTail => "power_law_tail",
            Family::LogNormal => "log_normal",
            Family::PiecewiseBulkTail => "piecewise",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "exponential" => Family::Exponential,
            "gamma" => Family::Gamma,
            "power_law_tail" | "power_law" | "pareto" => Family::PowerLawTail,
            "log_normal" | "lognormal" => Family::LogNormal,
            "piecewise" => Family::PiecewiseBulkTail,
            _ => return None,
        })
    }
}

/// Family used below the crossover in [`fit_piecewise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BulkFamily {
    Gamma,
    #[default]
    LogNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWarning {
    /// Log-normal fit on a sample with a single distinct value.
    DegenerateSigma,
    /// The power-law segment did not describe the tail better than the bulk.
    TailRejected,
    /// No crossover candidate left enough tail samples.
    NoTailCandidates,
    /// Gamma likelihood root search stopped on its iteration cap.
    MleNotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitParams {
    Exponential {
        temperature: f64,
    },
    Gamma {
        n: f64,
        temperature: f64,
        /// Moment-inversion starting point `(n, T)`.
        initial: (f64, f64),
    },
    PowerLawTail {
        alpha: f64,
        w_min: f64,
        n_tail: usize,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Piecewise {
        bulk: Box<FitResult>,
        tail: Box<FitResult>,
        w_c: f64,
        /// Share of samples at or above `w_c`.
        tail_fraction: f64,
        /// Larger of the two segment KS distances (the crossover objective).
        segment_ks: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: FitParams,
    pub ks: f64,
    pub n_used: usize,
    pub warnings: Vec<FitWarning>,
}

impl FitResult {
    pub fn family(&self) -> Family {
        match self.params {
            FitParams::Exponential { .. } => Family::Exponential,
            FitParams::Gamma { .. } => Family::Gamma,
            FitParams::PowerLawTail { .. } => Family::PowerLawTail,
            FitParams::LogNormal { .. } => Family::LogNormal,
            FitParams::Piecewise { .. } => Family::PiecewiseBulkTail,
        }
    }

    pub fn has_warning(&self, w: FitWarning) -> bool {
        self.warnings.contains(&w)
    }

    /// Model CDF of the fitted law.
    pub fn cdf(&self, w: f64) -> f64 {
        match &self.params {
            FitParams::Exponential { temperature } => exponential_cdf(*temperature, w),
            FitParams::Gamma { n, temperature, .. } => gamma_cdf(*n, *temperature, w),
            FitParams::PowerLawTail { alpha, w_min, .. } => pareto_cdf(*alpha, *w_min, w),
            FitParams::LogNormal { mu, sigma } => lognormal_cdf(*mu, *sigma, w),
            FitParams::Piecewise {
                bulk,
                tail,
                w_c,
                tail_fraction,
                ..
            } => {
                if w < *w_c {
                    let at_c = bulk.cdf(*w_c);
                    if at_c > 0.0 {
                        (1.0 - tail_fraction) * (bulk.cdf(w) / at_c).min(1.0)
                    } else {
                        0.0
                    }
                } else {
                    (1.0 - tail_fraction) + tail_fraction * tail.cdf(w)
                }
            }
        }
    }

    pub fn ccdf(&self, w: f64) -> f64 {
        1.0 - self.cdf(w)
    }

    /// Log density for the single-family fits; `None` for piecewise.
    fn ln_pdf(&self, w: f64) -> Option<f64> {
        if w <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        Some(match self.params {
            FitParams::Exponential { temperature } => -temperature.ln() - w / temperature,
            FitParams::Gamma { n, temperature, .. } => {
                n * w.ln() - w / temperature - (n + 1.0) * temperature.ln() - ln_gamma(n + 1.0)
            }
            FitParams::PowerLawTail { alpha, w_min, .. } => {
                if w < w_min {
                    f64::NEG_INFINITY
                } else {
                    alpha.ln() - w_min.ln() - (alpha + 1.0) * (w / w_min).ln()
                }
            }
            FitParams::LogNormal { mu, sigma } => {
                let z = (w.ln() - mu) / sigma;
                -0.5 * z * z - w.ln() - sigma.ln() - 0.5 * (std::f64::consts::TAU).ln()
            }
            FitParams::Piecewise { .. } => return None,
        })
    }

    /// Normalization constant `C` of the density `C w^n e^{-w/T}` or
    /// `C e^{-w/T}`; derived from the parameters, never stored.
    pub fn normalization(&self) -> Option<f64> {
        match self.params {
            FitParams::Exponential { temperature } => Some(1.0 / temperature),
            FitParams::Gamma { n, temperature, .. } => {
                let shape = n + 1.0;
                Some((-ln_gamma(shape) - shape * temperature.ln()).exp())
            }
            FitParams::PowerLawTail { alpha, w_min, .. } => Some(alpha * w_min.powf(alpha)),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match &self.params {
            FitParams::PowerLawTail { alpha, .. } => Some(*alpha),
            FitParams::Piecewise { tail, .. } => tail.alpha(),
            _ => None,
        }
    }

    pub fn crossover(&self) -> Option<f64> {
        match &self.params {
            FitParams::Piecewise { w_c, .. } => Some(*w_c),
            _ => None,
        }
    }
}

pub fn exponential_cdf(temperature: f64, w: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        -(-w / temperature).exp_m1()
    }
}

pub fn gamma_cdf(n: f64, temperature: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    checked_gamma_lr(n + 1.0, w / temperature).unwrap_or(1.0)
}

pub fn pareto_cdf(alpha: f64, w_min: f64, w: f64) -> f64 {
    if w <= w_min {
        0.0
    } else {
        1.0 - (w_min / w).powf(alpha)
    }
}

pub fn lognormal_cdf(mu: f64, sigma: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let z = w.ln() - mu;
    if sigma == 0.0 {
        return if z >= 0.0 { 1.0 } else { 0.0 };
    }
    0.5 * erfc(-z / (sigma * std::f64::consts::SQRT_2))
}

fn require_nonempty(family: Family, samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::fit(family.name(), "empty sample"));
    }
    Ok(())
}

/// Maximum-likelihood exponential: `T = mean`.
pub fn fit_exponential(samples: &[f64]) -> Result<FitResult> {
    require_nonempty(Family::Exponential, samples)?;
    fit_exponential_sorted(&sorted_copy(samples))
}

fn fit_exponential_sorted(sorted: &[f64]) -> Result<FitResult> {
    let family = Family::Exponential.name();
    if !(sorted[0] >= 0.0) {
        return Err(Error::fit(family, "samples must be non-negative"));
    }
    let t = accurate_sum(sorted.iter().copied()) / sorted.len() as f64;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::fit(family, "sample mean is zero"));
    }
    Ok(FitResult {
        params: FitParams::Exponential { temperature: t },
        ks: ks_distance_sorted(sorted, |w| exponential_cdf(t, w)),
        n_used: sorted.len(),
        warnings: Vec::new(),
    })
}

/// Moment inversion for the `w^n e^{-w/T}` density:
/// `T = v / m`, `n = m² / v - 1`.
pub fn gamma_moment_inversion(mean: f64, variance: f64) -> Result<(f64, f64)> {
    if !(variance > 0.0) || !(mean > 0.0) {
        return Err(Error::fit(
            Family::Gamma.name(),
            format!("degenerate sample (mean {mean}, variance {variance})"),
        ));
    }
    Ok((mean * mean / variance - 1.0, variance / mean))
}

/// Gamma fit: moment-inversion start, refined by maximum likelihood.
pub fn fit_gamma(samples: &[f64]) -> Result<FitResult> {
    require_nonempty(Family::Gamma, samples)?;
    fit_gamma_sorted(&sorted_copy(samples))
}

fn fit_gamma_sorted(sorted: &[f64]) -> Result<FitResult> {
    let family = Family::Gamma.name();
    if !(sorted[0] > 0.0) {
        return Err(Error::fit(family, "samples must be strictly positive"));
    }
    let n = sorted.len() as f64;
    let mean = accurate_sum(sorted.iter().copied()) / n;
    let variance = accurate_sum(sorted.iter().map(|x| (x - mean) * (x - mean))) / n;
    let initial = gamma_moment_inversion(mean, variance)?;
    let mean_log = accurate_sum(sorted.iter().map(|x| x.ln())) / n;

    let (shape, converged) = gamma_mle_shape(mean.ln() - mean_log, initial.0 + 1.0);
    let temperature = mean / shape;
    let n_hat = shape - 1.0;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(FitWarning::MleNotConverged);
    }
    Ok(FitResult {
        params: FitParams::Gamma {
            n: n_hat,
            temperature,
            initial,
        },
        ks: ks_distance_sorted(sorted, |w| gamma_cdf(n_hat, temperature, w)),
        n_used: sorted.len(),
        warnings,
    })
}

/// Solves the profile score `ln k - ψ(k) = s` for the shape `k`.
///
/// The left side decreases monotonically from +inf to 0, so a bracket is
/// grown around the starting point and then bisected in `ln k`.
fn gamma_mle_shape(s: f64, start: f64) -> (f64, bool) {
    let score = |k: f64| k.ln() - digamma(k) - s;
    if !(s > 0.0) {
        // all samples equal in log space; likelihood has no finite optimum
        return (start.max(f64::MIN_POSITIVE), false);
    }
    let start = if start.is_finite() && start > 0.0 {
        start
    } else {
        1.0
    };
    let (mut lo, mut hi) = (start, start);
    while score(lo) < 0.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    while score(hi) > 0.0 && hi < 1e300 {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        let g = score(mid);
        if g.abs() < GAMMA_SCORE_TOLERANCE || hi / lo - 1.0 < 1e-15 {
            return (mid, true);
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo * hi).sqrt(), false)
}

/// Hill estimator `α = k / Σ ln(x_i / w_min)` over the given tail values.
pub fn hill_estimate(tail: &[f64], w_min: f64) -> Result<f64> {
    let family = Family::PowerLawTail.name();
    if tail.is_empty() {
        return Err(Error::fit(family, "no tail samples"));
    }
    if !(w_min > 0.0) {
        return Err(Error::fit(
            family,
            format!("w_min must be positive, got {w_min}"),
        ));
    }
    let log_sum = accurate_sum(tail.iter().map(|x| (x / w_min).ln()));
    if !(log_sum > 0.0) {
        return Err(Error::fit(family, "tail samples do not exceed w_min"));
    }
    Ok(tail.len() as f64 / log_sum)
}

/// Power-law tail fit. With `w_min` given, the Hill estimator runs over all
/// samples `>= w_min`; without it, thresholds are scanned and the one with
/// the smallest tail KS distance wins.
pub fn fit_powerlaw_tail(samples: &[f64], w_min: Option<f64>) -> Result<FitResult> {
    require_nonempty(Family::PowerLawTail, samples)?;
    let sorted = sorted_copy(samples);
    match w_min {
        Some(w) => fit_tail_sorted(&sorted, w),
        None => scan_tail_sorted(&sorted),
    }
}

fn fit_tail_sorted(sorted: &[f64], w_min: f64) -> Result<FitResult> {
    let start = sorted.partition_point(|&x| x < w_min);
    let tail = &sorted[start..];
    if tail.len() < MIN_TAIL_SAMPLES {
        return Err(Error::fit(
            Family::PowerLawTail.name(),
            format!(
                "needs at least {MIN_TAIL_SAMPLES} samples >= w_min = {w_min}, found {}",
                tail.len()
            ),
        ));
    }
    let alpha = hill_estimate(tail, w_min)?;
    Ok(FitResult {
        params: FitParams::PowerLawTail {
            alpha,
            w_min,
            n_tail: tail.len(),
        },
        ks: ks_distance_sorted(tail, |w| pareto_cdf(alpha, w_min, w)),
        n_used: tail.len(),
        warnings: Vec::new(),
    })
}

const TAIL_SCAN_CANDIDATES: usize = 200;

fn scan_tail_sorted(sorted: &[f64]) -> Result<FitResult> {
    let n = sorted.len();
    if n < MIN_TAIL_SAMPLES {
        return Err(Error::fit(
            Family::PowerLawTail.name(),
            format!("needs at least {MIN_TAIL_SAMPLES} samples, found {n}"),
        ));
    }
    // tail sizes spaced geometrically from MIN_TAIL_SAMPLES to n
    let ratio = (n as f64 / MIN_TAIL_SAMPLES as f64).ln();
    let mut thresholds: Vec<f64> = (0..TAIL_SCAN_CANDIDATES)
        .map(|j| {
            let k = (MIN_TAIL_SAMPLES as f64
                * (ratio * j as f64 / (TAIL_SCAN_CANDIDATES - 1) as f64).exp())
            .round() as usize;
            sorted[n - k.clamp(MIN_TAIL_SAMPLES, n)]
        })
        .filter(|&w| w > 0.0)
        .collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut best: Option<FitResult> = None;
    for w in thresholds {
        let Ok(fit) = fit_tail_sorted(sorted, w) else {
            continue;
        };
        // ascending thresholds: strict improvement keeps the smallest on ties
        if best.as_ref().is_none_or(|b| fit.ks < b.ks) {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| {
        Error::fit(
            Family::PowerLawTail.name(),
            "no threshold leaves enough distinct tail samples",
        )
    })
}

/// Log-normal fit from the mean and population standard deviation of logs.
pub fn fit_lognormal(samples: &[f64]) -> Result<FitResult> {
    require_nonempty(Family::LogNormal, samples)?;
    fit_lognormal_sorted(&sorted_copy(samples))
}

fn fit_lognormal_sorted(sorted: &[f64]) -> Result<FitResult> {
    if !(sorted[0] > 0.0) {
        return Err(Error::fit(
            Family::LogNormal.name(),
            "samples must be strictly positive",
        ));
    }
    let n = sorted.len() as f64;
    let mu = accurate_sum(sorted.iter().map(|x| x.ln())) / n;
    let var = accurate_sum(sorted.iter().map(|x| (x.ln() - mu).powi(2))) / n;
    let sigma = var.max(0.0).sqrt();
    let mut warnings = Vec::new();
    if sigma == 0.0 {
        warnings.push(FitWarning::DegenerateSigma);
    }
    Ok(FitResult {
        params: FitParams::LogNormal { mu, sigma },
        ks: ks_distance_sorted(sorted, |w| lognormal_cdf(mu, sigma, w)),
        n_used: sorted.len(),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseOptions {
    pub bulk: BulkFamily,
    /// Lowest crossover candidate, as a sample quantile.
    pub quantile_lo: f64,
    /// Highest crossover candidate, as a sample quantile.
    pub quantile_hi: f64,
    pub candidates: usize,
}

impl Default for PiecewiseOptions {
    fn default() -> Self {
        PiecewiseOptions {
            bulk: BulkFamily::LogNormal,
            quantile_lo: 0.80,
            quantile_hi: 0.999,
            candidates: 100,
        }
    }
}

fn fit_bulk_sorted(bulk: BulkFamily, sorted: &[f64]) -> Result<FitResult> {
    match bulk {
        BulkFamily::Gamma => fit_gamma_sorted(sorted),
        BulkFamily::LogNormal => fit_lognormal_sorted(sorted),
    }
}

/// One-sided 5% point of the standard normal.
const VUONG_Z: f64 = 1.645;

/// Vuong's normalized log-likelihood ratio of `ln p` over `ln q` on `xs`.
fn vuong_z(xs: &[f64], ln_p: impl Fn(f64) -> f64, ln_q: impl Fn(f64) -> f64) -> f64 {
    let d: Vec<f64> = xs.iter().map(|&w| ln_p(w) - ln_q(w)).collect();
    if d.iter().any(|x| !x.is_finite()) {
        // one model gives zero density to an observed point
        let p_fails = xs.iter().any(|&w| !ln_p(w).is_finite());
        return if p_fails {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    let n = d.len() as f64;
    let m = accurate_sum(d.iter().copied()) / n;
    let var = d.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    if var == 0.0 {
        return if m > 0.0 { f64::INFINITY } else { 0.0 };
    }
    m * n.sqrt() / var.sqrt()
}

/// Keeps a power-law tail only when it is significantly more likely than
/// both thin-tailed readings of the same points: an exponential decay past
/// `w_c`, and the bulk law continued past `w_c`.
fn pareto_beats_thin_tails(tail: &[f64], w_c: f64, pareto: &FitResult, bulk: &FitResult) -> bool {
    let ln_pareto = |w: f64| pareto.ln_pdf(w).expect("single family");
    let excess = accurate_sum(tail.iter().map(|w| w - w_c)) / tail.len() as f64;
    if excess <= 0.0 {
        return false;
    }
    let ln_exp = |w: f64| -excess.ln() - (w - w_c) / excess;
    let bulk_above = bulk.ccdf(w_c);
    let ln_cont = |w: f64| {
        if bulk_above > 0.0 {
            bulk.ln_pdf(w).expect("single family") - bulk_above.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    vuong_z(tail, ln_pareto, ln_exp) > VUONG_Z && vuong_z(tail, ln_pareto, ln_cont) > VUONG_Z
}

/// Bulk + Pareto tail with a scanned crossover.
///
/// Each candidate `w_c` splits the sorted sample; the bulk family is fitted
/// below it and the Hill estimator at or above it. The candidate whose worse
/// segment KS distance is smallest wins (smallest `w_c` on ties). The tail
/// is then kept only if the Pareto law is significantly more likely (Vuong
/// test, one-sided 5%) than both an exponential decay past `w_c` and the
/// bulk law conditioned on `w >= w_c`; otherwise a bulk-only fit of the
/// whole sample is returned with [`FitWarning::TailRejected`].
pub fn fit_piecewise(samples: &[f64], options: &PiecewiseOptions) -> Result<FitResult> {
    let family = Family::PiecewiseBulkTail.name();
    if samples.len() < MIN_PIECEWISE_SAMPLES {
        return Err(Error::fit(
            family,
            format!(
                "needs at least {MIN_PIECEWISE_SAMPLES} samples, found {}",
                samples.len()
            ),
        ));
    }
    let (qlo, qhi) = (options.quantile_lo, options.quantile_hi);
    if !(0.0 < qlo && qlo <= qhi && qhi < 1.0) || options.candidates == 0 {
        return Err(Error::fit(family, "invalid crossover quantile grid"));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len();

    struct Candidate {
        w_c: f64,
        split: usize,
        bulk: FitResult,
        tail: FitResult,
        score: f64,
    }

    let mut best: Option<Candidate> = None;
    let steps = options.candidates.max(2) - 1;
    let mut last_w: Option<f64> = None;
    for j in 0..options.candidates {
        let q = if options.candidates == 1 {
            qlo
        } else {
            qlo + (qhi - qlo) * j as f64 / steps as f64
        };
        let w_c = quantile_sorted(&sorted, q);
        if last_w == Some(w_c) {
            continue;
        }
        last_w = Some(w_c);
        let split = sorted.partition_point(|&x| x < w_c);
        if split == 0 || n - split < MIN_TAIL_SAMPLES || w_c <= 0.0 {
            continue;
        }
        let Ok(bulk) = fit_bulk_sorted(options.bulk, &sorted[..split]) else {
            continue;
        };
        let Ok(tail) = fit_tail_sorted(&sorted, w_c) else {
            continue;
        };
        let score = bulk.ks.max(tail.ks);
        // candidates arrive in ascending w_c, so strict improvement keeps the smallest
        if best.as_ref().is_none_or(|b| score < b.score) {
            best = Some(Candidate {
                w_c,
                split,
                bulk,
                tail,
                score,
            });
        }
    }

    let bulk_only = |warning: FitWarning| -> Result<FitResult> {
        let mut fit = fit_bulk_sorted(options.bulk, &sorted)?;
        fit.warnings.push(warning);
        Ok(fit)
    };

    let Some(c) = best else {
        return bulk_only(FitWarning::NoTailCandidates);
    };

    let tail_slice = &sorted[c.split..];
    if !pareto_beats_thin_tails(tail_slice, c.w_c, &c.tail, &c.bulk) {
        return bulk_only(FitWarning::TailRejected);
    }

    let tail_fraction = (n - c.split) as f64 / n as f64;
    let mut fit = FitResult {
        params: FitParams::Piecewise {
            bulk: Box::new(c.bulk),
            tail: Box::new(c.tail),
            w_c: c.w_c,
            tail_fraction,
            segment_ks: c.score,
        },
        ks: 0.0,
        n_used: n,
        warnings: Vec::new(),
    };
    fit.ks = ks_distance_sorted(&sorted, |w| fit.cdf(w));
    Ok(fit)
}

/// Raw moment `E[w^j]` of the `w^n e^{-w/T}` law:
/// `T^j (n+1)(n+2)...(n+j)`.
pub fn gamma_raw_moment(n: f64, temperature: f64, j: u32) -> f64 {
    let shape = n + 1.0;
    (0..j).map(|i| shape + i as f64).product::<f64>() * temperature.powi(j as i32)
}

/// Which λ-to-dimension relation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionFormula {
    /// `D = (1 + 2λ) / (1 − 2λ)`
    PaperD,
    /// `D = (1 + 2λ) / (2 (1 − 2λ))`
    HalfD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDimension {
    pub d: f64,
    /// Gamma order `n = D / 2`.
    pub n: f64,
}

pub fn effective_dimension(lambda: f64, formula: DimensionFormula) -> Result<EffectiveDimension> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let denom = 1.0 - 2.0 * lambda;
    if denom == 0.0 {
        return Err(Error::domain(
            "effective dimension is singular at lambda = 1/2",
        ));
    }
    let d = match formula {
        DimensionFormula::PaperD => (1.0 + 2.0 * lambda) / denom,
        DimensionFormula::HalfD => (1.0 + 2.0 * lambda) / (2.0 * denom),
    };
    Ok(EffectiveDimension { d, n: d / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn exponential_examples() {
        let f = fit_exponential(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(f.params, FitParams::Exponential { temperature: 1.0 });
        let f = fit_exponential(&[0.0, 2.0]).unwrap();
        assert_eq!(f.params, FitParams::Exponential { temperature: 1.0 });
        assert!(fit_exponential(&[0.0, 0.0]).is_err());
        assert!(fit_exponential(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn gamma_moment_examples() {
        assert_eq!(gamma_moment_inversion(2.0, 2.0).unwrap(), (1.0, 1.0));
        assert_eq!(gamma_moment_inversion(1.0, 1.0).unwrap(), (0.0, 1.0));
        assert!(fit_gamma(&[2.0, 2.0, 2.0]).is_err());
        assert!(fit_gamma(&[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn gamma_initial_estimate_recorded() {
        // {1, 3}: mean 2, variance 1 -> n = 3, T = 0.5
        let f = fit_gamma(&[1.0, 3.0]).unwrap();
        let FitParams::Gamma { initial, .. } = f.params else {
            panic!()
        };
        assert_eq!(initial, (3.0, 0.5));
    }

    #[test]
    fn gamma_mle_satisfies_score() {
        let xs = [0.3, 0.9, 1.4, 2.2, 3.1, 0.7, 1.1];
        let f = fit_gamma(&xs).unwrap();
        let FitParams::Gamma { n, temperature, .. } = f.params else {
            panic!()
        };
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let ml = xs.iter().map(|x: &f64| x.ln()).sum::<f64>() / xs.len() as f64;
        let k = n + 1.0;
        assert!(((k.ln() - digamma(k)) - (m.ln() - ml)).abs() < 1e-8);
        assert!((k * temperature - m).abs() < 1e-12);
    }

    #[test]
    fn hill_examples() {
        assert!((hill_estimate(&[E, E, E], 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((hill_estimate(&[E * E], 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tail_needs_ten_samples() {
        let err = fit_powerlaw_tail(&[2.0, 3.0, 4.0], Some(1.0)).unwrap_err();
        assert!(err.to_string().contains("at least 10"), "{err}");
    }

    #[test]
    fn lognormal_examples() {
        let f = fit_lognormal(&[E, E.powi(3)]).unwrap();
        let FitParams::LogNormal { mu, sigma } = f.params else {
            panic!()
        };
        assert!((mu - 2.0).abs() < 1e-14 && (sigma - 1.0).abs() < 1e-14);
        let f = fit_lognormal(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            f.params,
            FitParams::LogNormal {
                mu: 0.0,
                sigma: 0.0
            }
        );
        assert!(f.has_warning(FitWarning::DegenerateSigma));
        assert!(fit_lognormal(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn piecewise_needs_hundred_samples() {
        let xs: Vec<f64> = (1..50).map(f64::from).collect();
        assert!(fit_piecewise(&xs, &PiecewiseOptions::default()).is_err());
    }

    #[test]
    fn dimension_examples() {
        let d = effective_dimension(0.0, DimensionFormula::PaperD).unwrap();
        assert_eq!((d.d, d.n), (1.0, 0.5));
        let d = effective_dimension(0.25, DimensionFormula::PaperD).unwrap();
        assert_eq!((d.d, d.n), (3.0, 1.5));
        let d = effective_dimension(0.25, DimensionFormula::HalfD).unwrap();
        assert_eq!(d.d, 1.5);
        assert!(effective_dimension(0.5, DimensionFormula::PaperD).is_err());
        assert!(effective_dimension(0.5, DimensionFormula::HalfD).is_err());
    }

    #[test]
    fn normalization_constants() {
        let f = fit_exponential(&[2.0, 2.0]).unwrap();
        assert_eq!(f.normalization(), Some(0.5));
    }
}
