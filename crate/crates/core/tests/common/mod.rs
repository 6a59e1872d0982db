//! Reference samplers and metrics written independently of the library's
//! fitters and statistics, used as oracles by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform on the open interval `(0, 1)`.
fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverse transform: `-T ln U`.
pub fn exponential(rng: &mut impl Rng, temperature: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| -temperature * open_unit(rng).ln()).collect()
}

/// Inverse transform: `w_min U^{-1/α}`.
pub fn pareto(rng: &mut impl Rng, alpha: f64, w_min: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| w_min * open_unit(rng).powf(-1.0 / alpha))
        .collect()
}

/// Box–Muller.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1 = open_unit(rng);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn lognormal(rng: &mut impl Rng, mu: f64, sigma: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| (mu + sigma * standard_normal(rng)).exp())
        .collect()
}

/// Draws from the density `∝ w^n e^{-w/T}` (`n > 0`) by rejection from an
/// exponential envelope with the same mean `(n+1) T`.
pub fn gamma_eq1(rng: &mut impl Rng, n: f64, temperature: f64, count: usize) -> Vec<f64> {
    assert!(n > 0.0);
    let k = n + 1.0;
    let scale = k * temperature;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = -scale * open_unit(rng).ln();
        let x = w / scale;
        // f/(M g) = x^n e^{-n(x-1)}, maximal (= 1) at x = 1.
        let accept = (n * (x.ln() - x + 1.0)).exp();
        if rng.random::<f64>() < accept {
            out.push(w);
        }
    }
    out
}

/// Log-normal survival `P(W >= w)`, via a direct series-free erfc.
pub fn lognormal_survival(mu: f64, sigma: f64, w: f64) -> f64 {
    0.5 * erfc_approx((w.ln() - mu) / (sigma * std::f64::consts::SQRT_2))
}

/// Complementary error function (Numerical Recipes `erfcc`, |ε| < 1.2e-7).
pub fn erfc_approx(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

/// Log-normal body below `w_c` and Pareto(α, w_c) above it, with the tail
/// weight equal to the log-normal's own mass above `w_c`.
pub fn composite(
    rng: &mut impl Rng,
    mu: f64,
    sigma: f64,
    w_c: f64,
    alpha: f64,
    n: usize,
) -> Vec<f64> {
    let p_tail = lognormal_survival(mu, sigma, w_c);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if rng.random::<f64>() < p_tail {
            out.push(w_c * open_unit(rng).powf(-1.0 / alpha));
        } else {
            let w = (mu + sigma * standard_normal(rng)).exp();
            if w < w_c {
                out.push(w);
            }
        }
    }
    out
}

/// Gini as mean absolute difference over twice the mean: O(n²).
pub fn gini_pairwise(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut total = 0.0;
    for a in xs {
        for b in xs {
            total += (a - b).abs();
        }
    }
    total / (2.0 * n * n * mean)
}

/// Kolmogorov distance to a reference CDF, computed straightforwardly.
pub fn ks_reference(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Relative distance in units of the larger magnitude's epsilon.
pub fn ulps_rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / (scale * f64::EPSILON)
    }
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
