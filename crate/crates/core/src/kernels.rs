//! Two-agent exchange rules.
//!
//! Every rule takes the pair's wealth `(wi, wj)` plus one or two uniform
//! draws and returns the post-trade pair. The checked functions validate
//! their inputs; the engine validates a [`ModelSpec`] once and then calls the
//! `*_unchecked` variants in the hot loop.
//!
//! All saving rules share a single evaluation path:
//!
//! ```text
//! pool   = (1 - li) * wi + (1 - lj) * wj
//! wi'    = li * wi + r * pool
//! wj'    = lj * wj + (pool - r * pool)
//! ```
//!
//! so that uniform saving is distributed saving with `li == lj`, and no saving
//! is uniform saving with `λ = 0`, bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of per-agent saving propensities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaLaw {
    /// Every agent saves the same fraction.
    Delta { lambda: f64 },
    /// Propensities drawn uniformly from `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

impl LambdaLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LambdaLaw::Delta { lambda } => {
                if !(0.0..1.0).contains(&lambda) {
                    return Err(Error::domain(format!(
                        "delta lambda law requires 0 <= lambda < 1, got {lambda}"
                    )));
                }
            }
            LambdaLaw::Uniform { lo, hi } => {
                if !(lo >= 0.0 && lo <= hi && hi < 1.0) {
                    return Err(Error::domain(format!(
                        "uniform lambda law requires 0 <= lo <= hi < 1, got [{lo}, {hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Maps a unit draw `u ∈ [0,1)` onto the law.
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        match *self {
            LambdaLaw::Delta { lambda } => lambda,
            LambdaLaw::Uniform { lo, hi } => {
                let x = lo + (hi - lo) * u;
                // rounding may land exactly on hi
                if x >= hi && hi > lo {
                    lo.max(hi - (hi - lo) * f64::EPSILON)
                } else {
                    x
                }
            }
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            LambdaLaw::Delta { lambda } => lambda,
            LambdaLaw::Uniform { hi, .. } => hi,
        }
    }
}

/// Which exchange rule drives the market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ModelSpec {
    NoSaving,
    UniformSaving { lambda: f64 },
    DistributedSaving { lambda_law: LambdaLaw },
    BiDirectional,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::NoSaving | ModelSpec::BiDirectional => Ok(()),
            ModelSpec::UniformSaving { lambda } => check_unit("lambda", lambda),
            ModelSpec::DistributedSaving { lambda_law } => lambda_law.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::NoSaving => "no_saving",
            ModelSpec::UniformSaving { .. } => "uniform_saving",
            ModelSpec::DistributedSaving { .. } => "distributed_saving",
            ModelSpec::BiDirectional => "bidirectional",
        }
    }

    /// Whether agents carry individual propensities.
    pub fn has_agent_lambdas(&self) -> bool {
        matches!(self, ModelSpec::DistributedSaving { .. })
    }
}

/// Post-trade wealth of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeOutcome {
    pub wi_new: f64,
    pub wj_new: f64,
}

impl ExchangeOutcome {
    pub fn sum(&self) -> f64 {
        self.wi_new + self.wj_new
    }
}

fn check_wealth(wi: f64, wj: f64) -> Result<()> {
    if !(wi >= 0.0 && wi.is_finite()) || !(wj >= 0.0 && wj.is_finite()) {
        return Err(Error::domain(format!(
            "wealth must be finite and non-negative, got ({wi}, {wj})"
        )));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_saving(name: &str, x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!("{name} must lie in [0, 1), got {x}")));
    }
    Ok(())
}

/// Random split of the pair's total: `wi' = r (wi + wj)`.
pub fn exchange_no_saving(wi: f64, wj: f64, r: f64) -> Result<ExchangeOutcome> {
    check_wealth(wi, wj)?;
    check_unit("r", r)?;
    Ok(no_saving_unchecked(wi, wj, r))
}

/// Both agents keep `λ` of their wealth and split the rest at random.
pub fn exchange_uniform_saving(wi: f64, wj: f64, lambda: f64, r: f64) -> Result<ExchangeOutcome> {
    check_wealth(wi, wj)?;
    check_unit("lambda", lambda)?;
    check_unit("r", r)?;
    Ok(uniform_saving_unchecked(wi, wj, lambda, r))
}

/// Each agent keeps its own fraction; the released pool is split at random.
pub fn exchange_distributed_saving(
    wi: f64,
    wj: f64,
    li: f64,
    lj: f64,
    r: f64,
) -> Result<ExchangeOutcome> {
    check_wealth(wi, wj)?;
    check_saving("li", li)?;
    check_saving("lj", lj)?;
    check_unit("r", r)?;
    Ok(distributed_saving_unchecked(wi, wj, li, lj, r))
}

/// Each agent hands an independent random share of its wealth to the other.
pub fn exchange_bidirectional(wi: f64, wj: f64, r: f64, q: f64) -> Result<ExchangeOutcome> {
    check_wealth(wi, wj)?;
    check_unit("r", r)?;
    check_unit("q", q)?;
    Ok(bidirectional_unchecked(wi, wj, r, q))
}

#[inline]
pub(crate) fn no_saving_unchecked(wi: f64, wj: f64, r: f64) -> ExchangeOutcome {
    let total = wi + wj;
    let share = r * total;
    ExchangeOutcome {
        wi_new: share,
        wj_new: total - share,
    }
}

#[inline]
pub(crate) fn uniform_saving_unchecked(wi: f64, wj: f64, lambda: f64, r: f64) -> ExchangeOutcome {
    distributed_saving_unchecked(wi, wj, lambda, lambda, r)
}

#[inline]
pub(crate) fn distributed_saving_unchecked(
    wi: f64,
    wj: f64,
    li: f64,
    lj: f64,
    r: f64,
) -> ExchangeOutcome {
    let pool = (1.0 - li) * wi + (1.0 - lj) * wj;
    let share = r * pool;
    ExchangeOutcome {
        wi_new: li * wi + share,
        wj_new: lj * wj + (pool - share),
    }
}

#[inline]
pub(crate) fn bidirectional_unchecked(wi: f64, wj: f64, r: f64, q: f64) -> ExchangeOutcome {
    let kept_i = r * wi;
    let given_j = q * wj;
    ExchangeOutcome {
        wi_new: kept_i + given_j,
        wj_new: (wi - kept_i) + (wj - given_j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: ExchangeOutcome, wi: f64, wj: f64) {
        assert!((a.wi_new - wi).abs() < 1e-12, "{a:?} vs ({wi}, {wj})");
        assert!((a.wj_new - wj).abs() < 1e-12, "{a:?} vs ({wi}, {wj})");
    }

    #[test]
    fn no_saving_examples() {
        close(exchange_no_saving(1.0, 3.0, 0.5).unwrap(), 2.0, 2.0);
        close(exchange_no_saving(0.0, 0.0, 0.7).unwrap(), 0.0, 0.0);
        close(exchange_no_saving(2.0, 2.0, 0.25).unwrap(), 1.0, 3.0);
    }

    #[test]
    fn uniform_saving_examples() {
        close(
            exchange_uniform_saving(1.0, 3.0, 0.5, 0.5).unwrap(),
            1.5,
            2.5,
        );
        let frozen = exchange_uniform_saving(1.0, 3.0, 1.0, 0.9).unwrap();
        assert_eq!((frozen.wi_new, frozen.wj_new), (1.0, 3.0));
        close(
            exchange_uniform_saving(1.0, 3.0, 0.0, 0.5).unwrap(),
            2.0,
            2.0,
        );
    }

    #[test]
    fn distributed_saving_examples() {
        close(
            exchange_distributed_saving(1.0, 1.0, 0.2, 0.6, 0.5).unwrap(),
            0.8,
            1.2,
        );
        close(
            exchange_distributed_saving(1.0, 3.0, 0.5, 0.5, 0.5).unwrap(),
            1.5,
            2.5,
        );
        close(
            exchange_distributed_saving(5.0, 0.0, 0.9, 0.1, 0.0).unwrap(),
            4.5,
            0.5,
        );
    }

    #[test]
    fn bidirectional_examples() {
        close(
            exchange_bidirectional(1.0, 3.0, 1.0, 0.0).unwrap(),
            1.0,
            3.0,
        );
        close(
            exchange_bidirectional(1.0, 3.0, 0.0, 1.0).unwrap(),
            3.0,
            1.0,
        );
        close(
            exchange_bidirectional(2.0, 4.0, 0.5, 0.5).unwrap(),
            3.0,
            3.0,
        );
    }

    #[test]
    fn domain_errors() {
        assert!(exchange_no_saving(-1.0, 1.0, 0.5).is_err());
        assert!(exchange_no_saving(1.0, f64::NAN, 0.5).is_err());
        assert!(exchange_no_saving(1.0, 1.0, 1.5).is_err());
        assert!(exchange_uniform_saving(1.0, 1.0, -0.1, 0.5).is_err());
        assert!(exchange_uniform_saving(1.0, 1.0, 0.5, -0.1).is_err());
        assert!(exchange_distributed_saving(1.0, 1.0, 1.0, 0.5, 0.5).is_err());
        assert!(exchange_distributed_saving(1.0, 1.0, 0.5, 1.0, 0.5).is_err());
        assert!(exchange_bidirectional(1.0, 1.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ModelSpec::UniformSaving { lambda: 1.0 }.validate().is_ok());
        assert!(ModelSpec::UniformSaving { lambda: 1.2 }.validate().is_err());
        let bad = LambdaLaw::Uniform { lo: 0.0, hi: 1.0 };
        assert!(ModelSpec::DistributedSaving { lambda_law: bad }
            .validate()
            .is_err());
        let inverted = LambdaLaw::Uniform { lo: 0.5, hi: 0.2 };
        assert!(inverted.validate().is_err());
        assert!(LambdaLaw::Delta { lambda: 0.3 }.validate().is_ok());
    }

    #[test]
    fn lambda_law_stays_below_hi() {
        let law = LambdaLaw::Uniform { lo: 0.0, hi: 0.5 };
        let top = law.sample_with(1.0 - f64::EPSILON / 2.0);
        assert!(top < 0.5);
        assert_eq!(law.sample_with(0.0), 0.0);
    }
}
