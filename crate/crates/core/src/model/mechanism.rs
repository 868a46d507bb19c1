//! Fitness, aging and preferential-attachment mechanisms.

use serde::{Deserialize, Serialize};

use super::normal;
use crate::error::{Error, Result};

/// Distribution of the per-vertex fitness multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitnessSpec {
    ConstantOne,
    /// Density `(tau - 1) x_min^(tau - 1) x^(-tau)` on `x > x_min`.
    Pareto { x_min: f64, tau: f64 },
    /// Exponential with rate `lambda` (mean `1 / lambda`).
    Exponential { lambda: f64 },
    Uniform { c: f64, d: f64 },
}

impl FitnessSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FitnessSpec::ConstantOne => true,
            FitnessSpec::Pareto { x_min, tau } => x_min > 0.0 && tau > 2.0 && tau.is_finite(),
            FitnessSpec::Exponential { lambda } => lambda > 0.0 && lambda.is_finite(),
            FitnessSpec::Uniform { c, d } => c > 0.0 && d > c && d.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("fitness parameters out of domain: {self:?}")))
        }
    }

    /// Inverse CDF at `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::invalid(format!("fitness quantile level {u} not in (0, 1)")));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match *self {
            FitnessSpec::ConstantOne => 1.0,
            FitnessSpec::Pareto { x_min, tau } => x_min * (1.0 - u).powf(-1.0 / (tau - 1.0)),
            FitnessSpec::Exponential { lambda } => -(-u).ln_1p() / lambda,
            FitnessSpec::Uniform { c, d } => c + u * (d - c),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            FitnessSpec::ConstantOne => 1.0,
            FitnessSpec::Pareto { x_min, tau } => (tau - 1.0) * x_min / (tau - 2.0),
            FitnessSpec::Exponential { lambda } => 1.0 / lambda,
            FitnessSpec::Uniform { c, d } => 0.5 * (c + d),
        }
    }
}

/// Aging function: either switched off (`h = 1`) or a lognormal density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgingSpec {
    None,
    Lognormal { mu: f64, sigma: f64 },
}

impl AgingSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AgingSpec::None => Ok(()),
            AgingSpec::Lognormal { mu, sigma } if mu.is_finite() && sigma > 0.0 && sigma.is_finite() => Ok(()),
            _ => Err(Error::invalid(format!("aging parameters out of domain: {self:?}"))),
        }
    }

    pub fn has_aging(&self) -> bool {
        matches!(self, AgingSpec::Lognormal { .. })
    }

    /// `h(t)`.
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            AgingSpec::None => 1.0,
            AgingSpec::Lognormal { mu, sigma } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let z = (t.ln() - mu) / sigma;
                normal::pdf(z) / (t * sigma)
            }
        }
    }

    /// `H(t) = int_0^t h`.
    pub fn cumulative(&self, t: f64) -> f64 {
        match *self {
            AgingSpec::None => t.max(0.0),
            AgingSpec::Lognormal { mu, sigma } => {
                if t <= 0.0 {
                    0.0
                } else if t.is_infinite() {
                    1.0
                } else {
                    normal::cdf((t.ln() - mu) / sigma)
                }
            }
        }
    }

    /// `1 - H(t)` for the lognormal, computed without cancellation.
    /// Infinite for `aging = none`.
    pub fn remaining(&self, t: f64) -> f64 {
        match *self {
            AgingSpec::None => f64::INFINITY,
            AgingSpec::Lognormal { mu, sigma } => {
                if t <= 0.0 {
                    1.0
                } else {
                    normal::sf((t.ln() - mu) / sigma)
                }
            }
        }
    }

    /// `H^{-1}(p)`. For the lognormal, `p >= 1` is the infinite horizon and
    /// returns `+inf`.
    pub fn inverse_cumulative(&self, p: f64) -> f64 {
        match *self {
            AgingSpec::None => p.max(0.0),
            AgingSpec::Lognormal { mu, sigma } => {
                if p <= 0.0 {
                    0.0
                } else if p >= 1.0 {
                    f64::INFINITY
                } else if p <= 0.5 {
                    (mu + sigma * normal::quantile(p)).exp()
                } else {
                    (mu + sigma * normal::inverse_sf(1.0 - p)).exp()
                }
            }
        }
    }

    /// Inverse of [`AgingSpec::remaining`]: the age at which the remaining
    /// aging mass equals `q`.
    pub fn inverse_remaining(&self, q: f64) -> f64 {
        match *self {
            AgingSpec::None => f64::INFINITY,
            AgingSpec::Lognormal { mu, sigma } => {
                if q >= 1.0 {
                    0.0
                } else if q <= 0.0 {
                    f64::INFINITY
                } else {
                    (mu + sigma * normal::inverse_sf(q)).exp()
                }
            }
        }
    }
}

/// Preferential attachment function `f(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrefAttachSpec {
    None,
    Affine { a: f64, b: f64 },
}

impl PrefAttachSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PrefAttachSpec::None => Ok(()),
            PrefAttachSpec::Affine { a, b } if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() => Ok(()),
            _ => Err(Error::invalid(format!("attachment parameters out of domain: {self:?}"))),
        }
    }

    #[inline]
    pub fn value(&self, k: u64) -> f64 {
        match *self {
            PrefAttachSpec::None => 1.0,
            PrefAttachSpec::Affine { a, b } => a * k as f64 + b,
        }
    }
}
