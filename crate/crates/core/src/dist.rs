//! Constant, normal and uniform distributions used for ops and throughput
//! variability.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A validated distribution. Build through the constructors or serde, both
/// of which reject invalid parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawDistribution")]
pub enum Distribution {
    Constant { value: f64 },
    Normal { mean: f64, stddev: f64 },
    Uniform { low: f64, high: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Constant { value: f64 },
    Normal { mean: f64, stddev: f64 },
    Uniform { low: f64, high: f64 },
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Constant { value } => Distribution::constant(value),
            RawDistribution::Normal { mean, stddev } => Distribution::normal(mean, stddev),
            RawDistribution::Uniform { low, high } => Distribution::uniform(low, high),
        }
    }
}

impl Distribution {
    /// Raw 64-bit draws consumed by one normal sample (Box-Muller, cosine branch).
    pub const NORMAL_DRAWS: u64 = 2;

    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Config(format!(
                "constant distribution needs a finite non-negative value, got {value}"
            )));
        }
        Ok(Distribution::Constant { value })
    }

    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() || !stddev.is_finite() || stddev < 0.0 {
            return Err(Error::Config(format!(
                "normal distribution needs finite mean and stddev >= 0, got mean={mean}, stddev={stddev}"
            )));
        }
        Ok(Distribution::Normal { mean, stddev })
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !low.is_finite() || !high.is_finite() || low > high {
            return Err(Error::Config(format!(
                "uniform distribution needs finite low <= high, got low={low}, high={high}"
            )));
        }
        Ok(Distribution::Uniform { low, high })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Constant { value } => value,
            Distribution::Normal { mean, .. } => mean,
            Distribution::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    /// True when every sample equals the mean.
    pub fn is_degenerate(&self) -> bool {
        match *self {
            Distribution::Constant { .. } => true,
            Distribution::Normal { stddev, .. } => stddev == 0.0,
            Distribution::Uniform { low, high } => low == high,
        }
    }
}

/// Draws one value. Constant and uniform consume one raw draw, normal
/// consumes [`Distribution::NORMAL_DRAWS`]. Normal samples are not
/// truncated; callers clamp.
pub fn sample(dist: &Distribution, rng: &mut RngStream) -> f64 {
    match *dist {
        Distribution::Constant { value } => {
            rng.next_u64();
            value
        }
        Distribution::Normal { mean, stddev } => {
            // u1 in (0, 1] keeps the logarithm finite.
            let u1 = 1.0 - rng.next_f64();
            let u2 = rng.next_f64();
            if stddev == 0.0 {
                return mean;
            }
            let z = libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2);
            mean + stddev * z
        }
        Distribution::Uniform { low, high } => {
            let u = rng.next_f64();
            if low == high {
                return low;
            }
            low + (high - low) * u
        }
    }
}
