//! Simulated time in whole microseconds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MICROS_PER_SEC: f64 = 1e6;

/// A point in (or span of) simulated time, in microseconds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us)
    }

    pub const fn from_secs(secs: u64) -> Self {
        SimTime(secs * 1_000_000)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000)
    }

    /// Rounds to the nearest microsecond.
    pub fn from_secs_f64(secs: f64) -> Result<Self> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(Error::Config(format!(
                "time must be finite and non-negative, got {secs}"
            )));
        }
        let us = (secs * MICROS_PER_SEC).round();
        if us >= u64::MAX as f64 {
            return Err(Error::TimeOverflow);
        }
        Ok(SimTime(us as u64))
    }

    pub const fn as_micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_SEC
    }

    pub fn checked_add(self, rhs: SimTime) -> Result<SimTime> {
        self.0.checked_add(rhs.0).map(SimTime).ok_or(Error::TimeOverflow)
    }

    pub fn checked_sub(self, rhs: SimTime) -> Option<SimTime> {
        self.0.checked_sub(rhs.0).map(SimTime)
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    pub fn saturating_add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_add(rhs.0))
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}s", self.0 / 1_000_000, self.0 % 1_000_000)
    }
}

/// Saturating. Arithmetic that can genuinely overflow goes through
/// [`SimTime::checked_add`].
impl std::ops::Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        self.saturating_add(rhs)
    }
}

impl std::iter::Sum for SimTime {
    fn sum<I: Iterator<Item = SimTime>>(iter: I) -> Self {
        iter.fold(SimTime::ZERO, |acc, t| acc.saturating_add(t))
    }
}

/// Execution time of `ops` operations at `throughput_ops_per_sec`, rounded
/// up to the next microsecond. Positive work never takes zero time.
pub fn duration_for(ops: f64, throughput_ops_per_sec: f64) -> Result<SimTime> {
    if !ops.is_finite() || !throughput_ops_per_sec.is_finite() {
        return Err(Error::Compute(format!(
            "non-finite duration inputs: ops={ops}, throughput={throughput_ops_per_sec}"
        )));
    }
    if ops <= 0.0 || throughput_ops_per_sec <= 0.0 {
        return Err(Error::Compute(format!(
            "duration inputs must be positive: ops={ops}, throughput={throughput_ops_per_sec}"
        )));
    }
    // Scale before dividing so integral inputs stay exact.
    let us = (ops * MICROS_PER_SEC / throughput_ops_per_sec).ceil();
    if !us.is_finite() || us >= u64::MAX as f64 {
        return Err(Error::TimeOverflow);
    }
    Ok(SimTime((us as u64).max(1)))
}
