//! Data-movement cost between resources.

use crate::error::{Error, Result};
use crate::model::{Link, LinkConcurrency};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRequest {
    pub task_id: u64,
    pub src: String,
    pub dst: String,
    pub bytes: u64,
    pub ready: SimTime,
}

/// `setup_overhead + latency + ceil(bytes / bandwidth)`; empty payloads still
/// pay the fixed part.
pub fn transfer_duration(link: &Link, bytes: u64) -> Result<SimTime> {
    let fixed = link.setup_overhead.checked_add(link.latency)?;
    if bytes == 0 {
        return Ok(fixed);
    }
    let us = (bytes as f64 * 1e6 / link.bandwidth_bytes_per_sec).ceil();
    if !us.is_finite() {
        return Err(Error::Compute(format!(
            "non-finite transfer time for {bytes} bytes on ({}, {})",
            link.src, link.dst
        )));
    }
    if us >= u64::MAX as f64 {
        return Err(Error::TimeOverflow);
    }
    fixed.checked_add(SimTime::from_micros(us as u64))
}

/// Occupancy of one link during a run.
#[derive(Debug, Clone, Default)]
pub struct LinkState {
    free_at: SimTime,
}

impl LinkState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn free_at(&self) -> SimTime {
        self.free_at
    }

    /// Returns `(start, end)` for the request. Serial links start no earlier
    /// than the previous transfer's end; callers submit in FIFO order.
    pub fn schedule(&mut self, link: &Link, req: &TransferRequest) -> Result<(SimTime, SimTime)> {
        let duration = transfer_duration(link, req.bytes)?;
        let start = match link.concurrency {
            LinkConcurrency::Serial => req.ready.max(self.free_at),
            LinkConcurrency::Unlimited => req.ready,
        };
        let end = start.checked_add(duration)?;
        if link.concurrency == LinkConcurrency::Serial {
            self.free_at = end;
        }
        Ok((start, end))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(setup_ms: u64, latency_ms: u64, bandwidth: f64) -> Link {
        Link::new("edge", "cloud", bandwidth)
            .unwrap()
            .with_setup_overhead(SimTime::from_millis(setup_ms))
            .with_latency(SimTime::from_millis(latency_ms))
    }

    fn req(task_id: u64, ready: SimTime, bytes: u64) -> TransferRequest {
        TransferRequest {
            task_id,
            src: "edge".into(),
            dst: "cloud".into(),
            bytes,
            ready,
        }
    }

    #[test]
    fn duration_examples() {
        assert_eq!(transfer_duration(&link(2000, 0, 100e6), 500_000_000).unwrap(), SimTime::from_secs(7));
        assert_eq!(transfer_duration(&link(2000, 50, 1e6), 0).unwrap(), SimTime::from_millis(2050));
        // 2 s + 3.3e8 B / 1e8 B/s = 5.3 s
        assert_eq!(transfer_duration(&link(2000, 0, 1e8), 330_000_000).unwrap(), SimTime::from_millis(5300));
    }

    #[test]
    fn serial_link_serializes() {
        let l = link(1000, 0, 1e6);
        let mut state = LinkState::new();
        let a = state.schedule(&l, &req(0, SimTime::ZERO, 0)).unwrap();
        let b = state.schedule(&l, &req(1, SimTime::ZERO, 0)).unwrap();
        assert_eq!(a.1, SimTime::from_secs(1));
        assert_eq!(b.1, SimTime::from_secs(2));
    }

    #[test]
    fn unlimited_link_does_not_queue() {
        let l = link(1000, 0, 1e6).with_concurrency(LinkConcurrency::Unlimited);
        let mut state = LinkState::new();
        let a = state.schedule(&l, &req(0, SimTime::ZERO, 0)).unwrap();
        let b = state.schedule(&l, &req(1, SimTime::ZERO, 0)).unwrap();
        assert_eq!((a.1, b.1), (SimTime::from_secs(1), SimTime::from_secs(1)));
    }

    #[test]
    fn staggered_fifo() {
        let l = link(1000, 0, 1e6);
        let mut state = LinkState::new();
        let ends: Vec<_> = [(0, 0), (1, 500), (2, 500)]
            .into_iter()
            .map(|(id, ready_ms)| state.schedule(&l, &req(id, SimTime::from_millis(ready_ms), 0)).unwrap().1)
            .collect();
        assert_eq!(ends, vec![SimTime::from_secs(1), SimTime::from_secs(2), SimTime::from_secs(3)]);
    }

    proptest::proptest! {
        #[test]
        fn duration_monotone(bytes in 0u64..1 << 40, extra in 0u64..1 << 20, bw in 1.0f64..1e10, bw_scale in 1.0f64..100.0) {
            let slow = link(5, 1, bw);
            let fast = link(5, 1, bw * bw_scale);
            let d = transfer_duration(&slow, bytes).unwrap();
            proptest::prop_assert!(transfer_duration(&slow, bytes + extra).unwrap() >= d);
            proptest::prop_assert!(transfer_duration(&fast, bytes).unwrap() <= d);
        }

        #[test]
        fn serial_intervals_never_overlap(readies in proptest::collection::vec(0u64..10_000_000, 1..20), bytes in 0u64..1_000_000) {
            let l = link(3, 1, 1e6);
            let mut sorted = readies.clone();
            sorted.sort_unstable();
            let mut state = LinkState::new();
            let mut prev_end = SimTime::ZERO;
            for (i, ready) in sorted.into_iter().enumerate() {
                let (s, e) = state.schedule(&l, &req(i as u64, SimTime::from_micros(ready), bytes)).unwrap();
                proptest::prop_assert!(s >= prev_end);
                proptest::prop_assert!(s >= SimTime::from_micros(ready));
                prev_end = e;
            }
        }
    }
}
