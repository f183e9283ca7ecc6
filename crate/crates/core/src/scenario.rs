//! The shipped illustrative K-Means edge/cloud calibration.
//!
//! An edge device with one slow core and a 44-core cloud VM whose cores are
//! 35% faster. Reaching the cloud costs a per-transfer broker setup plus a
//! 100 Mbit/s uplink. With these constants edge-centric placement wins for
//! small datasets and cloud-centric placement wins once the dataset exceeds
//! roughly 28k points. The numbers are illustrative, not measurements.

use crate::error::Result;
use crate::model::{Link, LinkConcurrency, Resource, Tier, Workload};
use crate::placement::StrategySpec;
use crate::time::SimTime;
use crate::workloads::{kmeans_workload, KMeansSpec};

pub const EDGE_ID: &str = "edge";
pub const CLOUD_ID: &str = "cloud";

pub const EDGE_CORES: u32 = 1;
pub const EDGE_OPS_PER_SEC: f64 = 1.0e8;
pub const CLOUD_CORES: u32 = 44;
pub const CLOUD_OPS_PER_SEC: f64 = 1.35e8;
pub const DISPATCH_DELAY: SimTime = SimTime::from_millis(1);
pub const BROKER_SETUP: SimTime = SimTime::from_millis(20);
pub const UPLINK_LATENCY: SimTime = SimTime::from_millis(2);
pub const UPLINK_BYTES_PER_SEC: f64 = 1.25e7;

pub const DEFAULT_CLUSTERS: u64 = 8;
pub const DEFAULT_ITERATIONS: u64 = 10;
pub const OPS_PER_POINT_CLUSTER: f64 = 10.0;
/// Two double-precision coordinates per point.
pub const BYTES_PER_POINT: f64 = 16.0;

/// Data sizes swept from 32 to 10^6 points.
pub const N_SWEEP: [u64; 10] = [32, 100, 1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 600_000, 1_000_000];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub workload: Workload,
    pub resources: Vec<Resource>,
    pub links: Vec<Link>,
    pub strategies: Vec<StrategySpec>,
}

pub fn kmeans_spec(n_points: u64, n_clusters: u64) -> KMeansSpec {
    KMeansSpec {
        n_points,
        n_clusters,
        n_iterations: DEFAULT_ITERATIONS,
        ops_per_point_cluster: OPS_PER_POINT_CLUSTER,
        bytes_per_point: BYTES_PER_POINT,
        variability: None,
    }
}

pub fn continuum_resources() -> Result<Vec<Resource>> {
    Ok(vec![
        Resource::new(EDGE_ID, Tier::Edge, EDGE_CORES, EDGE_OPS_PER_SEC)?.with_dispatch_delay(DISPATCH_DELAY),
        Resource::new(CLOUD_ID, Tier::Cloud, CLOUD_CORES, CLOUD_OPS_PER_SEC)?.with_dispatch_delay(DISPATCH_DELAY),
    ])
}

pub fn continuum_links() -> Result<Vec<Link>> {
    Ok(vec![Link::new(EDGE_ID, CLOUD_ID, UPLINK_BYTES_PER_SEC)?
        .with_setup_overhead(BROKER_SETUP)
        .with_latency(UPLINK_LATENCY)
        .with_concurrency(LinkConcurrency::Serial)])
}

/// K-Means on edge-resident data, compared edge-centric against cloud-centric.
pub fn kmeans_continuum(spec: &KMeansSpec) -> Result<Scenario> {
    Ok(Scenario {
        workload: kmeans_workload(spec, EDGE_ID)?,
        resources: continuum_resources()?,
        links: continuum_links()?,
        strategies: vec![StrategySpec::EdgeCentric, StrategySpec::CloudCentric],
    })
}
