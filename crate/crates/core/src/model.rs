//! Tasks, workloads, resources and links.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, PlanError, Result};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Edge,
    Fog,
    Cloud,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Edge => "edge",
            Tier::Fog => "fog",
            Tier::Cloud => "cloud",
        })
    }
}

/// Processing-stage tag of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    PreProcessing,
    Analytics,
    Inference,
    Training,
    Generic,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::PreProcessing,
        Stage::Analytics,
        Stage::Inference,
        Stage::Training,
        Stage::Generic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::PreProcessing => "pre_processing",
            Stage::Analytics => "analytics",
            Stage::Inference => "inference",
            Stage::Training => "training",
            Stage::Generic => "generic",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: u64,
    /// Abstract operations needed to complete the task.
    pub num_ops: f64,
    pub stage: Stage,
    pub input_bytes: u64,
    pub output_bytes: u64,
    /// Resource holding the task's input data before the run.
    pub origin: String,
    pub sequence_index: u64,
    /// Barrier group, only consulted in [`DependencyMode::Phased`].
    pub phase: u32,
}

impl Task {
    pub fn new(id: u64, num_ops: f64, origin: impl Into<String>) -> Self {
        Task {
            id,
            num_ops,
            stage: Stage::Generic,
            input_bytes: 0,
            output_bytes: 0,
            origin: origin.into(),
            sequence_index: id,
            phase: 0,
        }
    }

    pub fn with_stage(mut self, stage: Stage) -> Self {
        self.stage = stage;
        self
    }

    pub fn with_bytes(mut self, input_bytes: u64, output_bytes: u64) -> Self {
        self.input_bytes = input_bytes;
        self.output_bytes = output_bytes;
        self
    }

    pub fn with_sequence_index(mut self, index: u64) -> Self {
        self.sequence_index = index;
        self
    }

    pub fn with_phase(mut self, phase: u32) -> Self {
        self.phase = phase;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependencyMode {
    /// Every task is ready at t = 0.
    #[default]
    Independent,
    /// Task i+1 becomes ready when task i finishes executing (workload order).
    Sequential,
    /// Tasks of the next phase become ready once every task of the previous
    /// phase has finished; tasks within a phase are independent.
    Phased,
}

/// How a workload's `ops_dist` combines with each task's `num_ops`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpsDistMode {
    /// The sample replaces `num_ops`.
    Absolute,
    /// The sample scales `num_ops`.
    #[default]
    Multiplier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub tasks: Vec<Task>,
    pub ops_dist: Option<Distribution>,
    pub ops_dist_mode: OpsDistMode,
    pub dependency_mode: DependencyMode,
    /// Lower bound on sampled task ops.
    pub ops_floor: f64,
}

impl Workload {
    pub const DEFAULT_OPS_FLOOR: f64 = 1.0;

    pub fn new(tasks: Vec<Task>, dependency_mode: DependencyMode) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tasks.len());
        for task in &tasks {
            if !seen.insert(task.id) {
                return Err(PlanError::DuplicateTask(task.id).into());
            }
            if !task.num_ops.is_finite() || task.num_ops <= 0.0 {
                return Err(Error::Config(format!(
                    "task {} needs positive finite num_ops, got {}",
                    task.id, task.num_ops
                )));
            }
        }
        Ok(Workload {
            tasks,
            ops_dist: None,
            ops_dist_mode: OpsDistMode::default(),
            dependency_mode,
            ops_floor: Self::DEFAULT_OPS_FLOOR,
        })
    }

    pub fn with_ops_dist(mut self, dist: Distribution, mode: OpsDistMode) -> Self {
        self.ops_dist = Some(dist);
        self.ops_dist_mode = mode;
        self
    }

    pub fn with_ops_floor(mut self, floor: f64) -> Result<Self> {
        if !floor.is_finite() || floor <= 0.0 {
            return Err(Error::Config(format!("ops floor must be positive, got {floor}")));
        }
        self.ops_floor = floor;
        Ok(self)
    }

    pub fn total_ops(&self) -> f64 {
        self.tasks.iter().map(|t| t.num_ops).sum()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }
}

/// An execution site.
#[derive(Debug, Clone, PartialEq)]
pub struct Resource {
    pub id: String,
    pub tier: Tier,
    pub num_cores: u32,
    /// Nominal per-core throughput.
    pub ops_per_sec: f64,
    /// Multiplier on `ops_per_sec`, sampled once per task execution.
    pub perf_dist: Option<Distribution>,
    /// Charged after a task leaves the queue and before it executes.
    pub dispatch_delay: SimTime,
    /// Sampled throughput never drops below this fraction of nominal.
    pub throughput_floor_fraction: f64,
}

impl Resource {
    pub const DEFAULT_THROUGHPUT_FLOOR_FRACTION: f64 = 1e-6;

    pub fn new(id: impl Into<String>, tier: Tier, num_cores: u32, ops_per_sec: f64) -> Result<Self> {
        let id = id.into();
        if num_cores == 0 {
            return Err(Error::Config(format!("resource `{id}` needs at least one core")));
        }
        if !ops_per_sec.is_finite() || ops_per_sec <= 0.0 {
            return Err(Error::Config(format!(
                "resource `{id}` needs positive finite ops_per_sec, got {ops_per_sec}"
            )));
        }
        Ok(Resource {
            id,
            tier,
            num_cores,
            ops_per_sec,
            perf_dist: None,
            dispatch_delay: SimTime::ZERO,
            throughput_floor_fraction: Self::DEFAULT_THROUGHPUT_FLOOR_FRACTION,
        })
    }

    pub fn with_perf_dist(mut self, dist: Distribution) -> Self {
        self.perf_dist = Some(dist);
        self
    }

    pub fn with_dispatch_delay(mut self, delay: SimTime) -> Self {
        self.dispatch_delay = delay;
        self
    }

    pub fn with_throughput_floor_fraction(mut self, fraction: f64) -> Result<Self> {
        if !fraction.is_finite() || fraction <= 0.0 {
            return Err(Error::Config(format!(
                "throughput floor fraction must be positive, got {fraction}"
            )));
        }
        self.throughput_floor_fraction = fraction;
        Ok(self)
    }

    pub fn throughput_floor(&self) -> f64 {
        self.ops_per_sec * self.throughput_floor_fraction
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkConcurrency {
    /// Transfers queue FIFO; one at a time.
    #[default]
    Serial,
    Unlimited,
}

/// A directed network path between two resources.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub src: String,
    pub dst: String,
    /// Fixed cost paid by every transfer, e.g. broker connection setup.
    pub setup_overhead: SimTime,
    pub latency: SimTime,
    pub bandwidth_bytes_per_sec: f64,
    pub concurrency: LinkConcurrency,
}

impl Link {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, bandwidth_bytes_per_sec: f64) -> Result<Self> {
        let (src, dst) = (src.into(), dst.into());
        if !bandwidth_bytes_per_sec.is_finite() || bandwidth_bytes_per_sec <= 0.0 {
            return Err(Error::Config(format!(
                "link ({src}, {dst}) needs positive finite bandwidth, got {bandwidth_bytes_per_sec}"
            )));
        }
        Ok(Link {
            src,
            dst,
            setup_overhead: SimTime::ZERO,
            latency: SimTime::ZERO,
            bandwidth_bytes_per_sec,
            concurrency: LinkConcurrency::default(),
        })
    }

    pub fn with_setup_overhead(mut self, setup: SimTime) -> Self {
        self.setup_overhead = setup;
        self
    }

    pub fn with_latency(mut self, latency: SimTime) -> Self {
        self.latency = latency;
        self
    }

    pub fn with_concurrency(mut self, concurrency: LinkConcurrency) -> Self {
        self.concurrency = concurrency;
        self
    }
}
