//! Deterministic discrete-event emulation of task placement across the
//! edge-to-cloud continuum.
//!
//! A [`Workload`] of abstract-operation [`Task`]s is placed onto a set of
//! [`Resource`]s by a [`placement`] strategy and executed by the
//! single-threaded [`engine`]. Data moves between resources over [`Link`]s
//! whose cost model lives in [`transfer`]. [`metrics`] turns the resulting
//! trace into time-to-completion (TTC) breakdowns.

pub mod dist;
pub mod engine;
mod error;
pub mod metrics;
pub mod model;
pub mod placement;
pub mod rng;
pub mod scenario;
pub mod time;
pub mod transfer;
pub mod workloads;

pub use dist::{sample, Distribution};
pub use engine::{run, run_with_options, RunOptions, RunResult, Trace, TaskRecord};
pub use error::{Error, PlanError, Result};
pub use metrics::{relative_delta, summarize, Summary};
pub use model::{
    DependencyMode, Link, LinkConcurrency, OpsDistMode, Resource, Stage, Task, Tier, Workload,
};
pub use placement::{compare_strategies, make_plan, Comparison, PlacementPlan, StrategySpec};
pub use rng::RngStream;
pub use time::{duration_for, SimTime};
