//! Post-run analysis computed from the trace alone.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::engine::{ttc_of, PhaseTotals, RunResult};
use crate::error::{Error, Result};
use crate::model::Stage;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceUtilization {
    pub resource: String,
    pub num_cores: u32,
    pub tasks: usize,
    #[serde(rename = "busy_us")]
    pub busy: SimTime,
    /// Busy core-time over `num_cores × ttc`.
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSpan {
    pub stage: Stage,
    pub tasks: usize,
    /// Earliest readiness to latest completion among the stage's tasks.
    #[serde(rename = "span_us")]
    pub span: SimTime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub strategy: String,
    #[serde(rename = "ttc_us")]
    pub ttc: SimTime,
    pub ttc_sec: f64,
    pub phases: PhaseTotals,
    pub resources: Vec<ResourceUtilization>,
    pub stages: Vec<StageSpan>,
}

/// Busy time is execution only; dispatch delay is not counted as busy.
pub fn summarize(result: &RunResult) -> Result<Summary> {
    let trace = &result.trace;
    if trace.records.is_empty() {
        return Err(Error::Analysis("trace has no task records".into()));
    }
    let mut by_resource: HashMap<&str, usize> = HashMap::new();
    for (i, r) in trace.resources.iter().enumerate() {
        if r.num_cores == 0 {
            return Err(Error::Analysis(format!("resource `{}` has no cores", r.id)));
        }
        by_resource.insert(r.id.as_str(), i);
    }
    let mut busy = vec![SimTime::ZERO; trace.resources.len()];
    let mut counts = vec![0usize; trace.resources.len()];
    for rec in &trace.records {
        rec.check().map_err(Error::Analysis)?;
        let &i = by_resource
            .get(rec.resource.as_str())
            .ok_or_else(|| Error::Analysis(format!("task {} ran on unknown resource `{}`", rec.task_id, rec.resource)))?;
        if rec.core >= trace.resources[i].num_cores {
            return Err(Error::Analysis(format!("task {} ran on missing core {}", rec.task_id, rec.core)));
        }
        busy[i] = busy[i] + rec.compute_time();
        counts[i] += 1;
    }

    let ttc = ttc_of(&trace.records);
    let resources = trace
        .resources
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let capacity = r.num_cores as f64 * ttc.as_micros() as f64;
            ResourceUtilization {
                resource: r.id.clone(),
                num_cores: r.num_cores,
                tasks: counts[i],
                busy: busy[i],
                utilization: if capacity > 0.0 { busy[i].as_micros() as f64 / capacity } else { 0.0 },
            }
        })
        .collect();

    let mut stage_bounds: BTreeMap<Stage, (SimTime, SimTime, usize)> = BTreeMap::new();
    for rec in &trace.records {
        let e = stage_bounds
            .entry(rec.stage)
            .or_insert((SimTime::MAX, SimTime::ZERO, 0));
        e.0 = e.0.min(rec.ready);
        e.1 = e.1.max(rec.completion());
        e.2 += 1;
    }
    let stages = stage_bounds
        .into_iter()
        .map(|(stage, (first, last, tasks))| StageSpan {
            stage,
            tasks,
            span: last.saturating_sub(first),
        })
        .collect();

    Ok(Summary {
        strategy: trace.meta.strategy.clone(),
        ttc,
        ttc_sec: ttc.as_secs_f64(),
        phases: PhaseTotals::from_records(&trace.records),
        resources,
        stages,
    })
}

/// `(ttc_a − ttc_b) / max(ttc_a, ttc_b)`, a signed fraction in `[−1, 1]`.
pub fn relative_delta(a: &Summary, b: &Summary) -> f64 {
    relative_ttc_delta(a.ttc, b.ttc)
}

pub fn relative_ttc_delta(a: SimTime, b: SimTime) -> f64 {
    let (a, b) = (a.as_micros() as f64, b.as_micros() as f64);
    let scale = a.max(b);
    if scale == 0.0 {
        0.0
    } else {
        (a - b) / scale
    }
}
