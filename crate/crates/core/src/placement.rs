//! Placement strategies: edge-centric, cloud-centric and hybrid modalities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{run_with_options, RunOptions, RunResult};
use crate::error::{Error, PlanError, Result};
use crate::metrics::{relative_delta, summarize, Summary};
use crate::model::{Link, Resource, Stage, Task, Tier, Workload};

/// Task id → resource id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlacementPlan {
    pub assignment: BTreeMap<u64, String>,
    pub strategy: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMetric {
    InputBytes,
    NumOps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    EdgeCentric,
    CloudCentric,
    /// Tasks whose metric is at or below `threshold` go to `below`.
    HybridThreshold {
        metric: ThresholdMetric,
        threshold: f64,
        below: Tier,
        above: Tier,
    },
    HybridStage {
        stages: BTreeMap<Stage, Tier>,
    },
    Explicit {
        assignment: BTreeMap<u64, String>,
    },
}

impl StrategySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            StrategySpec::EdgeCentric => "edge_centric",
            StrategySpec::CloudCentric => "cloud_centric",
            StrategySpec::HybridThreshold { .. } => "hybrid_threshold",
            StrategySpec::HybridStage { .. } => "hybrid_stage",
            StrategySpec::Explicit { .. } => "explicit",
        }
    }
}

fn tier_members(resources: &[Resource], tier: Tier) -> Result<Vec<&Resource>, PlanError> {
    let members: Vec<_> = resources.iter().filter(|r| r.tier == tier).collect();
    if members.is_empty() {
        return Err(PlanError::EmptyTier(tier));
    }
    Ok(members)
}

fn metric_value(task: &Task, metric: ThresholdMetric) -> f64 {
    match metric {
        ThresholdMetric::InputBytes => task.input_bytes as f64,
        ThresholdMetric::NumOps => task.num_ops,
    }
}

/// Builds a complete assignment. Tasks sent to a tier with several
/// resources are spread round-robin by `sequence_index`, in declaration
/// order of the resources.
pub fn make_plan(workload: &Workload, resources: &[Resource], spec: &StrategySpec) -> Result<PlacementPlan, PlanError> {
    let mut tiers: BTreeMap<Tier, Vec<&Resource>> = BTreeMap::new();
    let mut require = |tier: Tier| -> Result<(), PlanError> {
        if let std::collections::btree_map::Entry::Vacant(slot) = tiers.entry(tier) {
            slot.insert(tier_members(resources, tier)?);
        }
        Ok(())
    };
    match spec {
        StrategySpec::EdgeCentric => require(Tier::Edge)?,
        StrategySpec::CloudCentric => require(Tier::Cloud)?,
        StrategySpec::HybridThreshold { below, above, .. } => {
            require(*below)?;
            require(*above)?;
        }
        StrategySpec::HybridStage { stages } => {
            for tier in stages.values() {
                require(*tier)?;
            }
        }
        StrategySpec::Explicit { .. } => {}
    }

    let pick = |tier: Tier, task: &Task| -> String {
        let members = &tiers[&tier];
        members[(task.sequence_index % members.len() as u64) as usize].id.clone()
    };

    let mut assignment = BTreeMap::new();
    for task in &workload.tasks {
        let resource = match spec {
            StrategySpec::EdgeCentric => pick(Tier::Edge, task),
            StrategySpec::CloudCentric => pick(Tier::Cloud, task),
            StrategySpec::HybridThreshold {
                metric,
                threshold,
                below,
                above,
            } => {
                let tier = if metric_value(task, *metric) <= *threshold { *below } else { *above };
                pick(tier, task)
            }
            StrategySpec::HybridStage { stages } => {
                let tier = stages.get(&task.stage).ok_or(PlanError::UnmappedStage(task.stage))?;
                pick(*tier, task)
            }
            StrategySpec::Explicit { assignment } => {
                let id = assignment.get(&task.id).ok_or(PlanError::UnassignedTask(task.id))?;
                if !resources.iter().any(|r| &r.id == id) {
                    return Err(PlanError::UnknownResource {
                        task: task.id,
                        resource: id.clone(),
                    });
                }
                id.clone()
            }
        };
        if assignment.insert(task.id, resource).is_some() {
            return Err(PlanError::DuplicateTask(task.id));
        }
    }
    if let StrategySpec::Explicit { assignment: given } = spec {
        if let Some(extra) = given.keys().find(|id| !assignment.contains_key(id)) {
            return Err(PlanError::UnknownTask(*extra));
        }
    }
    Ok(PlacementPlan {
        assignment,
        strategy: spec.kind().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub spec: StrategySpec,
    pub result: RunResult,
    pub summary: Summary,
    /// Signed relative TTC difference to the best row; 0 for the best.
    pub delta_vs_best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Index of the first row with minimum TTC.
    pub best: usize,
}

impl Comparison {
    pub fn best_row(&self) -> &ComparisonRow {
        &self.rows[self.best]
    }
}

/// Labels unique within a list: repeated kinds get a `#n` suffix.
pub fn strategy_labels(specs: &[StrategySpec]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    specs
        .iter()
        .map(|s| {
            let n = seen.entry(s.kind()).or_insert(0);
            *n += 1;
            if *n == 1 {
                s.kind().to_string()
            } else {
                format!("{}#{}", s.kind(), n)
            }
        })
        .collect()
}

/// Runs every strategy once with the same seed.
pub fn compare_strategies(
    workload: &Workload,
    resources: &[Resource],
    links: &[Link],
    specs: &[StrategySpec],
    seed: u64,
) -> Result<Comparison> {
    compare_strategies_with_options(workload, resources, links, specs, seed, &RunOptions::default())
}

pub fn compare_strategies_with_options(
    workload: &Workload,
    resources: &[Resource],
    links: &[Link],
    specs: &[StrategySpec],
    seed: u64,
    options: &RunOptions,
) -> Result<Comparison> {
    if specs.is_empty() {
        return Err(Error::Config("at least one strategy is required".into()));
    }
    let labels = strategy_labels(specs);
    let mut rows = Vec::with_capacity(specs.len());
    for (spec, label) in specs.iter().zip(labels) {
        let labelled = |e: Error| Error::Strategy {
            label: label.clone(),
            source: Box::new(e),
        };
        let mut plan = make_plan(workload, resources, spec).map_err(|e| labelled(e.into()))?;
        plan.strategy = label.clone();
        let result = run_with_options(workload, resources, links, &plan, seed, options).map_err(labelled)?;
        let summary = summarize(&result).map_err(labelled)?;
        rows.push(ComparisonRow {
            label,
            spec: spec.clone(),
            result,
            summary,
            delta_vs_best: 0.0,
        });
    }
    let best = rows
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| (r.summary.ttc, *i))
        .map(|(i, _)| i)
        .expect("non-empty");
    let best_summary = rows[best].summary.clone();
    for row in &mut rows {
        row.delta_vs_best = relative_delta(&row.summary, &best_summary);
    }
    Ok(Comparison { rows, best })
}
