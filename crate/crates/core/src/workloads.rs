//! Workload generators: iterative K-Means and staged processing pipelines.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::model::{DependencyMode, OpsDistMode, Stage, Task, Workload};

/// K-Means cost model: every iteration costs `ops_per_point_cluster × K × N`
/// operations. Dimensionality is folded into the per-point constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KMeansSpec {
    pub n_points: u64,
    pub n_clusters: u64,
    pub n_iterations: u64,
    pub ops_per_point_cluster: f64,
    pub bytes_per_point: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variability: Option<Distribution>,
}

impl KMeansSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("kmeans.{name} must be positive, got {v}")))
            }
        };
        positive("n_points", self.n_points as f64)?;
        positive("n_clusters", self.n_clusters as f64)?;
        positive("n_iterations", self.n_iterations as f64)?;
        positive("ops_per_point_cluster", self.ops_per_point_cluster)?;
        positive("bytes_per_point", self.bytes_per_point)
    }

    pub fn ops_per_iteration(&self) -> f64 {
        self.ops_per_point_cluster * self.n_clusters as f64 * self.n_points as f64
    }

    pub fn total_ops(&self) -> f64 {
        self.ops_per_iteration() * self.n_iterations as f64
    }

    pub fn dataset_bytes(&self) -> u64 {
        (self.n_points as f64 * self.bytes_per_point).round() as u64
    }
}

/// One task per iteration, executed strictly in order. The dataset moves
/// with the first iteration only; later iterations reuse it in place.
pub fn kmeans_workload(spec: &KMeansSpec, origin: &str) -> Result<Workload> {
    spec.validate()?;
    let ops = spec.ops_per_iteration();
    let tasks = (0..spec.n_iterations)
        .map(|i| {
            let input = if i == 0 { spec.dataset_bytes() } else { 0 };
            Task::new(i, ops, origin)
                .with_stage(Stage::Analytics)
                .with_bytes(input, 0)
        })
        .collect();
    let workload = Workload::new(tasks, DependencyMode::Sequential)?;
    Ok(match spec.variability {
        Some(dist) => workload.with_ops_dist(dist, OpsDistMode::Multiplier),
        None => workload,
    })
}

/// Per-core throughput at which emulating `spec` takes `measured_runtime_sec`.
pub fn calibrate_throughput(measured_runtime_sec: f64, spec: &KMeansSpec) -> Result<f64> {
    spec.validate()?;
    if !measured_runtime_sec.is_finite() || measured_runtime_sec <= 0.0 {
        return Err(Error::Config(format!(
            "measured runtime must be positive, got {measured_runtime_sec}"
        )));
    }
    Ok(spec.total_ops() / measured_runtime_sec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageProfile {
    pub stage: Stage,
    /// Compute cost relative to the raw pipeline cost.
    pub ops_multiplier: f64,
    /// Share of the raw input read by the stage. Only the first stage's
    /// value is used; later stages consume their predecessor's output.
    #[serde(default = "one")]
    pub bytes_in_ratio: f64,
    /// Share of the raw input still present after the stage.
    pub bytes_out_ratio: f64,
}

fn one() -> f64 {
    1.0
}

impl StageProfile {
    pub fn new(stage: Stage, ops_multiplier: f64, bytes_in_ratio: f64, bytes_out_ratio: f64) -> Self {
        StageProfile {
            stage,
            ops_multiplier,
            bytes_in_ratio,
            bytes_out_ratio,
        }
    }

    /// Illustrative defaults: compute grows fivefold per stage from
    /// pre-processing to training while the data shrinks.
    pub fn default_for(stage: Stage) -> Self {
        match stage {
            Stage::PreProcessing => StageProfile::new(stage, 1.0, 1.0, 0.1),
            Stage::Analytics => StageProfile::new(stage, 5.0, 1.0, 0.05),
            Stage::Inference => StageProfile::new(stage, 25.0, 1.0, 0.01),
            Stage::Training => StageProfile::new(stage, 125.0, 1.0, 0.001),
            Stage::Generic => StageProfile::new(stage, 1.0, 1.0, 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ops_multiplier.is_finite() && self.ops_multiplier > 0.0) {
            return Err(Error::Config(format!(
                "stage {}: ops_multiplier must be positive, got {}",
                self.stage, self.ops_multiplier
            )));
        }
        for (name, v) in [("bytes_in_ratio", self.bytes_in_ratio), ("bytes_out_ratio", self.bytes_out_ratio)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("stage {}: {name} must be non-negative, got {v}", self.stage)));
            }
        }
        Ok(())
    }
}

/// Splits `total` into `parts` integers that differ by at most one and sum
/// to `total`; the remainder goes to the first parts.
fn split_bytes(total: u64, parts: u64) -> impl Iterator<Item = u64> {
    let (base, rem) = (total / parts, total % parts);
    (0..parts).map(move |j| base + u64::from(j < rem))
}

/// Stages run one after another; the tasks of one stage run in parallel.
/// Stage `s` receives exactly the bytes stage `s − 1` produced.
pub fn pipeline_workload(
    stages: &[StageProfile],
    raw_ops: f64,
    raw_bytes: u64,
    tasks_per_stage: u64,
    origin: &str,
) -> Result<Workload> {
    if stages.is_empty() {
        return Err(Error::Config("pipeline needs at least one stage".into()));
    }
    if !(raw_ops.is_finite() && raw_ops > 0.0) {
        return Err(Error::Config(format!("raw_ops must be positive, got {raw_ops}")));
    }
    if tasks_per_stage == 0 {
        return Err(Error::Config("tasks_per_stage must be positive".into()));
    }
    let mut stage_in = (raw_bytes as f64 * stages[0].bytes_in_ratio).round() as u64;
    let mut tasks = Vec::with_capacity(stages.len() * tasks_per_stage as usize);
    for (s, profile) in stages.iter().enumerate() {
        profile.validate()?;
        let stage_out = (raw_bytes as f64 * profile.bytes_out_ratio).round() as u64;
        let ops = raw_ops * profile.ops_multiplier / tasks_per_stage as f64;
        let inputs = split_bytes(stage_in, tasks_per_stage);
        let outputs = split_bytes(stage_out, tasks_per_stage);
        for (j, (input, output)) in inputs.zip(outputs).enumerate() {
            let id = s as u64 * tasks_per_stage + j as u64;
            tasks.push(
                Task::new(id, ops, origin)
                    .with_stage(profile.stage)
                    .with_bytes(input, output)
                    .with_phase(s as u32),
            );
        }
        stage_in = stage_out;
    }
    Workload::new(tasks, DependencyMode::Phased)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: u64, n: u64, t: u64, c: f64) -> KMeansSpec {
        KMeansSpec {
            n_points: n,
            n_clusters: k,
            n_iterations: t,
            ops_per_point_cluster: c,
            bytes_per_point: 16.0,
            variability: None,
        }
    }

    #[test]
    fn kmeans_formula() {
        let w = kmeans_workload(&spec(2, 1000, 3, 1.0), "edge").unwrap();
        assert_eq!(w.dependency_mode, DependencyMode::Sequential);
        assert_eq!(w.len(), 3);
        assert!(w.tasks.iter().all(|t| t.num_ops == 2000.0 && t.origin == "edge"));
        assert_eq!(w.tasks[0].input_bytes, 16_000);
        assert!(w.tasks[1..].iter().all(|t| t.input_bytes == 0));
    }

    #[test]
    fn doubling_clusters_doubles_ops() {
        let a = kmeans_workload(&spec(4, 5000, 2, 3.0), "edge").unwrap();
        let b = kmeans_workload(&spec(8, 5000, 2, 3.0), "edge").unwrap();
        for (x, y) in a.tasks.iter().zip(&b.tasks) {
            assert_eq!(y.num_ops, 2.0 * x.num_ops);
        }
    }

    #[test]
    fn kmeans_rejects_zero_fields() {
        assert!(kmeans_workload(&spec(0, 10, 1, 1.0), "e").is_err());
        assert!(kmeans_workload(&spec(1, 10, 1, 0.0), "e").is_err());
    }

    #[test]
    fn calibration_examples() {
        let s = spec(2, 1000, 5, 1.0);
        assert_eq!(calibrate_throughput(0.01, &s).unwrap(), 1e6);
        let fast = calibrate_throughput(1.0, &s).unwrap();
        let slow = calibrate_throughput(2.0, &s).unwrap();
        assert_eq!(fast, 2.0 * slow);
        assert!(calibrate_throughput(0.0, &s).is_err());
    }

    #[test]
    fn identity_pipeline() {
        let w = pipeline_workload(&[StageProfile::new(Stage::Generic, 1.0, 1.0, 1.0)], 1234.5, 99, 1, "edge").unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.tasks[0].num_ops, 1234.5);
        assert_eq!(w.tasks[0].input_bytes, 99);
    }

    #[test]
    fn ratio_composition() {
        let stages = [
            StageProfile::new(Stage::PreProcessing, 1.0, 1.0, 0.1),
            StageProfile::default_for(Stage::Analytics),
        ];
        let w = pipeline_workload(&stages, 100.0, 1_000_000, 4, "edge").unwrap();
        let analytics_in: u64 = w.tasks.iter().filter(|t| t.stage == Stage::Analytics).map(|t| t.input_bytes).sum();
        assert_eq!(analytics_in, 100_000);
        assert!(w.tasks.iter().filter(|t| t.stage == Stage::Analytics).all(|t| t.phase == 1));
    }

    #[test]
    fn default_multipliers_follow_stage_order() {
        let m: Vec<f64> = [Stage::PreProcessing, Stage::Analytics, Stage::Inference, Stage::Training]
            .iter()
            .map(|s| StageProfile::default_for(*s).ops_multiplier)
            .collect();
        assert!(m.windows(2).all(|w| w[0] < w[1]), "{m:?}");
    }

    #[test]
    fn empty_pipeline_is_an_error() {
        assert!(pipeline_workload(&[], 1.0, 1, 1, "edge").is_err());
    }

    proptest::proptest! {
        #[test]
        fn kmeans_total_ops_exact(k in 1u64..64, n in 1u64..2_000_000, t in 1u64..50, c in 1u32..100) {
            let s = spec(k, n, t, c as f64);
            let w = kmeans_workload(&s, "edge").unwrap();
            proptest::prop_assert_eq!(w.total_ops(), (c as u64 * k * n * t) as f64);
        }

        #[test]
        fn pipeline_conserves_bytes(
            raw in 0u64..1 << 40,
            tps in 1u64..9,
            outs in proptest::collection::vec(0.0f64..1.5, 1..5),
        ) {
            let stages: Vec<_> = outs.iter().map(|&o| StageProfile::new(Stage::Generic, 1.0, 1.0, o)).collect();
            let w = pipeline_workload(&stages, 10.0, raw, tps, "edge").unwrap();
            for s in 1..stages.len() as u32 {
                let prev_out: u64 = w.tasks.iter().filter(|t| t.phase == s - 1).map(|t| t.output_bytes).sum();
                let this_in: u64 = w.tasks.iter().filter(|t| t.phase == s).map(|t| t.input_bytes).sum();
                proptest::prop_assert_eq!(prev_out, this_in);
            }
        }
    }
}
