//! Scenario configuration: JSON schema, overrides, digest, and conversion
//! into emulator inputs.

use std::path::Path;

use continuum_emu::placement::StrategySpec;
use continuum_emu::workloads::{kmeans_workload, pipeline_workload, KMeansSpec, StageProfile};
use continuum_emu::{
    DependencyMode, Distribution, Link, LinkConcurrency, OpsDistMode, Resource, RunOptions, SimTime, Stage, Task, Tier,
    Workload,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "CONTINUUM_EMU_SEED";

/// A configuration problem, located by field path where possible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl ToString) -> Self {
        Diagnostic {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub resources: Vec<ResourceConfig>,
    #[serde(default)]
    pub links: Vec<LinkConfig>,
    pub workload: WorkloadConfig,
    pub strategies: Vec<StrategySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceConfig {
    pub id: String,
    pub tier: Tier,
    pub num_cores: u32,
    pub ops_per_sec: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perf_dist: Option<Distribution>,
    #[serde(default)]
    pub dispatch_delay_sec: f64,
    #[serde(default = "throughput_floor_fraction")]
    pub throughput_floor_fraction: f64,
}

fn throughput_floor_fraction() -> f64 {
    Resource::DEFAULT_THROUGHPUT_FLOOR_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub src: String,
    pub dst: String,
    pub bandwidth_bytes_per_sec: f64,
    #[serde(default)]
    pub setup_overhead_sec: f64,
    #[serde(default)]
    pub latency_sec: f64,
    #[serde(default)]
    pub concurrency: LinkConcurrency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WorkloadConfig {
    Kmeans(KMeansConfig),
    Pipeline(PipelineConfig),
    Tasks(TaskListConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KMeansConfig {
    pub n_points: u64,
    pub n_clusters: u64,
    pub n_iterations: u64,
    pub ops_per_point_cluster: f64,
    pub bytes_per_point: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variability: Option<Distribution>,
    /// Resource holding the dataset.
    pub origin: String,
}

impl KMeansConfig {
    pub fn spec(&self) -> KMeansSpec {
        KMeansSpec {
            n_points: self.n_points,
            n_clusters: self.n_clusters,
            n_iterations: self.n_iterations,
            ops_per_point_cluster: self.ops_per_point_cluster,
            bytes_per_point: self.bytes_per_point,
            variability: self.variability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub stage: Stage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bytes_in_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bytes_out_ratio: Option<f64>,
}

impl StageConfig {
    pub fn profile(&self) -> StageProfile {
        let d = StageProfile::default_for(self.stage);
        StageProfile::new(
            self.stage,
            self.ops_multiplier.unwrap_or(d.ops_multiplier),
            self.bytes_in_ratio.unwrap_or(d.bytes_in_ratio),
            self.bytes_out_ratio.unwrap_or(d.bytes_out_ratio),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub stages: Vec<StageConfig>,
    pub raw_ops: f64,
    pub raw_bytes: u64,
    pub tasks_per_stage: u64,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub id: u64,
    pub num_ops: f64,
    pub origin: String,
    #[serde(default = "generic")]
    pub stage: Stage,
    #[serde(default)]
    pub input_bytes: u64,
    #[serde(default)]
    pub output_bytes: u64,
    #[serde(default)]
    pub phase: u32,
}

fn generic() -> Stage {
    Stage::Generic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskListConfig {
    #[serde(default)]
    pub dependency_mode: DependencyMode,
    pub items: Vec<TaskConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops_dist: Option<Distribution>,
    #[serde(default)]
    pub ops_dist_mode: OpsDistMode,
    #[serde(default = "ops_floor")]
    pub ops_floor: f64,
}

fn ops_floor() -> f64 {
    Workload::DEFAULT_OPS_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path into the document, e.g. `workload.kmeans.n_points`.
    pub parameter: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub return_outputs: bool,
}

/// A parsed document together with its raw JSON form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub document: Value,
    pub config: ScenarioConfig,
}

impl LoadedConfig {
    /// SHA-256 of the canonical (sorted-key, compact) document.
    pub fn digest(&self) -> String {
        digest(&self.document)
    }

    pub fn normalized(&self) -> String {
        serde_json::to_string_pretty(&self.document).expect("JSON values serialize")
    }
}

pub fn digest(document: &Value) -> String {
    let canonical = serde_json::to_string(document).expect("JSON values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn read_document(path: &Path) -> Result<Value, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic::new(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Diagnostic::new("<document>", e))
}

/// Parses with field-path diagnostics. Line and column come from the
/// source text when available.
pub fn parse_text(text: &str) -> Result<LoadedConfig, Diagnostic> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(path_error)?;
    let document: Value = serde_json::from_str(text).map_err(|e| Diagnostic::new("<document>", e))?;
    finish(document, config)
}

pub fn parse_value(document: Value) -> Result<LoadedConfig, Diagnostic> {
    let config: ScenarioConfig = serde_path_to_error::deserialize(&document).map_err(path_error)?;
    finish(document, config)
}

pub fn load(path: &Path) -> Result<LoadedConfig, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic::new(path.display().to_string(), e))?;
    parse_text(&text)
}

fn path_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> Diagnostic {
    let path = e.path().to_string();
    let path = if path == "." { "<document>".to_string() } else { path };
    Diagnostic::new(path, e.into_inner())
}

fn finish(document: Value, config: ScenarioConfig) -> Result<LoadedConfig, Diagnostic> {
    if config.schema_version != SCHEMA_VERSION {
        return Err(Diagnostic::new(
            "schema_version",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", config.schema_version),
        ));
    }
    if config.strategies.is_empty() {
        return Err(Diagnostic::new("strategies", "at least one strategy is required"));
    }
    Ok(LoadedConfig { document, config })
}

/// Parses `path=value`. The value is read as JSON when it parses, otherwise
/// taken as a string.
pub fn parse_assignment(raw: &str) -> Result<(String, Value), Diagnostic> {
    let (path, value) = raw
        .split_once('=')
        .ok_or_else(|| Diagnostic::new("--set", format!("expected path=value, got `{raw}`")))?;
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((path.trim().to_string(), value))
}

/// Integral floats become integers so `1e6` can fill an integer field.
fn normalize_number(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("f64");
            if f.fract() == 0.0 && f >= 0.0 && f < u64::MAX as f64 {
                Value::from(f as u64)
            } else {
                Value::Number(n)
            }
        }
        other => other,
    }
}

/// Sets a dotted path (`a.b.0.c`) inside `document`. Intermediate objects
/// must already exist; the leaf may be new.
pub fn set_path(document: &mut Value, path: &str, value: Value) -> Result<(), Diagnostic> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Diagnostic::new(path, "empty path segment"));
    }
    let mut cur = document;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        let here = parts[..=depth].join(".");
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), normalize_number(value));
                    return Ok(());
                }
                map.get_mut(*part).ok_or_else(|| Diagnostic::new(here, "no such field"))?
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Diagnostic::new(here.clone(), "expected an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Diagnostic::new(here, format!("index out of range (len {len})")))?;
                if last {
                    *slot = normalize_number(value);
                    return Ok(());
                }
                slot
            }
            _ => return Err(Diagnostic::new(here, "cannot descend into a scalar")),
        };
    }
    unreachable!("loop returns at the last segment")
}

/// Emulator inputs built from a configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub workload: Workload,
    pub resources: Vec<Resource>,
    pub links: Vec<Link>,
    pub strategies: Vec<StrategySpec>,
    pub options: RunOptions,
}

fn secs(path: String, value: f64) -> Result<SimTime, Diagnostic> {
    SimTime::from_secs_f64(value).map_err(|e| Diagnostic::new(path, e))
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario, Diagnostic> {
        let resources = self
            .resources
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let at = |field: &str| format!("resources[{i}].{field}");
                let mut res = Resource::new(&r.id, r.tier, r.num_cores, r.ops_per_sec)
                    .map_err(|e| Diagnostic::new(format!("resources[{i}]"), e))?
                    .with_dispatch_delay(secs(at("dispatch_delay_sec"), r.dispatch_delay_sec)?)
                    .with_throughput_floor_fraction(r.throughput_floor_fraction)
                    .map_err(|e| Diagnostic::new(at("throughput_floor_fraction"), e))?;
                res.perf_dist = r.perf_dist;
                Ok(res)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if resources.is_empty() {
            return Err(Diagnostic::new("resources", "at least one resource is required"));
        }

        let links = self
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let at = |field: &str| format!("links[{i}].{field}");
                Ok(Link::new(&l.src, &l.dst, l.bandwidth_bytes_per_sec)
                    .map_err(|e| Diagnostic::new(at("bandwidth_bytes_per_sec"), e))?
                    .with_setup_overhead(secs(at("setup_overhead_sec"), l.setup_overhead_sec)?)
                    .with_latency(secs(at("latency_sec"), l.latency_sec)?)
                    .with_concurrency(l.concurrency))
            })
            .collect::<Result<Vec<_>, Diagnostic>>()?;

        let workload = match &self.workload {
            WorkloadConfig::Kmeans(k) => {
                kmeans_workload(&k.spec(), &k.origin).map_err(|e| Diagnostic::new("workload.kmeans", e))?
            }
            WorkloadConfig::Pipeline(p) => {
                let stages: Vec<StageProfile> = p.stages.iter().map(StageConfig::profile).collect();
                pipeline_workload(&stages, p.raw_ops, p.raw_bytes, p.tasks_per_stage, &p.origin)
                    .map_err(|e| Diagnostic::new("workload.pipeline", e))?
            }
            WorkloadConfig::Tasks(list) => {
                let tasks = list
                    .items
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        Task::new(t.id, t.num_ops, &t.origin)
                            .with_stage(t.stage)
                            .with_bytes(t.input_bytes, t.output_bytes)
                            .with_sequence_index(i as u64)
                            .with_phase(t.phase)
                    })
                    .collect();
                let mut w = Workload::new(tasks, list.dependency_mode)
                    .map_err(|e| Diagnostic::new("workload.tasks.items", e))?
                    .with_ops_floor(list.ops_floor)
                    .map_err(|e| Diagnostic::new("workload.tasks.ops_floor", e))?;
                if let Some(dist) = list.ops_dist {
                    w = w.with_ops_dist(dist, list.ops_dist_mode);
                }
                w
            }
        };
        if workload.is_empty() {
            return Err(Diagnostic::new("workload", "workload has no tasks"));
        }

        Ok(Scenario {
            workload,
            resources,
            links,
            strategies: self.strategies.clone(),
            options: RunOptions {
                return_outputs: self.output.return_outputs,
            },
        })
    }
}

/// `--seed` beats the environment, which beats the config file.
pub fn effective_seed(config_seed: u64, cli_seed: Option<u64>, env_seed: Option<&str>) -> Result<u64, Diagnostic> {
    if let Some(s) = cli_seed {
        return Ok(s);
    }
    match env_seed {
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Diagnostic::new(SEED_ENV, format!("not an unsigned 64-bit integer: `{raw}`"))),
        None => Ok(config_seed),
    }
}

/// Stable ordering key for sweep values: numbers by value, everything else
/// after them in listed order.
pub fn sweep_order(values: &[Value]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let key = |v: &Value| v.as_f64().unwrap_or(f64::INFINITY);
    idx.sort_by(|&a, &b| key(&values[a]).total_cmp(&key(&values[b])).then(a.cmp(&b)));
    idx
}

pub fn render_value(value: &Value) -> String {
    match normalize_number(value.clone()) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "seed": 1,
            "resources": [{"id": "edge", "tier": "edge", "num_cores": 1, "ops_per_sec": 1e6}],
            "workload": {"tasks": {"items": [{"id": 0, "num_ops": 5e6, "origin": "edge"}]}},
            "strategies": [{"kind": "edge_centric"}]
        })
    }

    #[test]
    fn minimal_config_builds() {
        let loaded = parse_value(minimal()).unwrap();
        let sc = loaded.config.build().unwrap();
        assert_eq!(sc.workload.len(), 1);
        assert_eq!(loaded.digest().len(), 64);
    }

    #[test]
    fn digest_ignores_key_order_and_whitespace() {
        let a = parse_text(r#"{"seed":1,"resources":[],"workload":{"tasks":{"items":[]}},"strategies":[{"kind":"edge_centric"}]}"#).unwrap();
        let b = parse_text("{ \"strategies\": [ {\"kind\": \"edge_centric\"} ],\n \"workload\": {\"tasks\": {\"items\": []}}, \"resources\": [], \"seed\": 1 }").unwrap();
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn unknown_strategy_names_the_field() {
        let mut doc = minimal();
        doc["strategies"][0]["kind"] = json!("fog_centric");
        let err = parse_value(doc).unwrap_err();
        assert_eq!(err.path, "strategies[0].kind");
        assert!(err.message.contains("fog_centric"), "{err}");
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let text = "{\n  \"resources\": [\n    {\"id\": \"e\", \"tier\": \"edge\", \"num_cores\": -1, \"ops_per_sec\": 1}\n  ]\n}";
        let err = parse_text(text).unwrap_err();
        assert_eq!(err.path, "resources[0].num_cores");
        assert!(err.message.contains("line 3"), "{err}");
    }

    #[test]
    fn invalid_distribution_is_a_schema_error() {
        let mut doc = minimal();
        doc["resources"][0]["perf_dist"] = json!({"kind": "normal", "mean": 1.0, "stddev": -1.0});
        let err = parse_value(doc).unwrap_err();
        assert_eq!(err.path, "resources[0].perf_dist");
    }

    #[test]
    fn domain_errors_are_located() {
        let mut doc = minimal();
        doc["resources"][0]["num_cores"] = json!(0);
        let err = parse_value(doc).unwrap().config.build().unwrap_err();
        assert_eq!(err.path, "resources[0]");
    }

    #[test]
    fn set_path_updates_nested_values() {
        let mut doc = minimal();
        set_path(&mut doc, "workload.tasks.items.0.num_ops", json!(1e6)).unwrap();
        assert_eq!(doc["workload"]["tasks"]["items"][0]["num_ops"], json!(1_000_000u64));
        set_path(&mut doc, "seed", json!(9)).unwrap();
        assert_eq!(doc["seed"], json!(9));
        assert!(set_path(&mut doc, "workload.nope.x", json!(1)).is_err());
        assert!(set_path(&mut doc, "resources.4.id", json!("x")).is_err());
    }

    #[test]
    fn assignments_parse_json_or_string() {
        assert_eq!(parse_assignment("a.b=3").unwrap(), ("a.b".into(), json!(3)));
        assert_eq!(parse_assignment("a=edge").unwrap(), ("a".into(), json!("edge")));
        assert!(parse_assignment("nothing").is_err());
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(effective_seed(1, Some(3), Some("2")).unwrap(), 3);
        assert_eq!(effective_seed(1, None, Some("2")).unwrap(), 2);
        assert_eq!(effective_seed(1, None, None).unwrap(), 1);
        assert!(effective_seed(1, None, Some("x")).is_err());
    }

    #[test]
    fn sweep_values_sort_numerically() {
        let values = vec![json!(1000), json!(32), json!(1e6), json!(30000)];
        assert_eq!(sweep_order(&values), vec![1, 0, 3, 2]);
    }
}
