//! Single-threaded discrete-event execution of a placed workload.
//!
//! Events are ordered by `(time, kind priority, enqueue sequence)`. The kind
//! priority is fixed: transfer end, task end, task ready, transfer start,
//! task start. Within a resource, tasks wait in one FIFO queue and are
//! handed to the core that became free earliest (lowest index on ties).

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use serde::Serialize;

use crate::dist::sample;
use crate::error::{Error, PlanError, Result};
use crate::model::{DependencyMode, Link, OpsDistMode, Resource, Stage, Tier, Workload};
use crate::placement::PlacementPlan;
use crate::rng::RngStream;
use crate::time::{duration_for, SimTime};
use crate::transfer::{LinkState, TransferRequest};

const OPS_STREAM: &str = "workload.ops";

fn perf_stream_label(resource: &str) -> String {
    format!("resource.perf/{resource}")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Ship `output_bytes` back to the task's origin after execution when a
    /// return link exists. Returned data counts towards completion.
    pub return_outputs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    TransferEnd,
    TaskEnd,
    TaskReady,
    TransferStart,
    TaskStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Event {
    time: SimTime,
    kind: EventKind,
    seq: u64,
    task: usize,
    /// Set on transfer events that carry results back to the origin.
    returning: bool,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Everything that happened to one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub task_id: u64,
    pub stage: Stage,
    pub resource: String,
    pub core: u32,
    pub ready: SimTime,
    pub transfer_start: Option<SimTime>,
    pub transfer_end: Option<SimTime>,
    pub queue_enter: SimTime,
    /// When the task left the queue and claimed its core.
    pub dispatch: SimTime,
    pub exec_start: SimTime,
    pub exec_end: SimTime,
    pub return_start: Option<SimTime>,
    pub return_end: Option<SimTime>,
    pub sampled_ops: f64,
    pub sampled_throughput: f64,
}

impl TaskRecord {
    /// Time the task's work is fully done, including any result return.
    pub fn completion(&self) -> SimTime {
        self.return_end.unwrap_or(self.exec_end).max(self.exec_end)
    }

    pub fn transfer_time(&self) -> SimTime {
        span(self.transfer_start, self.transfer_end) + span(self.return_start, self.return_end)
    }

    /// Waiting for a busy link plus waiting for a free core.
    pub fn queue_time(&self) -> SimTime {
        let link_wait = self.transfer_start.map_or(SimTime::ZERO, |s| s.saturating_sub(self.ready));
        let return_wait = self.return_start.map_or(SimTime::ZERO, |s| s.saturating_sub(self.exec_end));
        link_wait + self.dispatch.saturating_sub(self.queue_enter) + return_wait
    }

    pub fn dispatch_time(&self) -> SimTime {
        self.exec_start.saturating_sub(self.dispatch)
    }

    pub fn compute_time(&self) -> SimTime {
        self.exec_end.saturating_sub(self.exec_start)
    }

    /// Checks the per-task timestamp ordering.
    pub fn check(&self) -> std::result::Result<(), String> {
        let id = self.task_id;
        let (xs, xe) = match (self.transfer_start, self.transfer_end) {
            (Some(s), Some(e)) => (s, e),
            (None, None) => (self.ready, self.ready),
            _ => return Err(format!("task {id}: half-recorded transfer")),
        };
        let ordered = self.ready <= xs
            && xs <= xe
            && xe <= self.queue_enter
            && self.queue_enter <= self.dispatch
            && self.dispatch <= self.exec_start
            && self.exec_start < self.exec_end;
        if !ordered {
            return Err(format!("task {id}: timestamps out of order: {self:?}"));
        }
        match (self.return_start, self.return_end) {
            (None, None) => {}
            (Some(s), Some(e)) if self.exec_end <= s && s <= e => {}
            _ => return Err(format!("task {id}: malformed return transfer")),
        }
        if !(self.sampled_ops > 0.0 && self.sampled_throughput > 0.0) {
            return Err(format!("task {id}: non-positive sampled ops or throughput"));
        }
        Ok(())
    }
}

fn span(start: Option<SimTime>, end: Option<SimTime>) -> SimTime {
    match (start, end) {
        (Some(s), Some(e)) => e.saturating_sub(s),
        _ => SimTime::ZERO,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceInfo {
    pub id: String,
    pub tier: Tier,
    pub num_cores: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub seed: u64,
    pub strategy: String,
    /// Digest of the configuration that produced the run, when known.
    pub config_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub meta: TraceMeta,
    pub resources: Vec<ResourceInfo>,
    /// One record per task, in workload order.
    pub records: Vec<TaskRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseTotals {
    #[serde(rename = "transfer_us")]
    pub transfer: SimTime,
    #[serde(rename = "queue_us")]
    pub queue_wait: SimTime,
    #[serde(rename = "dispatch_us")]
    pub dispatch_delay: SimTime,
    #[serde(rename = "compute_us")]
    pub compute: SimTime,
}

impl PhaseTotals {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a TaskRecord>) -> Self {
        records.into_iter().fold(PhaseTotals::default(), |acc, r| PhaseTotals {
            transfer: acc.transfer + r.transfer_time(),
            queue_wait: acc.queue_wait + r.queue_time(),
            dispatch_delay: acc.dispatch_delay + r.dispatch_time(),
            compute: acc.compute + r.compute_time(),
        })
    }

    pub fn total(&self) -> SimTime {
        self.transfer + self.queue_wait + self.dispatch_delay + self.compute
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Trace,
    pub ttc: SimTime,
    pub phases: PhaseTotals,
}

/// Time from the earliest readiness to the latest completion.
pub fn ttc_of(records: &[TaskRecord]) -> SimTime {
    let first = records.iter().map(|r| r.ready).min().unwrap_or_default();
    let last = records.iter().map(TaskRecord::completion).max().unwrap_or_default();
    last.saturating_sub(first)
}

/// Index of the core that frees up first; lowest index among ties.
pub fn core_select(core_free: &[SimTime]) -> usize {
    core_free
        .iter()
        .enumerate()
        .min_by_key(|&(i, t)| (*t, i))
        .map(|(i, _)| i)
        .expect("resource has at least one core")
}

/// Checks the plan against the workload and platform without simulating.
pub fn validate_plan(
    workload: &Workload,
    resources: &[Resource],
    links: &[Link],
    plan: &PlacementPlan,
) -> Result<(), PlanError> {
    let mut resource_ids = HashMap::new();
    for (i, r) in resources.iter().enumerate() {
        if resource_ids.insert(r.id.as_str(), i).is_some() {
            return Err(PlanError::DuplicateResource(r.id.clone()));
        }
    }
    let mut link_pairs = HashMap::new();
    for l in links {
        if link_pairs.insert((l.src.as_str(), l.dst.as_str()), ()).is_some() {
            return Err(PlanError::DuplicateLink {
                src: l.src.clone(),
                dst: l.dst.clone(),
            });
        }
    }
    let mut task_ids = HashMap::new();
    for task in &workload.tasks {
        if task_ids.insert(task.id, ()).is_some() {
            return Err(PlanError::DuplicateTask(task.id));
        }
        if !resource_ids.contains_key(task.origin.as_str()) {
            return Err(PlanError::UnknownOrigin {
                task: task.id,
                resource: task.origin.clone(),
            });
        }
        let assigned = plan
            .assignment
            .get(&task.id)
            .ok_or(PlanError::UnassignedTask(task.id))?;
        if !resource_ids.contains_key(assigned.as_str()) {
            return Err(PlanError::UnknownResource {
                task: task.id,
                resource: assigned.clone(),
            });
        }
        if *assigned != task.origin && !link_pairs.contains_key(&(task.origin.as_str(), assigned.as_str())) {
            return Err(PlanError::MissingLink {
                src: task.origin.clone(),
                dst: assigned.clone(),
            });
        }
    }
    if let Some(extra) = plan.assignment.keys().find(|id| !task_ids.contains_key(id)) {
        return Err(PlanError::UnknownTask(*extra));
    }
    Ok(())
}

pub fn run(
    workload: &Workload,
    resources: &[Resource],
    links: &[Link],
    plan: &PlacementPlan,
    seed: u64,
) -> Result<RunResult> {
    run_with_options(workload, resources, links, plan, seed, &RunOptions::default())
}

pub fn run_with_options(
    workload: &Workload,
    resources: &[Resource],
    links: &[Link],
    plan: &PlacementPlan,
    seed: u64,
    options: &RunOptions,
) -> Result<RunResult> {
    validate_plan(workload, resources, links, plan)?;
    let mut sim = Simulation::new(workload, resources, links, plan, seed, options)?;
    sim.execute()?;
    let records = sim.into_records()?;
    let ttc = ttc_of(&records);
    let phases = PhaseTotals::from_records(&records);
    Ok(RunResult {
        trace: Trace {
            meta: TraceMeta {
                seed,
                strategy: plan.strategy.clone(),
                config_digest: None,
            },
            resources: resources
                .iter()
                .map(|r| ResourceInfo {
                    id: r.id.clone(),
                    tier: r.tier,
                    num_cores: r.num_cores,
                })
                .collect(),
            records,
        },
        ttc,
        phases,
    })
}

#[derive(Debug, Default, Clone)]
struct TaskState {
    ready: Option<SimTime>,
    transfer: Option<(SimTime, SimTime)>,
    queue_enter: Option<SimTime>,
    dispatch: Option<SimTime>,
    exec: Option<(SimTime, SimTime)>,
    core: u32,
    returned: Option<(SimTime, SimTime)>,
    throughput: f64,
}

struct ResourceState {
    core_free: Vec<SimTime>,
    queue: VecDeque<usize>,
    perf_rng: RngStream,
}

struct Simulation<'a> {
    workload: &'a Workload,
    resources: &'a [Resource],
    links: &'a [Link],
    options: &'a RunOptions,
    /// Resource index per task.
    assigned: Vec<usize>,
    origin: Vec<usize>,
    sampled_ops: Vec<f64>,
    link_index: HashMap<(usize, usize), usize>,
    link_states: Vec<LinkState>,
    resource_states: Vec<ResourceState>,
    tasks: Vec<TaskState>,
    /// Phased mode: task indices per phase, ascending phase order.
    phases: Vec<Vec<usize>>,
    phase_of: Vec<usize>,
    phase_remaining: Vec<usize>,
    queue: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
}

impl<'a> Simulation<'a> {
    fn new(
        workload: &'a Workload,
        resources: &'a [Resource],
        links: &'a [Link],
        plan: &PlacementPlan,
        seed: u64,
        options: &'a RunOptions,
    ) -> Result<Self> {
        let index: HashMap<&str, usize> = resources.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
        let assigned = workload
            .tasks
            .iter()
            .map(|t| index[plan.assignment[&t.id].as_str()])
            .collect();
        let origin = workload.tasks.iter().map(|t| index[t.origin.as_str()]).collect();
        let link_index = links
            .iter()
            .enumerate()
            .filter_map(|(i, l)| Some(((*index.get(l.src.as_str())?, *index.get(l.dst.as_str())?), i)))
            .collect();

        let mut ops_rng = RngStream::new(seed, OPS_STREAM);
        let sampled_ops = workload
            .tasks
            .iter()
            .map(|t| match workload.ops_dist {
                None => t.num_ops,
                Some(dist) => {
                    let draw = sample(&dist, &mut ops_rng);
                    let ops = match workload.ops_dist_mode {
                        OpsDistMode::Absolute => draw,
                        OpsDistMode::Multiplier => draw * t.num_ops,
                    };
                    if ops.is_nan() {
                        workload.ops_floor
                    } else {
                        ops.max(workload.ops_floor)
                    }
                }
            })
            .collect();

        let resource_states = resources
            .iter()
            .map(|r| ResourceState {
                core_free: vec![SimTime::ZERO; r.num_cores as usize],
                queue: VecDeque::new(),
                perf_rng: RngStream::new(seed, perf_stream_label(&r.id)),
            })
            .collect();

        let mut by_phase: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        if workload.dependency_mode == DependencyMode::Phased {
            for (i, t) in workload.tasks.iter().enumerate() {
                by_phase.entry(t.phase).or_default().push(i);
            }
        }
        let phases: Vec<Vec<usize>> = by_phase.into_values().collect();
        let mut phase_of = vec![0; workload.tasks.len()];
        for (p, members) in phases.iter().enumerate() {
            for &i in members {
                phase_of[i] = p;
            }
        }
        let phase_remaining = phases.iter().map(Vec::len).collect();

        Ok(Simulation {
            workload,
            resources,
            links,
            options,
            assigned,
            origin,
            sampled_ops,
            link_index,
            link_states: vec![LinkState::new(); links.len()],
            resource_states,
            tasks: vec![TaskState::default(); workload.tasks.len()],
            phases,
            phase_of,
            phase_remaining,
            queue: BinaryHeap::new(),
            next_seq: 0,
        })
    }

    fn push(&mut self, time: SimTime, kind: EventKind, task: usize, returning: bool) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Event {
            time,
            kind,
            seq,
            task,
            returning,
        }));
    }

    /// Enqueues ready events for `members` in task-id order.
    fn release(&mut self, time: SimTime, members: &[usize]) {
        let mut order = members.to_vec();
        order.sort_by_key(|&i| self.workload.tasks[i].id);
        for i in order {
            self.push(time, EventKind::TaskReady, i, false);
        }
    }

    fn execute(&mut self) -> Result<()> {
        if self.workload.tasks.is_empty() {
            return Ok(());
        }
        match self.workload.dependency_mode {
            DependencyMode::Independent => {
                let all: Vec<usize> = (0..self.workload.tasks.len()).collect();
                self.release(SimTime::ZERO, &all);
            }
            DependencyMode::Sequential => self.push(SimTime::ZERO, EventKind::TaskReady, 0, false),
            DependencyMode::Phased => {
                let first = self.phases[0].clone();
                self.release(SimTime::ZERO, &first);
            }
        }

        while let Some(Reverse(event)) = self.queue.pop() {
            let now = event.time;
            match event.kind {
                EventKind::TaskReady => self.on_ready(event.task, now)?,
                EventKind::TransferEnd if !event.returning => self.enter_queue(event.task, now)?,
                EventKind::TaskEnd => self.on_task_end(event.task, now)?,
                EventKind::TransferEnd | EventKind::TransferStart | EventKind::TaskStart => {}
            }
        }
        Ok(())
    }

    fn on_ready(&mut self, i: usize, now: SimTime) -> Result<()> {
        self.tasks[i].ready = Some(now);
        let (src, dst) = (self.origin[i], self.assigned[i]);
        let task = &self.workload.tasks[i];
        if src == dst || task.input_bytes == 0 {
            return self.enter_queue(i, now);
        }
        let (start, end) = self.schedule_transfer(i, src, dst, task.input_bytes, now)?;
        self.tasks[i].transfer = Some((start, end));
        self.push(start, EventKind::TransferStart, i, false);
        self.push(end, EventKind::TransferEnd, i, false);
        Ok(())
    }

    fn schedule_transfer(&mut self, i: usize, src: usize, dst: usize, bytes: u64, ready: SimTime) -> Result<(SimTime, SimTime)> {
        let l = *self.link_index.get(&(src, dst)).ok_or_else(|| PlanError::MissingLink {
            src: self.resources[src].id.clone(),
            dst: self.resources[dst].id.clone(),
        })?;
        let req = TransferRequest {
            task_id: self.workload.tasks[i].id,
            src: self.resources[src].id.clone(),
            dst: self.resources[dst].id.clone(),
            bytes,
            ready,
        };
        self.link_states[l].schedule(&self.links[l], &req)
    }

    fn enter_queue(&mut self, i: usize, now: SimTime) -> Result<()> {
        self.tasks[i].queue_enter = Some(now);
        let r = self.assigned[i];
        self.resource_states[r].queue.push_back(i);
        self.try_dispatch(r, now)
    }

    fn try_dispatch(&mut self, r: usize, now: SimTime) -> Result<()> {
        let resource = &self.resources[r];
        loop {
            let state = &mut self.resource_states[r];
            let Some(&i) = state.queue.front() else {
                return Ok(());
            };
            let core = core_select(&state.core_free);
            if state.core_free[core] > now {
                return Ok(());
            }
            state.queue.pop_front();

            let throughput = match resource.perf_dist {
                None => resource.ops_per_sec,
                Some(dist) => {
                    let t = sample(&dist, &mut state.perf_rng) * resource.ops_per_sec;
                    if t.is_nan() {
                        resource.throughput_floor()
                    } else {
                        t.max(resource.throughput_floor())
                    }
                }
            };
            let duration = duration_for(self.sampled_ops[i], throughput)?;
            let exec_start = now.checked_add(resource.dispatch_delay)?;
            let exec_end = exec_start.checked_add(duration)?;
            state.core_free[core] = exec_end;

            let ts = &mut self.tasks[i];
            ts.dispatch = Some(now);
            ts.exec = Some((exec_start, exec_end));
            ts.core = core as u32;
            ts.throughput = throughput;
            self.push(exec_start, EventKind::TaskStart, i, false);
            self.push(exec_end, EventKind::TaskEnd, i, false);
        }
    }

    fn on_task_end(&mut self, i: usize, now: SimTime) -> Result<()> {
        let (src, dst) = (self.assigned[i], self.origin[i]);
        let out = self.workload.tasks[i].output_bytes;
        if self.options.return_outputs && src != dst && out > 0 && self.link_index.contains_key(&(src, dst)) {
            let (start, end) = self.schedule_transfer(i, src, dst, out, now)?;
            self.tasks[i].returned = Some((start, end));
            self.push(start, EventKind::TransferStart, i, true);
            self.push(end, EventKind::TransferEnd, i, true);
        }

        match self.workload.dependency_mode {
            DependencyMode::Independent => {}
            DependencyMode::Sequential => {
                if i + 1 < self.workload.tasks.len() {
                    self.push(now, EventKind::TaskReady, i + 1, false);
                }
            }
            DependencyMode::Phased => {
                let p = self.phase_of[i];
                self.phase_remaining[p] -= 1;
                if self.phase_remaining[p] == 0 && p + 1 < self.phases.len() {
                    let next = self.phases[p + 1].clone();
                    self.release(now, &next);
                }
            }
        }
        self.try_dispatch(self.assigned[i], now)
    }

    fn into_records(self) -> Result<Vec<TaskRecord>> {
        self.workload
            .tasks
            .iter()
            .zip(self.tasks)
            .enumerate()
            .map(|(i, (task, st))| {
                let incomplete = || Error::Compute(format!("task {} never completed", task.id));
                let (exec_start, exec_end) = st.exec.ok_or_else(incomplete)?;
                Ok(TaskRecord {
                    task_id: task.id,
                    stage: task.stage,
                    resource: self.resources[self.assigned[i]].id.clone(),
                    core: st.core,
                    ready: st.ready.ok_or_else(incomplete)?,
                    transfer_start: st.transfer.map(|t| t.0),
                    transfer_end: st.transfer.map(|t| t.1),
                    queue_enter: st.queue_enter.ok_or_else(incomplete)?,
                    dispatch: st.dispatch.ok_or_else(incomplete)?,
                    exec_start,
                    exec_end,
                    return_start: st.returned.map(|t| t.0),
                    return_end: st.returned.map(|t| t.1),
                    sampled_ops: self.sampled_ops[i],
                    sampled_throughput: st.throughput,
                })
            })
            .collect()
    }
}
