mod support;

use continuum_emu::{run, summarize, DependencyMode, Error, Link, Resource, SimTime, Stage, Task, Tier, Workload};
use support::{all_on, single_resource, uniform_tasks};

#[test]
fn single_task_summary() {
    let w = uniform_tasks(1, 5, "r0");
    let s = summarize(&run(&w, &single_resource(1), &[], &all_on(&w, "r0"), 0).unwrap()).unwrap();
    assert_eq!(s.ttc, SimTime::from_secs(5));
    assert_eq!(s.phases.compute, SimTime::from_secs(5));
    assert_eq!(s.phases.transfer + s.phases.queue_wait + s.phases.dispatch_delay, SimTime::ZERO);
    assert_eq!(s.resources[0].utilization, 1.0);
}

#[test]
fn wave_utilization() {
    let w = uniform_tasks(10, 5, "r0");
    let s = summarize(&run(&w, &single_resource(4), &[], &all_on(&w, "r0"), 0).unwrap()).unwrap();
    // 50 busy core-seconds over 4 cores × 15 s.
    assert!((s.resources[0].utilization - 50.0 / 60.0).abs() < 1e-12);
    assert_eq!(s.resources[0].busy, SimTime::from_secs(50));
}

#[test]
fn sequential_single_core_phases_add_up() {
    let tasks = (0..6).map(|i| Task::new(i, 1.5e6, "edge").with_bytes(if i == 0 { 3_000_000 } else { 0 }, 0)).collect();
    let w = Workload::new(tasks, DependencyMode::Sequential).unwrap();
    let r = vec![
        Resource::new("edge", Tier::Edge, 1, 1e6).unwrap(),
        Resource::new("cloud", Tier::Cloud, 1, 2e6).unwrap().with_dispatch_delay(SimTime::from_millis(40)),
    ];
    let l = vec![Link::new("edge", "cloud", 1e6).unwrap().with_setup_overhead(SimTime::from_millis(300))];
    let res = run(&w, &r, &l, &all_on(&w, "cloud"), 0).unwrap();
    let s = summarize(&res).unwrap();
    assert_eq!(s.phases.total(), s.ttc);
    assert_eq!(s.phases.transfer, SimTime::from_millis(3300));
    assert_eq!(s.phases.dispatch_delay, SimTime::from_millis(240));
    assert_eq!(s.stages.len(), 1);
    assert_eq!(s.stages[0].stage, Stage::Generic);
    assert_eq!(s.stages[0].span, s.ttc);
}

#[test]
fn summarize_is_pure() {
    let w = uniform_tasks(7, 2, "r0");
    let res = run(&w, &single_resource(3), &[], &all_on(&w, "r0"), 0).unwrap();
    assert_eq!(summarize(&res).unwrap(), summarize(&res).unwrap());
}

#[test]
fn malformed_traces_are_rejected() {
    let w = uniform_tasks(2, 1, "r0");
    let good = run(&w, &single_resource(1), &[], &all_on(&w, "r0"), 0).unwrap();

    let mut bad = good.clone();
    bad.trace.records[1].exec_start = SimTime::ZERO;
    assert!(matches!(summarize(&bad), Err(Error::Analysis(_))));

    let mut bad = good.clone();
    bad.trace.records[0].resource = "ghost".into();
    assert!(matches!(summarize(&bad), Err(Error::Analysis(_))));

    let mut bad = good;
    bad.trace.records.clear();
    assert!(matches!(summarize(&bad), Err(Error::Analysis(_))));
}
