#![allow(dead_code)]

pub mod oracle;

use continuum_emu::{DependencyMode, Link, Resource, RngStream, Task, Tier, Workload};
use continuum_emu::{LinkConcurrency, PlacementPlan, SimTime};

/// A small random instance: ≤ 6 tasks, ≤ 2 resources, ≤ 3 cores, constant
/// throughput, optional link in each direction.
#[derive(Debug, Clone)]
pub struct Instance {
    pub workload: Workload,
    pub resources: Vec<Resource>,
    pub links: Vec<Link>,
    pub plan: PlacementPlan,
}

fn pick(rng: &mut RngStream, n: u64) -> u64 {
    rng.next_u64() % n
}

pub fn random_instance(rng: &mut RngStream) -> Instance {
    let n_res = 1 + pick(rng, 2) as usize;
    let resources: Vec<Resource> = (0..n_res)
        .map(|i| {
            let tier = if i == 0 { Tier::Edge } else { Tier::Cloud };
            let cores = 1 + pick(rng, 3) as u32;
            let thr = [1e6, 2e6, 2.5e6, 3e6, 7e6][pick(rng, 5) as usize];
            Resource::new(format!("r{i}"), tier, cores, thr)
                .unwrap()
                .with_dispatch_delay(SimTime::from_micros(pick(rng, 3) * 250_000))
        })
        .collect();
    let mut links = Vec::new();
    if n_res == 2 {
        for (s, d) in [(0, 1), (1, 0)] {
            let concurrency = if pick(rng, 2) == 0 { LinkConcurrency::Serial } else { LinkConcurrency::Unlimited };
            links.push(
                Link::new(format!("r{s}"), format!("r{d}"), [1e5, 1e6, 4e6][pick(rng, 3) as usize])
                    .unwrap()
                    .with_setup_overhead(SimTime::from_micros(1 + pick(rng, 500_000)))
                    .with_latency(SimTime::from_micros(pick(rng, 50_000)))
                    .with_concurrency(concurrency),
            );
        }
    }
    let n_tasks = 1 + pick(rng, 6);
    let tasks: Vec<Task> = (0..n_tasks)
        .map(|id| {
            let origin = format!("r{}", pick(rng, n_res as u64));
            Task::new(id, (1 + pick(rng, 20)) as f64 * 1e6, origin).with_bytes(pick(rng, 4) * 300_000, 0)
        })
        .collect();
    let plan = PlacementPlan {
        assignment: tasks.iter().map(|t| (t.id, format!("r{}", pick(rng, n_res as u64)))).collect(),
        strategy: "random".into(),
    };
    Instance {
        workload: Workload::new(tasks, DependencyMode::Independent).unwrap(),
        resources,
        links,
        plan,
    }
}

/// `n` identical tasks of `secs` seconds each at 1 op/µs.
pub fn uniform_tasks(n: u64, secs: u64, origin: &str) -> Workload {
    let tasks = (0..n).map(|i| Task::new(i, secs as f64 * 1e6, origin)).collect();
    Workload::new(tasks, DependencyMode::Independent).unwrap()
}

pub fn single_resource(cores: u32) -> Vec<Resource> {
    vec![Resource::new("r0", Tier::Edge, cores, 1e6).unwrap()]
}

pub fn all_on(workload: &Workload, resource: &str) -> PlacementPlan {
    PlacementPlan {
        assignment: workload.tasks.iter().map(|t| (t.id, resource.to_string())).collect(),
        strategy: "fixed".into(),
    }
}

/// Ordinary least squares: `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
