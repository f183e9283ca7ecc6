//! Step-by-step list-schedule simulation, written without the event queue.
//! Handles independent workloads with constant throughput only.

use continuum_emu::{Link, LinkConcurrency, PlacementPlan, Resource, Workload};

fn ceil_div(num: u128, den: u128) -> u64 {
    num.div_ceil(den) as u64
}

/// Integral parameters keep the arithmetic exact: throughputs and
/// bandwidths in the random instances are whole numbers.
fn micros(amount: f64, per_sec: f64) -> u64 {
    assert!(amount.fract() == 0.0 && per_sec.fract() == 0.0);
    ceil_div(amount as u128 * 1_000_000, per_sec as u128)
}

/// Per-task execution end times (µs), indexed like `workload.tasks`.
pub fn list_schedule(workload: &Workload, resources: &[Resource], links: &[Link], plan: &PlacementPlan) -> Vec<u64> {
    let res_index = |id: &str| resources.iter().position(|r| r.id == id).unwrap();
    let n = workload.tasks.len();

    // Transfers, FIFO per link in task-id order (all tasks ready at 0).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| workload.tasks[i].id);
    let mut link_free = vec![0u64; links.len()];
    let mut arrival = vec![0u64; n];
    for &i in &order {
        let t = &workload.tasks[i];
        let dst = &plan.assignment[&t.id];
        if *dst == t.origin || t.input_bytes == 0 {
            continue;
        }
        let l = links.iter().position(|l| l.src == t.origin && l.dst == *dst).unwrap();
        let link = &links[l];
        let dur = link.setup_overhead.as_micros()
            + link.latency.as_micros()
            + micros(t.input_bytes as f64, link.bandwidth_bytes_per_sec);
        let start = match link.concurrency {
            LinkConcurrency::Serial => link_free[l],
            LinkConcurrency::Unlimited => 0,
        };
        arrival[i] = start + dur;
        if link.concurrency == LinkConcurrency::Serial {
            link_free[l] = arrival[i];
        }
    }

    // Per resource: arrivals in (time, id) order onto the earliest-free core.
    let mut end = vec![0u64; n];
    for (r, res) in resources.iter().enumerate() {
        let mut mine: Vec<usize> = (0..n)
            .filter(|&i| res_index(&plan.assignment[&workload.tasks[i].id]) == r)
            .collect();
        mine.sort_by_key(|&i| (arrival[i], workload.tasks[i].id));
        let mut free = vec![0u64; res.num_cores as usize];
        for i in mine {
            let mut core = 0;
            for c in 1..free.len() {
                if free[c] < free[core] {
                    core = c;
                }
            }
            let start = arrival[i].max(free[core]) + res.dispatch_delay.as_micros();
            end[i] = start + micros(workload.tasks[i].num_ops, res.ops_per_sec);
            free[core] = end[i];
        }
    }
    end
}
