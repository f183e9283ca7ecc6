//! Output files: `summary.json`, `trace.csv` and `sweep.csv`.
//!
//! Every file carries the schema version, seed and config digest. CSV files
//! put them in a leading `#` comment line.

use std::io::{self, Write};
use std::path::Path;

use continuum_emu::placement::{Comparison, StrategySpec};
use continuum_emu::{SimTime, Summary};
use serde::Serialize;

use crate::config::SCHEMA_VERSION;

pub const SUMMARY_FILE: &str = "summary.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    pub config_digest: String,
}

impl Provenance {
    fn comment(&self, extra: &str) -> String {
        format!(
            "# schema_version={SCHEMA_VERSION} seed={} config_digest={}{extra}\n",
            self.seed, self.config_digest
        )
    }
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema_version: u32,
    seed: u64,
    config_digest: &'a str,
    best: &'a str,
    strategies: Vec<StrategyDoc<'a>>,
}

#[derive(Serialize)]
struct StrategyDoc<'a> {
    label: &'a str,
    spec: &'a StrategySpec,
    delta_vs_best: f64,
    summary: &'a Summary,
}

pub fn summary_json(prov: &Provenance, cmp: &Comparison) -> String {
    let doc = SummaryDoc {
        schema_version: SCHEMA_VERSION,
        seed: prov.seed,
        config_digest: &prov.config_digest,
        best: &cmp.best_row().label,
        strategies: cmp
            .rows
            .iter()
            .map(|r| StrategyDoc {
                label: &r.label,
                spec: &r.spec,
                delta_vs_best: r.delta_vs_best,
                summary: &r.summary,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
    text.push('\n');
    text
}

fn opt_us(t: Option<SimTime>) -> String {
    t.map(|t| t.as_micros().to_string()).unwrap_or_default()
}

pub fn trace_csv(prov: &Provenance, cmp: &Comparison) -> io::Result<Vec<u8>> {
    let mut buf = prov.comment("").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([
            "strategy",
            "task_id",
            "resource",
            "ready_us",
            "xfer_start_us",
            "xfer_end_us",
            "exec_start_us",
            "exec_end_us",
            "ops",
            "throughput",
        ])?;
        for row in &cmp.rows {
            for r in &row.result.trace.records {
                w.write_record([
                    row.label.clone(),
                    r.task_id.to_string(),
                    r.resource.clone(),
                    r.ready.as_micros().to_string(),
                    opt_us(r.transfer_start),
                    opt_us(r.transfer_end),
                    r.exec_start.as_micros().to_string(),
                    r.exec_end.as_micros().to_string(),
                    r.sampled_ops.to_string(),
                    r.sampled_throughput.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(buf)
}

/// One sweep point: either every strategy's result or the error that
/// stopped it.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub outcome: Result<Comparison, String>,
}

pub fn sweep_csv(prov: &Provenance, parameter: &str, points: &[SweepPoint]) -> io::Result<Vec<u8>> {
    let mut buf = prov.comment(&format!(" parameter={parameter}")).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([
            "value",
            "strategy",
            "ttc_us",
            "ttc_sec",
            "transfer_us",
            "queue_us",
            "dispatch_us",
            "compute_us",
            "delta_vs_best",
            "error",
        ])?;
        for point in points {
            match &point.outcome {
                Ok(cmp) => {
                    for row in &cmp.rows {
                        let s = &row.summary;
                        w.write_record([
                            point.value.clone(),
                            row.label.clone(),
                            s.ttc.as_micros().to_string(),
                            s.ttc_sec.to_string(),
                            s.phases.transfer.as_micros().to_string(),
                            s.phases.queue_wait.as_micros().to_string(),
                            s.phases.dispatch_delay.as_micros().to_string(),
                            s.phases.compute.as_micros().to_string(),
                            row.delta_vs_best.to_string(),
                            String::new(),
                        ])?;
                    }
                }
                Err(e) => {
                    let mut rec = vec![point.value.clone()];
                    rec.extend(std::iter::repeat_n(String::new(), 8));
                    rec.push(e.clone());
                    w.write_record(rec)?;
                }
            }
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), bytes)
}

pub fn print_table(out: &mut dyn Write, cmp: &Comparison) -> io::Result<()> {
    writeln!(
        out,
        "{:<20} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}",
        "strategy", "ttc_s", "transfer_s", "queue_s", "dispatch_s", "compute_s", "delta"
    )?;
    for (i, row) in cmp.rows.iter().enumerate() {
        let s = &row.summary;
        let marker = if i == cmp.best { "*" } else { "" };
        writeln!(
            out,
            "{:<20} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>+8.1}%{marker}",
            row.label,
            s.ttc.as_secs_f64(),
            s.phases.transfer.as_secs_f64(),
            s.phases.queue_wait.as_secs_f64(),
            s.phases.dispatch_delay.as_secs_f64(),
            s.phases.compute.as_secs_f64(),
            row.delta_vs_best * 100.0,
        )?;
    }
    Ok(())
}
