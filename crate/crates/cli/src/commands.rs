//! `run`, `sweep` and `validate`.

use std::io::Write;
use std::path::{Path, PathBuf};

use continuum_emu::engine::validate_plan;
use continuum_emu::placement::{compare_strategies_with_options, Comparison};
use continuum_emu::{make_plan, PlanError};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{self, Diagnostic, LoadedConfig};
use crate::output::{self, Provenance, SweepPoint};

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const RUN: i32 = 3;
    pub const SWEEP_PARTIAL: i32 = 4;
}

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub sets: Vec<String>,
    /// Value of the seed environment variable, if set.
    pub env_seed: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub env_seed: Option<String>,
}

fn report(err: &mut dyn Write, diag: &Diagnostic) {
    let _ = writeln!(err, "error: {diag}");
}

fn out_dir(cli: &Option<PathBuf>, loaded: &LoadedConfig) -> PathBuf {
    cli.clone()
        .or_else(|| loaded.config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn load_with_overrides(path: &Path, sets: &[String]) -> Result<LoadedConfig, Diagnostic> {
    if sets.is_empty() {
        return config::load(path);
    }
    let mut doc = config::read_document(path)?;
    for raw in sets {
        let (p, v) = config::parse_assignment(raw)?;
        config::set_path(&mut doc, &p, v)?;
    }
    config::parse_value(doc)
}

/// Plan validation for every strategy, without simulating.
fn check_plans(loaded: &LoadedConfig) -> Result<(), Diagnostic> {
    let sc = loaded.config.build()?;
    for (i, spec) in sc.strategies.iter().enumerate() {
        let at = format!("strategies[{i}]");
        let plan = make_plan(&sc.workload, &sc.resources, spec).map_err(|e| Diagnostic::new(at.clone(), e))?;
        validate_plan(&sc.workload, &sc.resources, &sc.links, &plan).map_err(|e| match e {
            PlanError::MissingLink { .. } => Diagnostic::new(format!("{at} / links"), e),
            other => Diagnostic::new(at.clone(), other),
        })?;
    }
    Ok(())
}

fn emulate(loaded: &LoadedConfig, seed: u64) -> Result<Comparison, String> {
    let sc = loaded.config.build().map_err(|d| d.to_string())?;
    let mut cmp = compare_strategies_with_options(&sc.workload, &sc.resources, &sc.links, &sc.strategies, seed, &sc.options)
        .map_err(|e| e.to_string())?;
    let digest = loaded.digest();
    for row in &mut cmp.rows {
        row.result.trace.meta.config_digest = Some(digest.clone());
    }
    Ok(cmp)
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match load_with_overrides(&args.config, &args.sets) {
        Ok(l) => l,
        Err(d) => {
            report(err, &d);
            return exit::SCHEMA;
        }
    };
    if let Err(d) = loaded.config.build() {
        report(err, &d);
        return exit::SCHEMA;
    }
    let seed = match config::effective_seed(loaded.config.seed, args.seed, args.env_seed.as_deref()) {
        Ok(s) => s,
        Err(d) => {
            report(err, &d);
            return exit::SCHEMA;
        }
    };
    let cmp = match emulate(&loaded, seed) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::RUN;
        }
    };

    let prov = Provenance {
        seed,
        config_digest: loaded.digest(),
    };
    let dir = out_dir(&args.out, &loaded);
    let written = output::trace_csv(&prov, &cmp).and_then(|trace| {
        output::write_file(&dir, output::SUMMARY_FILE, output::summary_json(&prov, &cmp).as_bytes())?;
        output::write_file(&dir, output::TRACE_FILE, &trace)
    });
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing outputs to {}: {e}", dir.display());
        return exit::IO;
    }
    let _ = writeln!(out, "seed {seed}  config {}", prov.config_digest);
    let _ = output::print_table(out, &cmp);
    let _ = writeln!(out, "wrote {}", dir.display());
    exit::OK
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match config::load(&args.config) {
        Ok(l) => l,
        Err(d) => {
            report(err, &d);
            return exit::SCHEMA;
        }
    };
    let Some(sweep) = loaded.config.sweep.clone() else {
        report(err, &Diagnostic::new("sweep", "config has no sweep section"));
        return exit::SCHEMA;
    };
    if sweep.values.is_empty() {
        report(err, &Diagnostic::new("sweep.values", "no values to sweep"));
        return exit::SCHEMA;
    }
    if let Err(d) = loaded.config.build() {
        report(err, &d);
        return exit::SCHEMA;
    }
    let seed = match config::effective_seed(loaded.config.seed, None, args.env_seed.as_deref()) {
        Ok(s) => s,
        Err(d) => {
            report(err, &d);
            return exit::SCHEMA;
        }
    };

    let order = config::sweep_order(&sweep.values);
    let point = |idx: &usize| -> SweepPoint {
        let value: &Value = &sweep.values[*idx];
        let mut doc = loaded.document.clone();
        let outcome = config::set_path(&mut doc, &sweep.parameter, value.clone())
            .and_then(|()| config::parse_value(doc))
            .map_err(|d| d.to_string())
            .and_then(|point_cfg| emulate(&point_cfg, seed));
        SweepPoint {
            value: config::render_value(value),
            outcome,
        }
    };
    // Points are independent; results are collected back in sweep order.
    let points: Vec<SweepPoint> = match args.jobs {
        Some(1) => order.iter().map(point).collect(),
        jobs => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build();
            match pool {
                Ok(pool) => pool.install(|| order.par_iter().map(point).collect()),
                Err(e) => {
                    let _ = writeln!(err, "error: starting workers: {e}");
                    return exit::IO;
                }
            }
        }
    };

    let prov = Provenance {
        seed,
        config_digest: loaded.digest(),
    };
    let dir = out_dir(&args.out, &loaded);
    let written = output::sweep_csv(&prov, &sweep.parameter, &points)
        .and_then(|bytes| output::write_file(&dir, output::SWEEP_FILE, &bytes));
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing {}: {e}", dir.join(output::SWEEP_FILE).display());
        return exit::IO;
    }

    let failures: Vec<&SweepPoint> = points.iter().filter(|p| p.outcome.is_err()).collect();
    let _ = writeln!(out, "seed {seed}  config {}", prov.config_digest);
    let _ = writeln!(out, "{:>12} {:<20} {:>12}", sweep.parameter.rsplit('.').next().unwrap_or("value"), "winner", "ttc_s");
    for p in &points {
        if let Ok(cmp) = &p.outcome {
            let best = cmp.best_row();
            let _ = writeln!(out, "{:>12} {:<20} {:>12.6}", p.value, best.label, best.summary.ttc.as_secs_f64());
        }
    }
    let _ = writeln!(out, "wrote {}", dir.join(output::SWEEP_FILE).display());
    if failures.is_empty() {
        return exit::OK;
    }
    let _ = writeln!(err, "{} of {} sweep points failed:", failures.len(), points.len());
    for p in failures {
        if let Err(e) = &p.outcome {
            let _ = writeln!(err, "  {} = {}: {e}", sweep.parameter, p.value);
        }
    }
    exit::SWEEP_PARTIAL
}

pub fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match config::load(path) {
        Ok(l) => l,
        Err(d) => {
            report(err, &d);
            return exit::SCHEMA;
        }
    };
    if let Err(d) = check_plans(&loaded) {
        report(err, &d);
        return exit::SCHEMA;
    }
    if let Some(sweep) = &loaded.config.sweep {
        for (i, value) in sweep.values.iter().enumerate() {
            let mut doc = loaded.document.clone();
            let checked = config::set_path(&mut doc, &sweep.parameter, value.clone())
                .and_then(|()| config::parse_value(doc))
                .and_then(|l| check_plans(&l));
            if let Err(d) = checked {
                report(err, &Diagnostic::new(format!("sweep.values[{i}]"), d));
                return exit::SCHEMA;
            }
        }
    }
    let _ = writeln!(out, "{}", loaded.normalized());
    let _ = writeln!(out, "config_digest {}", loaded.digest());
    exit::OK
}
