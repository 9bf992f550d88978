use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ea_lab::BoundReport;
use serde::Serialize;

use crate::config::{ConfigDocument, SweepVariable};
use crate::lab::{evaluate_bounds, evaluate_point, PointReport};
use crate::output::{fmt_opt, write_atomic, write_json, write_samples};

pub const DEFAULT_OUTPUT: &str = "ea-lab-out";

/// Process exit status of a verb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every requested check held.
    Satisfied,
    /// At least one bound or hypothesis check failed.
    Unsatisfied,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Satisfied
        } else {
            Outcome::Unsatisfied
        }
    }

    pub fn code(&self) -> i32 {
        match self {
            Outcome::Satisfied => 0,
            Outcome::Unsatisfied => 2,
        }
    }
}

/// Settings shared by all verbs after flags and environment are applied.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub config: ConfigDocument,
    pub out: PathBuf,
    pub threads: usize,
    pub quiet: bool,
}

impl Invocation {
    pub fn new(
        config_path: &Path,
        out: Option<PathBuf>,
        threads: usize,
        seed: Option<u64>,
        quiet: bool,
    ) -> Result<Self> {
        let mut config = ConfigDocument::load(config_path)?;
        if let Some(s) = seed {
            config.seed = s;
        }
        let out = out
            .or_else(|| config.output.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
        Ok(Self {
            config,
            out,
            threads,
            quiet,
        })
    }

    fn prepare_out(&self) -> Result<()> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))
    }
}

#[derive(Serialize)]
struct RunDocument<'a> {
    config: &'a ConfigDocument,
    #[serde(flatten)]
    point: &'a PointReport,
}

pub fn cmd_run(inv: &Invocation) -> Result<Outcome> {
    let doc = &inv.config;
    let point = evaluate_point(doc, &doc.function, inv.threads)?;
    inv.prepare_out()?;
    write_samples(&inv.out.join("samples.csv"), &point.batch.samples)?;
    write_atomic(
        &inv.out.join("comparison.csv"),
        point.report.comparison.to_csv()?.as_bytes(),
    )?;
    write_json(
        &inv.out.join("summary.json"),
        &RunDocument {
            config: doc,
            point: &point.report,
        },
    )?;
    if !inv.quiet {
        print_point(&doc.name, &point.report);
    }
    Ok(Outcome::from_bool(point.report.checks_satisfied))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub value: usize,
    #[serde(flatten)]
    pub report: PointReport,
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    config: &'a ConfigDocument,
    variable: SweepVariable,
    points: &'a [SweepPoint],
}

/// Runs every sweep point without writing files.
pub fn sweep_points(
    doc: &ConfigDocument,
    threads: usize,
) -> Result<Vec<(SweepPoint, Vec<ea_lab::RunSample>)>> {
    let Some(sweep) = &doc.sweep else {
        bail!("the sweep verb needs a sweep section");
    };
    if sweep.values.is_empty() {
        bail!("sweep.values: must not be empty");
    }
    sweep
        .values
        .iter()
        .map(|&v| {
            let f = doc.function.with_variable(sweep.variable, v)?;
            let p = evaluate_point(doc, &f, threads)
                .with_context(|| format!("sweep point {} = {v}", sweep.variable.name()))?;
            Ok((
                SweepPoint {
                    value: v,
                    report: p.report,
                },
                p.batch.samples,
            ))
        })
        .collect()
}

/// Growth-curve table: one row per sweep point, one column per runtime bound.
pub fn curve_csv(variable: SweepVariable, points: &[SweepPoint]) -> String {
    let mut ids: Vec<String> = Vec::new();
    for p in points {
        for r in &p.report.comparison.rows {
            if r.quantity != "oracle" && !ids.contains(&r.quantity) {
                ids.push(r.quantity.clone());
            }
        }
    }
    let mut out = format!("{},empirical_mean,stderr,oracle", variable.name());
    for id in &ids {
        out.push_str(&format!(",bound_{id}"));
    }
    out.push('\n');
    for p in points {
        let s = &p.report.runtime_summary;
        out.push_str(&format!(
            "{},{},{},{}",
            p.value,
            fmt_opt(s.mean),
            fmt_opt(s.stderr),
            fmt_opt(p.report.oracle.evaluations)
        ));
        for id in &ids {
            let b = p.report.comparison.row(id).and_then(|r| r.bound);
            out.push_str(&format!(",{}", fmt_opt(b)));
        }
        out.push('\n');
    }
    out
}

pub fn cmd_sweep(inv: &Invocation) -> Result<Outcome> {
    let doc = &inv.config;
    let results = sweep_points(doc, inv.threads)?;
    let variable = doc.sweep.as_ref().map(|s| s.variable).expect("checked");
    inv.prepare_out()?;
    for (p, samples) in &results {
        let name = format!("samples_{}{}.csv", variable.name(), p.value);
        write_samples(&inv.out.join(name), samples)?;
    }
    let points: Vec<SweepPoint> = results.into_iter().map(|(p, _)| p).collect();
    write_atomic(
        &inv.out.join("curve.csv"),
        curve_csv(variable, &points).as_bytes(),
    )?;
    write_json(
        &inv.out.join("summary.json"),
        &SweepDocument {
            config: doc,
            variable,
            points: &points,
        },
    )?;
    if !inv.quiet {
        for p in &points {
            print_point(
                &format!("{} {}={}", doc.name, variable.name(), p.value),
                &p.report,
            );
        }
    }
    Ok(Outcome::from_bool(
        points.iter().all(|p| p.report.checks_satisfied),
    ))
}

/// Evaluates the requested bounds for the configured function, no simulation.
pub fn bound_reports(doc: &ConfigDocument) -> Result<Vec<BoundReport>> {
    if doc.bounds.is_empty() {
        bail!("bounds: the bound set is empty");
    }
    let e = doc.experiment()?;
    evaluate_bounds(&doc.bounds, &doc.function, &e)
}

pub fn cmd_bounds(inv: &Invocation) -> Result<Outcome> {
    let reports = bound_reports(&inv.config)?;
    if !inv.quiet {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    }
    Ok(Outcome::from_bool(reports.iter().all(|r| r.hypotheses_ok)))
}

fn print_point(label: &str, p: &PointReport) {
    let s = &p.runtime_summary;
    println!(
        "{label}: {} runs, {} hits, mean {} (se {})",
        s.runs,
        s.successes,
        fmt_opt(s.mean),
        fmt_opt(s.stderr)
    );
    if let Some(note) = &p.oracle.note {
        println!("  oracle: {note}");
    }
    for r in &p.comparison.rows {
        println!(
            "  {:<24} {:>14} {}",
            r.quantity,
            fmt_opt(r.bound.or(r.oracle)),
            if r.satisfied { "ok" } else { "VIOLATED" }
        );
    }
}
