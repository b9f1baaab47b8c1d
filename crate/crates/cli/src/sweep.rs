//! Runs a grid of parameter points in parallel and aggregates the results.
//!
//! The aggregate is deterministic: rows follow grid order and carry no
//! timing. Wall times are returned separately.

use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use rayon::prelude::*;
use rootfock_core::report::Summary;
use serde::Serialize;

use crate::config::{BackendChoice, Params, RunConfig, Suite};
use crate::runner::run_point;

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "ROOTFOCK_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    /// Identifiers of failed checks.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_definite: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SweepSummary {
    pub points: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub backend: BackendChoice,
    pub suites: Vec<Suite>,
    pub tolerance: f64,
    pub summary: SweepSummary,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,k,l,status,total,passed,failed,error\n");
        for r in &self.rows {
            let s = r.summary.unwrap_or_default();
            let err = r.error.as_deref().unwrap_or("").replace('"', "\"\"");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},\"{}\"\n",
                r.m,
                r.n,
                r.k,
                r.l,
                serde_json::to_value(r.status).expect("status serializes").as_str().unwrap_or(""),
                s.total,
                s.passed,
                s.failed,
                err
            ));
        }
        out
    }
}

fn run_row(template: &RunConfig, p: Params) -> SweepRow {
    let mut cfg = template.clone();
    cfg.params = p;
    let base = SweepRow {
        m: p.m,
        n: p.n,
        k: p.k,
        l: p.l,
        status: RowStatus::Error,
        error: None,
        summary: None,
        failures: Vec::new(),
        grade_count: None,
        positive_definite: None,
    };
    match run_point(&cfg) {
        Ok(r) => SweepRow {
            status: if r.all_passed() { RowStatus::Pass } else { RowStatus::Fail },
            summary: Some(r.report.summary),
            failures: r.report.failures().map(|e| e.id()).collect(),
            grade_count: r.decomposition.as_ref().map(|d| d.count),
            positive_definite: r.positivity.as_ref().map(|p| p.positive_definite),
            ..base
        },
        Err(e) => SweepRow {
            error: Some(format!("{e:#}")),
            ..base
        },
    }
}

/// Worker count from an explicit value, else the environment, else rayon's default.
pub fn resolve_workers(explicit: Option<usize>) -> Result<Option<usize>> {
    if let Some(w) = explicit {
        return Ok(Some(w.max(1)));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let w: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))?;
            Ok(Some(w.max(1)))
        }
        Err(_) => Ok(None),
    }
}

/// Runs every point; a failing or erroring point never stops the others.
pub fn sweep(template: &RunConfig, points: &[Params], workers: Option<usize>) -> Result<(SweepReport, Vec<Duration>)> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().context("starting the worker pool")?;
    let timed: Vec<(SweepRow, Duration)> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let t = Instant::now();
                let row = run_row(template, *p);
                (row, t.elapsed())
            })
            .collect()
    });
    let (rows, times): (Vec<_>, Vec<_>) = timed.into_iter().unzip();
    let mut summary = SweepSummary {
        points: rows.len(),
        ..Default::default()
    };
    for r in &rows {
        match r.status {
            RowStatus::Pass => summary.passed += 1,
            RowStatus::Fail => summary.failed += 1,
            RowStatus::Error => summary.errors += 1,
        }
    }
    Ok((
        SweepReport {
            schema: rootfock_core::report::REPORT_SCHEMA,
            backend: template.backend,
            suites: template.suites.clone(),
            tolerance: template.tolerance,
            summary,
            rows,
        },
        times,
    ))
}

/// One line per point: parameters and wall time in milliseconds.
pub fn format_timings(points: &[Params], times: &[Duration]) -> String {
    points
        .iter()
        .zip(times)
        .map(|(p, t)| format!("{},{},{},{} {:.3} ms\n", p.m, p.n, p.k, p.l, t.as_secs_f64() * 1e3))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_points;

    fn template() -> RunConfig {
        RunConfig::new(Params { m: 1, n: 1, k: 2, l: 1 })
    }

    #[test]
    fn empty_grid() {
        let (r, t) = sweep(&template(), &[], Some(1)).unwrap();
        assert!(r.rows.is_empty() && t.is_empty());
        assert!(r.all_passed());
    }

    #[test]
    fn bad_point_does_not_abort() {
        let pts = parse_points("1,1,2,1;1,1,4,2;1,1,3,1").unwrap();
        let (r, _) = sweep(&template(), &pts, Some(2)).unwrap();
        let st: Vec<_> = r.rows.iter().map(|r| r.status).collect();
        assert_eq!(st, vec![RowStatus::Pass, RowStatus::Error, RowStatus::Pass]);
        assert!(r.rows[1].error.as_ref().unwrap().contains("gcd"));
        assert!(!r.all_passed());
        assert_eq!(r.summary.errors, 1);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let pts = parse_points("1,1,2,1;2,1,3,1;1,2,3,1;1,0,4,3").unwrap();
        let (a, _) = sweep(&template(), &pts, Some(1)).unwrap();
        let (b, _) = sweep(&template(), &pts, Some(4)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_csv().lines().count() == 5);
    }
}
