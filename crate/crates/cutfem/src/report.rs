//! Run reports: per-step CSV, ledger CSV and a JSON summary.

use std::path::{Path, PathBuf};

use cutfem_core::stepping::{LedgerEntry, RunReport, StepRecord};
use serde::Serialize;

use crate::error::AppResult;
use crate::output::write_atomic;

/// Drift bound used to flag a run as non-conservative.
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

#[derive(Serialize)]
struct StepRow {
    step: usize,
    t: f64,
    dofs: usize,
    active_elements: usize,
    strip_elements: usize,
    stabilized_facets: usize,
    measure: f64,
    mass: f64,
    drift: f64,
    balance_defect: f64,
    l2_norm: f64,
    l2_error: Option<f64>,
    h1_error: Option<f64>,
    relative_residual: f64,
    solver_iterations: usize,
    max_extension_path: usize,
    unreachable_strip_elements: usize,
}

impl From<&StepRecord> for StepRow {
    fn from(r: &StepRecord) -> Self {
        Self {
            step: r.step,
            t: r.time,
            dofs: r.dofs,
            active_elements: r.active_elements,
            strip_elements: r.strip_elements,
            stabilized_facets: r.stabilized_facets,
            measure: r.measure,
            mass: r.mass,
            drift: r.drift,
            balance_defect: r.balance_defect,
            l2_norm: r.l2_norm,
            l2_error: r.l2_error_sq.map(f64::sqrt),
            h1_error: r.h1_error_sq.map(f64::sqrt),
            relative_residual: r.relative_residual,
            solver_iterations: r.solver_iterations,
            max_extension_path: r.max_extension_path,
            unreachable_strip_elements: r.unreachable_strip_elements,
        }
    }
}

#[derive(Serialize)]
struct LedgerRow {
    step: usize,
    t: f64,
    mass: f64,
    source: f64,
    source_sum: f64,
    ideal_change: f64,
    drift: f64,
    balance_defect: f64,
}

impl From<&LedgerEntry> for LedgerRow {
    fn from(e: &LedgerEntry) -> Self {
        Self {
            step: e.step,
            t: e.time,
            mass: e.mass,
            source: e.source,
            source_sum: e.source_sum,
            ideal_change: e.ideal_change,
            drift: e.drift,
            balance_defect: e.balance_defect,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub case: String,
    pub bdf: u32,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub nu: f64,
    pub c_delta: f64,
    pub c_gamma: f64,
    pub delta_h: f64,
    pub final_dofs: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub max_abs_drift: f64,
    pub max_abs_balance_defect: f64,
    pub conservative: bool,
    pub failing_steps: Vec<usize>,
    pub max_relative_residual: f64,
    pub norm_growth: f64,
    pub l2_l2_error: Option<f64>,
    pub l2_h1_error: Option<f64>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn new(report: &RunReport, h: f64) -> Self {
        let cfg = &report.config;
        let conservation = report.conservation(CONSERVATION_TOLERANCE);
        Self {
            case: report.case.clone(),
            bdf: cfg.bdf_order.as_int(),
            h,
            dt: cfg.dt,
            steps: report.steps,
            nu: cfg.nu,
            c_delta: cfg.c_delta,
            c_gamma: cfg.c_gamma,
            delta_h: cfg.delta_h(),
            final_dofs: report.final_state.current().dofs.len(),
            initial_mass: report.ledger.initial_mass(),
            final_mass: report.ledger.last().mass,
            max_abs_drift: conservation.max_abs_drift,
            max_abs_balance_defect: conservation.max_abs_balance,
            conservative: conservation.passed(),
            failing_steps: conservation.failing_steps,
            max_relative_residual: report.max_relative_residual(),
            norm_growth: report.norm_growth(),
            l2_l2_error: report.errors.map(|e| e.l2_l2()),
            l2_h1_error: report.errors.map(|e| e.l2_h1()),
            warnings: report.warnings.clone(),
        }
    }
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn steps_csv(report: &RunReport) -> Vec<u8> {
    to_csv(report.records.iter().map(StepRow::from))
}

pub fn ledger_csv(report: &RunReport) -> Vec<u8> {
    to_csv(report.ledger.entries.iter().map(LedgerRow::from))
}

pub fn summary_json(summary: &RunSummary) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(summary).expect("plain data serialises");
    out.push(b'\n');
    out
}

/// Writes `steps.csv`, `ledger.csv` and `summary.json` into `dir`.
pub fn write_run(dir: &Path, report: &RunReport, summary: &RunSummary) -> AppResult<Vec<PathBuf>> {
    let files = [
        (dir.join("steps.csv"), steps_csv(report)),
        (dir.join("ledger.csv"), ledger_csv(report)),
        (dir.join("summary.json"), summary_json(summary)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}
