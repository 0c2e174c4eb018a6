//! Convergence sweeps over a grid of time and space refinement levels.

use std::path::{Path, PathBuf};

use cutfem_core::analysis::ConvergenceTable;
use cutfem_core::cases::CaseSpec;
use cutfem_core::mesh::build_structured_mesh_with;
use cutfem_core::stepping::{BdfOrder, Scheme};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{AppError, AppResult};
use crate::output::write_atomic;
use crate::report::CONSERVATION_TOLERANCE;
use crate::tables::{self, Footer, Precision};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellOutcome {
    pub l2_l2: f64,
    pub l2_h1: f64,
    pub max_abs_drift: f64,
    pub conservative: bool,
    pub max_relative_residual: f64,
    pub norm_growth: f64,
    pub steps: usize,
    pub final_dofs: usize,
    pub warnings: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub row: usize,
    pub col: usize,
    pub lt: usize,
    pub lx: usize,
    pub h: f64,
    pub dt: f64,
    pub outcome: Result<CellOutcome, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub case: String,
    pub bdf: BdfOrder,
    /// Row-major in `(lt, lx)`, independent of completion order.
    pub cells: Vec<SweepCell>,
    pub l2_l2: ConvergenceTable,
    pub l2_h1: ConvergenceTable,
}

impl SweepResult {
    pub fn failed(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.outcome.is_err())
    }

    pub fn footers_l2(&self) -> Vec<Footer> {
        vec![Footer::EocX, Footer::EocXt]
    }

    pub fn footers_h1(&self) -> Vec<Footer> {
        match self.bdf {
            BdfOrder::One => vec![Footer::EocX, Footer::EocXt],
            BdfOrder::Two => vec![Footer::EocX, Footer::EocXt, Footer::EocXxt],
        }
    }
}

fn run_cell(cfg: &RunConfig, case: &CaseSpec, h: f64, dt: f64) -> Result<CellOutcome, String> {
    let mesh = build_structured_mesh_with(case.bbox, h, cfg.diagonal).map_err(|e| e.to_string())?;
    let scheme_cfg = cfg.scheme_config(case, dt).map_err(|e| e.to_string())?;
    let scheme = Scheme::new(case, scheme_cfg, &mesh).map_err(|e| e.to_string())?;
    let report = scheme.run(&mut []).map_err(|e| e.to_string())?;
    let errors = report
        .errors
        .ok_or_else(|| format!("case `{}` has no exact solution", case.name))?;
    let conservation = report.conservation(CONSERVATION_TOLERANCE);
    Ok(CellOutcome {
        l2_l2: errors.l2_l2(),
        l2_h1: errors.l2_h1(),
        max_abs_drift: conservation.max_abs_drift,
        conservative: conservation.passed(),
        max_relative_residual: report.max_relative_residual(),
        norm_growth: report.norm_growth(),
        steps: report.steps,
        final_dofs: report.final_state.current().dofs.len(),
        warnings: report.warnings.len(),
    })
}

/// Runs every `(lt, lx)` cell; failed cells are recorded and the sweep
/// continues.
pub fn run_sweep(cfg: &RunConfig) -> AppResult<SweepResult> {
    let case = cfg.case_spec()?;
    let bdf = cfg.bdf_order()?;
    if !case.has_exact_solution() {
        return Err(AppError::Usage(format!("case `{}` has no exact solution to sweep", case.name)));
    }
    if cfg.lt_levels.is_empty() || cfg.lx_levels.is_empty() {
        return Err(AppError::Usage("sweep ranges must be non-empty".into()));
    }
    let mut jobs = Vec::new();
    for (row, &lt) in cfg.lt_levels.iter().enumerate() {
        for (col, &lx) in cfg.lx_levels.iter().enumerate() {
            let (h, dt) = cfg.resolution(&case, lt, lx)?;
            jobs.push((row, col, lt, lx, h, dt));
        }
    }
    let work = || -> Vec<SweepCell> {
        jobs.par_iter()
            .map(|&(row, col, lt, lx, h, dt)| {
                log::info!("cell lt = {lt}, lx = {lx}: h = {h}, dt = {dt}");
                SweepCell {
                    row,
                    col,
                    lt,
                    lx,
                    h,
                    dt,
                    outcome: run_cell(cfg, &case, h, dt),
                }
            })
            .collect()
    };
    let cells = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut l2_l2 = ConvergenceTable::new(cfg.lt_levels.clone(), cfg.lx_levels.clone());
    let mut l2_h1 = l2_l2.clone();
    for cell in &cells {
        if let Ok(o) = &cell.outcome {
            l2_l2.set(cell.row, cell.col, Some(o.l2_l2));
            l2_h1.set(cell.row, cell.col, Some(o.l2_h1));
        }
    }
    Ok(SweepResult {
        case: case.name,
        bdf,
        cells,
        l2_l2,
        l2_h1,
    })
}

#[derive(Serialize)]
struct CellRow<'a> {
    lt: usize,
    lx: usize,
    h: f64,
    dt: f64,
    status: &'a str,
    l2_l2: Option<f64>,
    l2_h1: Option<f64>,
    max_abs_drift: Option<f64>,
    max_relative_residual: Option<f64>,
    norm_growth: Option<f64>,
    steps: Option<usize>,
    final_dofs: Option<usize>,
    message: &'a str,
}

pub fn cells_csv(result: &SweepResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in &result.cells {
        let ok = c.outcome.as_ref().ok();
        let status = match &c.outcome {
            Ok(o) if o.conservative => "ok",
            Ok(_) => "drift",
            Err(_) => "failed",
        };
        w.serialize(CellRow {
            lt: c.lt,
            lx: c.lx,
            h: c.h,
            dt: c.dt,
            status,
            l2_l2: ok.map(|o| o.l2_l2),
            l2_h1: ok.map(|o| o.l2_h1),
            max_abs_drift: ok.map(|o| o.max_abs_drift),
            max_relative_residual: ok.map(|o| o.max_relative_residual),
            norm_growth: ok.map(|o| o.norm_growth),
            steps: ok.map(|o| o.steps),
            final_dofs: ok.map(|o| o.final_dofs),
            message: c.outcome.as_ref().err().map_or("", String::as_str),
        })
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes both tables (short precision and full-precision sidecar) and the
/// per-cell listing; returns the written paths.
pub fn write_sweep(dir: &Path, result: &SweepResult) -> AppResult<Vec<PathBuf>> {
    let stem = format!("{}_bdf{}", result.case, result.bdf.as_int());
    let mut files = Vec::new();
    for (norm, table, footers) in [
        ("l2l2", &result.l2_l2, result.footers_l2()),
        ("l2h1", &result.l2_h1, result.footers_h1()),
    ] {
        files.push((
            dir.join(format!("{stem}_{norm}.csv")),
            tables::render(table, &footers, Precision::Short).into_bytes(),
        ));
        files.push((
            dir.join(format!("{stem}_{norm}.full.csv")),
            tables::render(table, &footers, Precision::Full).into_bytes(),
        ));
    }
    files.push((dir.join(format!("{stem}_cells.csv")), cells_csv(result)));
    let mut written = Vec::new();
    for (path, bytes) in files {
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}
