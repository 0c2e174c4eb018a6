//! Subcommand implementations behind the `cutfem` binary.

use std::path::{Path, PathBuf};

use cutfem_core::mesh::build_structured_mesh_with;
use cutfem_core::stepping::{Observer, Scheme};

use crate::config::RunConfig;
use crate::error::{AppError, AppResult};
use crate::observers::{SystemDump, VtkSeries};
use crate::output::{ensure_dir, write_atomic};
use crate::report::{write_run, RunSummary};
use crate::sweep::{run_sweep, write_sweep, SweepResult};
use crate::validate::ensure_valid;
use crate::vtk;

const VALIDATION_SEED: u64 = 0x5eed;

pub struct RunOutcome {
    pub summary: RunSummary,
    pub files: Vec<PathBuf>,
}

/// One simulation at the configured resolution. Numerical failures and
/// conservation violations are errors with exit code 1.
pub fn cmd_run(cfg: &RunConfig) -> AppResult<RunOutcome> {
    let case = cfg.case_spec()?;
    if cfg.validate {
        ensure_valid(&case, VALIDATION_SEED)?;
    }
    let (h, dt) = cfg.resolution(&case, cfg.lt, cfg.lx)?;
    let scheme_cfg = cfg.scheme_config(&case, dt)?;
    let mesh = build_structured_mesh_with(case.bbox, h, cfg.diagonal)?;
    log::info!(
        "{}: {} vertices, {} elements, h_max = {:e}, quasi-uniformity {:.3}",
        case.name,
        mesh.num_vertices(),
        mesh.num_elements(),
        mesh.h_max,
        mesh.quasi_uniformity()
    );
    let scheme = Scheme::new(&case, scheme_cfg, &mesh)?;
    ensure_dir(&cfg.output)?;

    let mut vtk_series = (cfg.snapshot_every > 0)
        .then(|| VtkSeries::new(cfg.output.join("vtk"), cfg.snapshot_every, scheme.steps()));
    let mut dump = cfg.dump_step.map(|s| SystemDump::new(cfg.output.join("systems"), s));
    let mut observers: Vec<&mut dyn Observer> = Vec::new();
    if let Some(o) = vtk_series.as_mut() {
        observers.push(o);
    }
    if let Some(o) = dump.as_mut() {
        observers.push(o);
    }
    let report = scheme.run(&mut observers)?;
    drop(observers);

    let summary = RunSummary::new(&report, h);
    let mut files = write_run(&cfg.output, &report, &summary)?;
    let config_path = cfg.output.join("config.txt");
    write_atomic(&config_path, cfg.render().as_bytes())?;
    files.push(config_path);
    files.extend(vtk_series.into_iter().flat_map(|o| o.written));
    files.extend(dump.into_iter().flat_map(|o| o.written));
    if !summary.conservative {
        return Err(AppError::Failed(format!(
            "mass drift {:e} exceeds the conservation bound at steps {:?}",
            summary.max_abs_drift, summary.failing_steps
        )));
    }
    Ok(RunOutcome { summary, files })
}

pub struct ConvergenceOutcome {
    pub result: SweepResult,
    pub files: Vec<PathBuf>,
}

/// Full `(lt, lx)` sweep. Tables are written even if cells fail; any failed
/// cell turns the outcome into an error after writing.
pub fn cmd_convergence(cfg: &RunConfig) -> AppResult<ConvergenceOutcome> {
    let case = cfg.case_spec()?;
    if cfg.validate {
        ensure_valid(&case, VALIDATION_SEED)?;
    }
    ensure_dir(&cfg.output)?;
    let result = run_sweep(cfg)?;
    let files = write_sweep(&cfg.output, &result)?;
    let failed: Vec<String> = result
        .failed()
        .map(|c| format!("(lt {}, lx {}): {}", c.lt, c.lx, c.outcome.as_ref().unwrap_err()))
        .collect();
    if !failed.is_empty() {
        return Err(AppError::Failed(format!("{} cells failed: {}", failed.len(), failed.join("; "))));
    }
    Ok(ConvergenceOutcome { result, files })
}

/// Background mesh with the initial physical/strip/active markers.
pub fn cmd_export_mesh(cfg: &RunConfig, path: &Path) -> AppResult<()> {
    let case = cfg.case_spec()?;
    let (h, dt) = cfg.resolution(&case, cfg.lt, cfg.lx)?;
    let scheme_cfg = cfg.scheme_config(&case, dt)?;
    let mesh = build_structured_mesh_with(case.bbox, h, cfg.diagonal)?;
    let scheme = Scheme::new(&case, scheme_cfg, &mesh)?;
    let state = scheme.initialize()?;
    let level = state.current();
    let title = format!("{} background mesh h = {h:e}", case.name);
    let text = vtk::snapshot(&mesh, &level.frame, &level.active, &level.solution, &title);
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_writes_report_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            case: "static-disk".into(),
            output: dir.path().to_path_buf(),
            snapshot_every: 2,
            dump_step: Some(1),
            ..RunConfig::default()
        };
        let outcome = cmd_run(&cfg).unwrap();
        let names: Vec<String> = outcome
            .files
            .iter()
            .map(|p| p.strip_prefix(dir.path()).unwrap().display().to_string())
            .collect();
        for expected in ["steps.csv", "ledger.csv", "summary.json", "config.txt", "vtk/snapshot_0000.vtk", "vtk/snapshot_0004.vtk", "systems/system_0001.mtx"] {
            assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
        }
        assert!(outcome.summary.conservative);
    }

    #[test]
    fn export_mesh_writes_vtk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.vtk");
        cmd_export_mesh(&RunConfig::default(), &path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("DATASET UNSTRUCTURED_GRID"));
        assert!(text.contains("SCALARS strip int 1"));
    }
}
