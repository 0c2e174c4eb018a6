//! File-writing step observers.

use std::path::PathBuf;

use cutfem_core::stepping::{Observer, StepView};

use crate::output::{matrix_market, matrix_market_vector, write_atomic};
use crate::vtk;

/// Writes `snapshot_NNNN.vtk` every `every` steps and at the last step.
pub struct VtkSeries {
    pub dir: PathBuf,
    pub every: usize,
    pub last_step: usize,
    pub written: Vec<PathBuf>,
}

impl VtkSeries {
    pub fn new(dir: PathBuf, every: usize, last_step: usize) -> Self {
        Self {
            dir,
            every: every.max(1),
            last_step,
            written: Vec::new(),
        }
    }
}

impl Observer for VtkSeries {
    fn observe(&mut self, view: &StepView<'_>) -> Result<(), String> {
        let step = view.record.step;
        if !step.is_multiple_of(self.every) && step != self.last_step {
            return Ok(());
        }
        let level = view.level;
        let title = format!("{} step {} t = {:e}", view.case.name, step, level.time);
        let text = vtk::snapshot(view.mesh, &level.frame, &level.active, &level.solution, &title);
        let path = self.dir.join(format!("snapshot_{step:04}.vtk"));
        write_atomic(&path, text.as_bytes()).map_err(|e| e.to_string())?;
        self.written.push(path);
        Ok(())
    }
}

/// Writes the system matrix, right-hand side and dof-to-vertex map of one
/// step in Matrix Market format.
pub struct SystemDump {
    pub dir: PathBuf,
    pub step: usize,
    pub written: Vec<PathBuf>,
}

impl SystemDump {
    pub fn new(dir: PathBuf, step: usize) -> Self {
        Self {
            dir,
            step,
            written: Vec::new(),
        }
    }
}

impl Observer for SystemDump {
    fn observe(&mut self, view: &StepView<'_>) -> Result<(), String> {
        if view.record.step != self.step {
            return Ok(());
        }
        let Some(ops) = view.operators else {
            return Ok(());
        };
        let step = self.step;
        let vertices: Vec<f64> = view.level.dofs.globals().iter().map(|&v| v as f64).collect();
        let files = [
            (format!("system_{step:04}.mtx"), matrix_market(&ops.system.matrix)),
            (format!("rhs_{step:04}.mtx"), matrix_market_vector(&ops.system.rhs)),
            (format!("ghost_{step:04}.mtx"), matrix_market(&ops.ghost_penalty)),
            (format!("dofs_{step:04}.mtx"), matrix_market_vector(&vertices)),
        ];
        for (name, text) in files {
            let path = self.dir.join(name);
            write_atomic(&path, text.as_bytes()).map_err(|e| e.to_string())?;
            self.written.push(path);
        }
        Ok(())
    }
}
